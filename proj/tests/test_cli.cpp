#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include "mbflow/io/csv.hpp"
#include "mbflow/io/flo.hpp"
#include "mbflow/io/image_io.hpp"

#include "test_util.hpp"

using namespace mbflow;

namespace {

struct CliResult {
    int code = -1;
    std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
    auto log = testutil::temp_dir() / "out.txt";
    std::string cmd = std::string(MBFLOW_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    CliResult res;
    res.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    std::ifstream in(log);
    res.output.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return res;
}

std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// one shared synthetic scene bundle for the CLI tests
const std::string& scene_dir() {
    static std::string dir = [] {
        auto d = testutil::temp_dir() / "scene";
        CliResult r = run_cli("synth --seed 9 --out-dir " + d.string());
        REQUIRE(r.code == 0);
        return d.string();
    }();
    return dir;
}

}  // namespace

TEST_CASE("synth writes the full bundle deterministically") {
    const std::string& dir = scene_dir();
    for (const char* name : {"frame1.png", "frame2.png", "frame3.png", "gt_flow.flo",
                             "est_flow.flo", "est_flow_bwd.flo", "gt_mb.png", "manifest.txt"})
        REQUIRE(std::filesystem::exists(std::filesystem::path(dir) / name));

    auto d2 = testutil::temp_dir() / "scene2";
    REQUIRE(run_cli("synth --seed 9 --out-dir " + d2.string()).code == 0);
    REQUIRE(read_text(std::filesystem::path(dir) / "est_flow.flo") ==
            read_text(d2 / "est_flow.flo"));
    REQUIRE(read_text(std::filesystem::path(dir) / "frame2.png") ==
            read_text(d2 / "frame2.png"));
}

TEST_CASE("missing required flags exit with usage code 2 and name the flag") {
    const std::string& dir = scene_dir();
    auto out = testutil::temp_dir();
    CliResult r = run_cli("detect --frame2 " + dir + "/frame2.png --frame3 " + dir +
                          "/frame3.png --out-dir " + out.string());
    REQUIRE(r.code == 2);
    REQUIRE(r.output.find("--flow-fwd") != std::string::npos);

    REQUIRE(run_cli("").code == 2);                  // no subcommand
    REQUIRE(run_cli("detect --nonsense").code == 2);  // unknown flag
    REQUIRE(run_cli("--help").code == 0);
}

TEST_CASE("detect writes maps, manifest and metrics; profile sets the thresholds") {
    const std::string& dir = scene_dir();
    auto out = testutil::temp_dir();
    CliResult r = run_cli("detect --frame1 " + dir + "/frame1.png --frame2 " + dir +
                          "/frame2.png --frame3 " + dir + "/frame3.png --flow-fwd " + dir +
                          "/est_flow.flo --flow-bwd " + dir +
                          "/est_flow_bwd.flo --gt-mb " + dir +
                          "/gt_mb.png --profile sintel --jobs 2 --out-dir " + out.string());
    REQUIRE(r.code == 0);
    for (const char* name : {"b_hat.png", "m_e.png", "m_md.png", "m_ism.png", "manifest.txt",
                             "detect_metrics.csv"})
        REQUIRE(std::filesystem::exists(out / name));

    std::string manifest = read_text(out / "manifest.txt");
    REQUIRE(manifest.find("theta-md = 1\n") != std::string::npos);
    REQUIRE(manifest.find("theta-ism = 0.2\n") != std::string::npos);
    REQUIRE(manifest.find("profile = sintel") != std::string::npos);

    BinaryMap b = io::read_binary_map(out / "b_hat.png");
    REQUIRE(b.count() > 0);
    io::CsvTable metrics = io::read_csv(out / "detect_metrics.csv");
    REQUIRE(metrics.rows[0][metrics.column("f1")] > 0.0);
}

TEST_CASE("kitti profile lands in the manifest") {
    const std::string& dir = scene_dir();
    auto out = testutil::temp_dir();
    CliResult r = run_cli("detect --frame2 " + dir + "/frame2.png --frame3 " + dir +
                          "/frame3.png --flow-fwd " + dir + "/est_flow.flo --profile kitti" +
                          " --out-dir " + out.string());
    REQUIRE(r.code == 0);
    std::string manifest = read_text(out / "manifest.txt");
    REQUIRE(manifest.find("theta-md = 3\n") != std::string::npos);
    REQUIRE(manifest.find("theta-ism = 0.6\n") != std::string::npos);
    // explicit flags beat the profile
    auto out2 = testutil::temp_dir();
    r = run_cli("detect --frame2 " + dir + "/frame2.png --frame3 " + dir +
                "/frame3.png --flow-fwd " + dir + "/est_flow.flo --profile kitti" +
                " --theta-md 2.5 --out-dir " + out2.string());
    REQUIRE(r.code == 0);
    REQUIRE(read_text(out2 / "manifest.txt").find("theta-md = 2.5\n") != std::string::npos);
}

TEST_CASE("malformed inputs exit with data code 3") {
    const std::string& dir = scene_dir();
    auto out = testutil::temp_dir();
    auto bogus = out / "bogus.flo";
    std::ofstream(bogus) << "this is not a flow file";
    CliResult r = run_cli("detect --frame2 " + dir + "/frame2.png --frame3 " + dir +
                          "/frame3.png --flow-fwd " + bogus.string() + " --out-dir " +
                          out.string());
    REQUIRE(r.code == 3);
}

TEST_CASE("refine with an empty boundary map copies the flow bit-exactly") {
    const std::string& dir = scene_dir();
    auto out = testutil::temp_dir();
    BinaryMap empty(128, 128);
    io::write_binary_map(empty, out / "empty.png");
    CliResult r = run_cli("refine --frame2 " + dir + "/frame2.png --flow-fwd " + dir +
                          "/est_flow.flo --boundaries " + (out / "empty.png").string() +
                          " --out-dir " + out.string());
    REQUIRE(r.code == 0);
    REQUIRE(read_text(out / "refined.flo") ==
            read_text(std::filesystem::path(dir) / "est_flow.flo"));
    io::CsvTable assignments = io::read_csv(out / "assignments.csv");
    REQUIRE(assignments.rows.empty());
}

TEST_CASE("refine detects internally, then a manifest re-run reproduces the outputs") {
    const std::string& dir = scene_dir();
    auto r1 = testutil::temp_dir() / "r1";
    auto r2 = testutil::temp_dir() / "r2";
    CliResult first = run_cli("refine --frame1 " + dir + "/frame1.png --frame2 " + dir +
                              "/frame2.png --frame3 " + dir + "/frame3.png --flow-fwd " + dir +
                              "/est_flow.flo --flow-bwd " + dir +
                              "/est_flow_bwd.flo --jobs 1 --out-dir " + r1.string());
    REQUIRE(first.code == 0);
    REQUIRE(std::filesystem::exists(r1 / "b_hat.png"));  // internal detection artifact

    CliResult second = run_cli("refine --config " + (r1 / "manifest.txt").string() +
                               " --jobs 3 --out-dir " + r2.string());
    REQUIRE(second.code == 0);
    REQUIRE(read_text(r1 / "refined.flo") == read_text(r2 / "refined.flo"));
    REQUIRE(read_text(r1 / "assignments.csv") == read_text(r2 / "assignments.csv"));
    REQUIRE(read_text(r1 / "b_hat.png") == read_text(r2 / "b_hat.png"));

    // the refined flow really replaced something on this scene
    io::CsvTable assignments = io::read_csv(r1 / "assignments.csv");
    REQUIRE(!assignments.rows.empty());
}

TEST_CASE("eval reports F1 = 1 when prediction equals ground truth") {
    const std::string& dir = scene_dir();
    auto out = testutil::temp_dir();
    CliResult r = run_cli("eval --pred-mb " + dir + "/gt_mb.png --gt-mb " + dir +
                          "/gt_mb.png --out-dir " + out.string());
    REQUIRE(r.code == 0);
    io::CsvTable t = io::read_csv(out / "eval_mb.csv");
    REQUIRE(t.rows[0][t.column("f1")] == 1.0);
}

TEST_CASE("eval flow mode reports AEPE and the replaced-point table") {
    const std::string& dir = scene_dir();
    auto refdir = testutil::temp_dir() / "ref";
    REQUIRE(run_cli("refine --frame1 " + dir + "/frame1.png --frame2 " + dir +
                    "/frame2.png --frame3 " + dir + "/frame3.png --flow-fwd " + dir +
                    "/est_flow.flo --flow-bwd " + dir + "/est_flow_bwd.flo --out-dir " +
                    refdir.string()).code == 0);
    auto out = testutil::temp_dir();
    CliResult r = run_cli("eval --flow " + dir + "/est_flow.flo --gt-flow " + dir +
                          "/gt_flow.flo --refined-flow " + (refdir / "refined.flo").string() +
                          " --assignments " + (refdir / "assignments.csv").string() +
                          " --gt-mb " + dir + "/gt_mb.png --out-dir " + out.string());
    REQUIRE(r.code == 0);
    io::CsvTable flow = io::read_csv(out / "eval_flow.csv");
    REQUIRE(flow.rows[0][flow.column("aepe")] > 0.0);
    io::CsvTable rep = io::read_csv(out / "eval_replaced.csv");
    REQUIRE(rep.rows[0][rep.column("replaced_pixels")] > 0.0);
    REQUIRE(rep.rows[0][rep.column("reduction_pct")] > 0.0);
    // curves + scatter were deduced from the supplied inputs
    io::CsvTable curve = io::read_csv(out / "curve_epe_vs_distance.csv");
    REQUIRE(curve.rows.size() == 61);  // max_dist + 1 bins
    REQUIRE(std::filesystem::exists(out / "curve_error_decomposition.csv"));
    REQUIRE(std::filesystem::exists(out / "scatter_side_epe.csv"));
}

TEST_CASE("curves subcommand emits the two curve files") {
    const std::string& dir = scene_dir();
    auto out = testutil::temp_dir();
    CliResult r = run_cli("curves --flow " + dir + "/est_flow.flo --gt-flow " + dir +
                          "/gt_flow.flo --gt-mb " + dir + "/gt_mb.png --max-dist 20 --out-dir " +
                          out.string());
    REQUIRE(r.code == 0);
    io::CsvTable curve = io::read_csv(out / "curve_epe_vs_distance.csv");
    REQUIRE(curve.rows.size() == 21);
    REQUIRE(std::filesystem::exists(out / "scatter_side_epe.csv"));
}

TEST_CASE("an impossible synthetic spec is a data error") {
    auto out = testutil::temp_dir();
    CliResult r = run_cli("synth --fg-x 75 --out-dir " + out.string());  // fits frame 2, not 3
    REQUIRE(r.code == 3);
    REQUIRE(r.output.find("leaves the frame") != std::string::npos);
}

TEST_CASE("eval without usable inputs is a usage error") {
    auto out = testutil::temp_dir();
    REQUIRE(run_cli("eval --out-dir " + out.string()).code == 2);
}

TEST_CASE("an external edge map replaces the built-in detector") {
    const std::string& dir = scene_dir();
    auto out = testutil::temp_dir();
    CliResult r = run_cli("detect --frame2 " + dir + "/frame2.png --frame3 " + dir +
                          "/frame3.png --flow-fwd " + dir + "/est_flow.flo --edge-map " + dir +
                          "/gt_mb.png --out-dir " + out.string());
    REQUIRE(r.code == 0);
    // the edge map in the output is exactly the thresholded input
    BinaryMap m_e = io::read_binary_map(out / "m_e.png");
    BinaryMap given = io::read_binary_map(std::filesystem::path(dir) / "gt_mb.png");
    REQUIRE(m_e.data() == given.data());
}

TEST_CASE("external edge maps with wrong dimensions exit with code 3") {
    const std::string& dir = scene_dir();
    auto out = testutil::temp_dir();
    BinaryMap small(64, 64);
    io::write_binary_map(small, out / "edge.png");
    CliResult r = run_cli("detect --frame2 " + dir + "/frame2.png --frame3 " + dir +
                          "/frame3.png --flow-fwd " + dir + "/est_flow.flo --edge-map " +
                          (out / "edge.png").string() + " --out-dir " + out.string());
    REQUIRE(r.code == 3);
}
