// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one [PASS]/[FAIL] line per criterion. Exit code = number of
// failed criteria. Criterion 9 needs user-supplied data (see README) and is
// reported as a skip when MBFLOW_SINTEL_INDEX is not set.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "mbflow/pipeline/runner.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

using namespace mbflow;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                detail.empty() ? "" : " : ", detail.c_str());
    if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// ---- criterion 1: hysteresis equals the brute-force CC oracle ----

void criterion_hysteresis() {
    auto t0 = Clock::now();
    std::mt19937 rng(2024);
    int mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        auto density = [&] { return 0.05 + 0.25 * testutil::unit(rng); };
        BinaryMap md = testutil::random_mask(32, 32, density(), rng);
        BinaryMap e = testutil::random_mask(32, 32, density(), rng);
        BinaryMap ism = testutil::random_mask(32, 32, density(), rng);
        BinaryMap weak(32, 32);
        for (size_t i = 0; i < weak.data().size(); ++i)
            weak.data()[i] = !md.data()[i] && e.data()[i] && ism.data()[i];
        if (detect::hysteresis_combine(md, e, ism).data() !=
            oracles::hysteresis_oracle(md, weak).data())
            ++mismatches;
    }
    double secs = seconds_since(t0);
    report(1, "hysteresis oracle equivalence (1000 random 32x32 triples)",
           mismatches == 0 && secs < 10.0,
           std::to_string(mismatches) + " mismatches, " + fmt(secs) + " s");
}

// ---- criterion 2: safe distance equals the brute-force Eq-scan ----

void criterion_safe_distance() {
    std::mt19937 rng(2025);
    refine::RefineParams params;
    int mismatches = 0;

    auto check = [&](const std::vector<Vec2>& profile) {
        FlowField field(static_cast<int>(profile.size()) + 1, 1);
        for (size_t d = 1; d <= profile.size(); ++d)
            field.set(static_cast<int>(d), 0, profile[d - 1]);
        std::vector<Vec2> stored;
        for (int x = 1; x < field.width(); ++x) stored.push_back(field.at(x, 0));
        auto expect = oracles::safe_distance_oracle(stored, params.tau, params.d_max);
        auto got = refine::safe_distance(field, {0, 0}, UnitVec2{1, 0}, params);
        if (got != expect) ++mismatches;
        return got;
    };

    for (int trial = 0; trial < 1000; ++trial) {
        int len = 3 + int(testutil::unit(rng) * 22);
        std::vector<Vec2> profile;
        Vec2 value{10.0 * testutil::unit(rng), 10.0 * testutil::unit(rng)};
        int kind = trial % 5;
        for (int d = 0; d < len; ++d) {
            switch (kind) {
                case 0: break;
                case 1: value = value + Vec2{0.9, -0.2}; break;
                case 2: value = 0.6 * value; break;
                case 3: value = {5.0 * testutil::unit(rng), 5.0 * testutil::unit(rng)}; break;
                default:
                    if (testutil::unit(rng) < 0.4)
                        value = value + Vec2{testutil::unit(rng) - 0.5, testutil::unit(rng) - 0.5};
                    break;
            }
            profile.push_back(value);
        }
        check(profile);
    }

    bool hand = check({{4, 0}, {2, 0}, {1, 0}, {1, 0}, {1, 0}}) == std::optional<int>(3);
    bool constant = check(std::vector<Vec2>(24, Vec2{2, 2})) == std::optional<int>(1);
    report(2, "safe-distance oracle equivalence (1000 profiles + hand cases)",
           mismatches == 0 && hand && constant, std::to_string(mismatches) + " mismatches");
}

// ---- criterion 3: correlation properties ----

void criterion_correlation() {
    std::mt19937 rng(2026);
    bool ok = true;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        ImageBuffer img = testutil::random_image(10, 10, 3, rng);
        Point2 p{1.5 + 6.0 * testutil::unit(rng), 1.5 + 6.0 * testutil::unit(rng)};
        maps::PatchFeature f = maps::patch_feature(img, p);

        maps::PatchFeature neg = f;
        for (auto& v : neg.values) v = -v;
        ok = ok && std::abs(maps::similarity(f, f) - 1.0) < 1e-6;
        ok = ok && std::abs(maps::similarity(f, neg) + 1.0) < 1e-6;

        double a = 0.2 + 0.7 * testutil::unit(rng);
        double b[3] = {(1.0 - a) * testutil::unit(rng), (1.0 - a) * testutil::unit(rng),
                       (1.0 - a) * testutil::unit(rng)};
        ImageBuffer scaled = img;
        for (size_t i = 0; i < scaled.data().size(); ++i)
            scaled.data()[i] = static_cast<float>(a * scaled.data()[i] + b[i % 3]);
        ok = ok && std::abs(maps::similarity(f, maps::patch_feature(scaled, p)) - 1.0) < 1e-6;

        ImageBuffer other = testutil::random_image(10, 10, 3, rng);
        Vec2 v{4.0 * testutil::unit(rng) - 2.0, 4.0 * testutil::unit(rng) - 2.0};
        double cost = maps::matching_cost(img, other, p, v);
        ok = ok && cost >= -1.0 && cost <= 1.0;
    }
    report(3, "correlation properties (self/negation/invariance, costs in [-1,1])", ok, "");
}

// ---- criterion 4: format round trips ----

void criterion_round_trips() {
    std::mt19937 rng(2027);
    auto dir = testutil::temp_dir();
    bool ok = true;

    for (int trial = 0; trial < 100 && ok; ++trial) {
        int w = 1 + int(testutil::unit(rng) * 16);
        int h = 1 + int(testutil::unit(rng) * 16);
        FlowField f(w, h);
        for (auto& v : f.data()) {
            uint32_t bits = rng();
            float c;
            std::memcpy(&c, &bits, 4);
            v = std::isfinite(c) ? c : 0.0f;
        }
        FlowField back = io::decode_flo(io::encode_flo(f));
        ok = ok && std::memcmp(back.data().data(), f.data().data(), 4 * f.data().size()) == 0;
    }

    for (int trial = 0; trial < 10 && ok; ++trial) {
        FlowField f(11, 7);
        for (int y = 0; y < 7; ++y)
            for (int x = 0; x < 11; ++x) {
                if (testutil::unit(rng) < 0.15) {
                    f.set_valid(x, y, false);
                    continue;
                }
                f.set(x, y, {(int(testutil::unit(rng) * 60000) - 30000) / 64.0,
                             (int(testutil::unit(rng) * 60000) - 30000) / 64.0});
            }
        io::write_kitti_flow(f, dir / "k.png");
        FlowField back = io::read_kitti_flow(dir / "k.png");
        for (int y = 0; y < 7; ++y)
            for (int x = 0; x < 11; ++x)
                ok = ok && back.is_valid(x, y) == f.is_valid(x, y) &&
                     back.u(x, y) == f.u(x, y) && back.v(x, y) == f.v(x, y);
    }

    for (int trial = 0; trial < 10 && ok; ++trial) {
        BinaryMap m = testutil::random_mask(32, 32, 0.25, rng);
        io::write_binary_map(m, dir / "m.png");
        ok = ok && io::read_binary_map(dir / "m.png").data() == m.data();
    }
    report(4, "format round trips (.flo bit-exact, KITTI grid identity, binary maps)", ok, "");
}

// ---- criteria 5-7: synthetic scenes ----

struct SceneRun {
    eval::SynthScene scene;
    FlowField flow_bwd;
    pipeline::DetectOutput detect;
};

SceneRun run_scene(uint32_t seed, const pipeline::PipelineParams& params) {
    SceneRun run;
    eval::SynthSceneSpec spec;  // 128x128, 48x48 fg, displacement (8,0), blur 2, band 3
    spec.texture_seed = seed;
    run.scene = eval::synth_scene(spec);
    run.flow_bwd = FlowField(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x)
            run.flow_bwd.set(x, y, -run.scene.est_flow.at(x, y));
    run.detect = pipeline::detect_boundaries(&run.scene.I1, run.scene.I2, run.scene.I3,
                                             &run.flow_bwd, run.scene.est_flow, nullptr, params);
    return run;
}

void criterion_detection(std::vector<SceneRun>& runs) {
    auto t0 = Clock::now();
    pipeline::PipelineParams params;  // sintel defaults
    BinaryMap all_true(128, 128);
    for (auto& v : all_true.data()) v = 1;

    int wins = 0;
    double min_full = 1.0, sum_full = 0, sum_base = 0, sum_pe = 0, sum_pism = 0;
    for (uint32_t seed = 1; seed <= 10; ++seed) {
        runs.push_back(run_scene(seed, params));
        const SceneRun& r = runs.back();
        double full = eval::boundary_f1(r.detect.b_hat, r.scene.gt_mb).f1;
        double base = eval::boundary_f1(r.detect.m_md, r.scene.gt_mb).f1;
        // single-map ablations (qualitative, printed only)
        double plus_e = eval::boundary_f1(
            detect::hysteresis_combine(r.detect.m_md, r.detect.m_e, all_true), r.scene.gt_mb).f1;
        double plus_ism = eval::boundary_f1(
            detect::hysteresis_combine(r.detect.m_md, all_true, r.detect.m_ism), r.scene.gt_mb).f1;
        min_full = std::min(min_full, full);
        sum_full += full;
        sum_base += base;
        sum_pe += plus_e;
        sum_pism += plus_ism;
        wins += full > base;
    }
    double secs = seconds_since(t0);
    std::printf("  mean F1: full %s, baseline %s, +edge-only %s, +ism-only %s\n",
                fmt(sum_full / 10).c_str(), fmt(sum_base / 10).c_str(), fmt(sum_pe / 10).c_str(),
                fmt(sum_pism / 10).c_str());
    report(5, "synthetic detection (full F1 >= 0.70, beats baseline on >= 8/10 seeds)",
           min_full >= 0.70 && wins >= 8 && secs < 60.0,
           "min F1 " + fmt(min_full) + ", wins " + std::to_string(wins) + "/10, " + fmt(secs) +
               " s");
}

void criterion_replacement(const std::vector<SceneRun>& runs) {
    pipeline::PipelineParams params;
    bool all_decrease = true, outside_identical = true, nonempty = true;
    double sum_reduction = 0;
    for (const SceneRun& r : runs) {
        auto assignments = refine::replacement_set(r.scene.est_flow, r.detect.b_hat, r.scene.I2,
                                                   params.refine_params(), params.jobs);
        FlowField refined = refine::refine_flow(r.scene.est_flow, assignments);

        std::set<std::pair<int, int>> targets;
        for (const auto& a : assignments)
            targets.insert({int(std::lround(a.p.x)), int(std::lround(a.p.y))});
        nonempty = nonempty && !targets.empty();

        double init_sum = 0, ref_sum = 0;
        for (auto [x, y] : targets) {
            init_sum += (r.scene.est_flow.at(x, y) - r.scene.gt_flow.at(x, y)).norm();
            ref_sum += (refined.at(x, y) - r.scene.gt_flow.at(x, y)).norm();
        }
        if (!targets.empty()) {
            all_decrease = all_decrease && ref_sum < init_sum;
            sum_reduction += (init_sum - ref_sum) / init_sum * 100.0;
        }

        for (int y = 0; y < refined.height() && outside_identical; ++y)
            for (int x = 0; x < refined.width(); ++x) {
                if (targets.count({x, y})) continue;
                if (refined.u(x, y) != r.scene.est_flow.u(x, y) ||
                    refined.v(x, y) != r.scene.est_flow.v(x, y)) {
                    outside_identical = false;
                    break;
                }
            }
    }
    double mean_reduction = sum_reduction / runs.size();
    report(6,
           "synthetic replacement (AEPE on P drops every seed, mean >= 10%, outside P "
           "untouched)",
           nonempty && all_decrease && mean_reduction >= 10.0 && outside_identical,
           "mean reduction " + fmt(mean_reduction) + "%");
}

void criterion_curve_shapes(const std::vector<SceneRun>& runs) {
    const SceneRun& r = runs.front();
    eval::DistanceCurve curve =
        eval::epe_vs_distance(r.scene.est_flow, r.scene.gt_flow, r.scene.gt_mb, 15);
    bool trend = curve.bins[1].count > 0 && curve.bins[10].count > 0 &&
                 curve.bins[1].mean_epe > curve.bins[10].mean_epe;

    eval::DecompositionCurve dec =
        eval::error_decomposition(r.scene.gt_flow, r.scene.gt_flow, r.scene.gt_mb);
    bool exact = true;
    size_t populated = 0;
    for (const auto& e : dec.entries) {
        if (!e.count) continue;
        ++populated;
        exact = exact && e.e == 0.0 && e.r == e.a;
    }
    report(7, "curve shapes (EPE decays with boundary distance; est=gt decomposition exact)",
           trend && exact && populated > 5,
           "bin1 " + fmt(curve.bins[1].mean_epe) + " vs bin10 " + fmt(curve.bins[10].mean_epe));
}

// ---- criterion 8: manifest determinism across --jobs ----

int run_cli(const std::string& args) {
    std::string cmd = std::string(MBFLOW_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

bool same_bytes(const std::filesystem::path& a, const std::filesystem::path& b) {
    return io::detail::read_file_bytes(a) == io::detail::read_file_bytes(b);
}

void criterion_manifest_determinism() {
    auto dir = testutil::temp_dir();
    std::string sdir = (dir / "scene").string();
    std::string r1 = (dir / "r1").string();
    std::string r2 = (dir / "r2").string();
    bool ok = run_cli("synth --seed 42 --out-dir " + sdir) == 0;
    ok = ok && run_cli("refine --frame1 " + sdir + "/frame1.png --frame2 " + sdir +
                       "/frame2.png --frame3 " + sdir + "/frame3.png --flow-fwd " + sdir +
                       "/est_flow.flo --flow-bwd " + sdir + "/est_flow_bwd.flo --jobs 1" +
                       " --out-dir " + r1) == 0;
    ok = ok && run_cli("refine --config " + r1 + "/manifest.txt --jobs 7 --out-dir " + r2) == 0;
    ok = ok && same_bytes(dir / "r1/refined.flo", dir / "r2/refined.flo");
    ok = ok && same_bytes(dir / "r1/assignments.csv", dir / "r2/assignments.csv");
    ok = ok && same_bytes(dir / "r1/b_hat.png", dir / "r2/b_hat.png");
    report(8, "manifest re-run reproduces outputs bit-exactly at any --jobs", ok, "");
}

// ---- criterion 9: optional data-supplied Sintel reproduction ----

void criterion_sintel() {
    const char* index = std::getenv("MBFLOW_SINTEL_INDEX");
    if (!index) {
        report(9, "data-supplied Sintel-final reproduction", true,
               "skipped (set MBFLOW_SINTEL_INDEX to run; not part of CI)");
        return;
    }
    std::ifstream in(index);
    if (!in) {
        report(9, "data-supplied Sintel-final reproduction", false,
               std::string("cannot open ") + index);
        return;
    }
    pipeline::PipelineParams params;  // sintel profile defaults
    double init_sum = 0, ref_sum = 0;
    size_t points = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string f1p, f2p, f3p, fwd, bwd, gtf, gtmb;
        ss >> f1p >> f2p >> f3p >> fwd >> bwd >> gtf >> gtmb;
        ImageBuffer I1 = io::read_image(f1p), I2 = io::read_image(f2p), I3 = io::read_image(f3p);
        FlowField F23 = io::read_flow(fwd), F21 = io::read_flow(bwd);
        FlowField gt = io::read_flow(gtf);
        auto det = pipeline::detect_boundaries(&I1, I2, I3, &F21, F23, nullptr, params);
        auto assignments =
            refine::replacement_set(F23, det.b_hat, I2, params.refine_params(), params.jobs);
        FlowField refined = refine::refine_flow(F23, assignments);
        std::set<std::pair<int, int>> targets;
        for (const auto& a : assignments)
            targets.insert({int(std::lround(a.p.x)), int(std::lround(a.p.y))});
        for (auto [x, y] : targets) {
            if (!gt.is_valid(x, y)) continue;
            init_sum += (F23.at(x, y) - gt.at(x, y)).norm();
            ref_sum += (refined.at(x, y) - gt.at(x, y)).norm();
            ++points;
        }
    }
    if (points == 0) {
        report(9, "data-supplied Sintel-final reproduction", false, "index yielded no points");
        return;
    }
    double reduction = (init_sum - ref_sum) / init_sum * 100.0;
    report(9, "data-supplied Sintel-final reproduction (17.34% +- 3pp)",
           reduction >= 14.34 && reduction <= 20.34, "reduction " + fmt(reduction) + "%");
}

}  // namespace

int main() {
    criterion_hysteresis();
    criterion_safe_distance();
    criterion_correlation();
    criterion_round_trips();
    std::vector<SceneRun> runs;
    criterion_detection(runs);
    criterion_replacement(runs);
    criterion_curve_shapes(runs);
    criterion_manifest_determinism();
    criterion_sintel();
    if (g_failures) std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures;
}
