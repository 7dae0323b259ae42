#pragma once

// Subcommand implementations behind the CLI: load inputs, run the pipeline,
// write artifacts + manifest. Kept out of the CLI binary so tests can drive
// the exact same code paths.

#include <filesystem>
#include <iostream>
#include <optional>
#include <set>

#include "mbflow/detect/hysteresis.hpp"
#include "mbflow/eval/curves.hpp"
#include "mbflow/eval/metrics.hpp"
#include "mbflow/eval/synth.hpp"
#include "mbflow/io/csv.hpp"
#include "mbflow/io/flow_format.hpp"
#include "mbflow/io/image_io.hpp"
#include "mbflow/maps/edge.hpp"
#include "mbflow/maps/ism.hpp"
#include "mbflow/maps/motion_discrepancy.hpp"
#include "mbflow/pipeline/manifest.hpp"
#include "mbflow/pipeline/params.hpp"
#include "mbflow/refine/replace.hpp"

namespace mbflow::pipeline {

namespace fs = std::filesystem;

namespace detail {

inline void ensure_out_dir(const std::string& out_dir) {
    if (out_dir.empty()) throw UsageError("--out-dir is required");
    fs::create_directories(out_dir);
}

inline void require(bool ok, const std::string& flag, const std::string& why) {
    if (!ok) throw UsageError("--" + flag + " is required " + why);
}

}  // namespace detail

struct DetectArgs {
    std::string frame1, frame2, frame3;
    std::string flow_fwd, flow_bwd;
    std::string edge_map;  // external edge map; empty = built-in detector
    std::string gt_mb;     // optional: report boundary F1 against this
    std::string flow_format = "auto";
    std::string out_dir;
    PipelineParams params;
    std::string profile;  // informational, already folded into params
};

struct DetectOutput {
    BinaryMap m_e, m_md, m_ism, b_hat;
};

// In-memory detection pipeline shared by detect and refine.
inline DetectOutput detect_boundaries(const ImageBuffer* I1, const ImageBuffer& I2,
                                      const ImageBuffer& I3, const FlowField* F21,
                                      const FlowField& F23, const ImageBuffer* external_edge,
                                      const PipelineParams& p) {
    DetectOutput out;
    if (external_edge) {
        require_same_size(I2, *external_edge, "external edge map");
        out.m_e = maps::external_edge_map(*external_edge);
    } else {
        out.m_e = maps::edge_map(I2, p.edge_low, p.edge_high);
    }
    out.m_md = maps::motion_discrepancy_map(F23, p.theta_md);

    BinaryMap candidates(I2.width(), I2.height());
    for (size_t i = 0; i < candidates.data().size(); ++i)
        candidates.data()[i] = out.m_e.data()[i] | out.m_md.data()[i];
    out.m_ism = maps::ism_map(I1, I2, I3, F21, F23, candidates, p.ism_params(), p.jobs);
    out.b_hat = detect::hysteresis_combine(out.m_md, out.m_e, out.m_ism);
    return out;
}

namespace detail {

struct LoadedSequence {
    std::optional<ImageBuffer> I1, I2, I3, edge;
    std::optional<FlowField> F21, F23;
};

inline LoadedSequence load_sequence(const std::string& frame1, const std::string& frame2,
                                    const std::string& frame3, const std::string& flow_fwd,
                                    const std::string& flow_bwd, const std::string& edge_map,
                                    const std::string& flow_format, bool will_detect) {
    LoadedSequence seq;
    auto fmt = io::parse_flow_format(flow_format);
    if (!frame2.empty()) seq.I2 = io::read_image(frame2);
    if (!frame3.empty()) seq.I3 = io::read_image(frame3);
    if (!flow_fwd.empty()) seq.F23 = io::read_flow(flow_fwd, fmt);
    bool backward = !frame1.empty() && !flow_bwd.empty();
    if (will_detect) {
        if (!frame1.empty() != !flow_bwd.empty())
            std::cerr << "warning: backward motion needs both --frame1 and --flow-bwd; "
                         "dropping the backward term\n";
        else if (!backward)
            std::cerr << "warning: no --frame1/--flow-bwd given; "
                         "matching costs use the forward term only\n";
    }
    if (backward) {
        seq.I1 = io::read_image(frame1);
        seq.F21 = io::read_flow(flow_bwd, fmt);
    }
    if (!edge_map.empty()) seq.edge = io::read_image(edge_map);

    if (seq.I2 && seq.I3) require_same_size(*seq.I2, *seq.I3, "frame2 vs frame3");
    if (seq.I2 && seq.F23) require_same_size(*seq.I2, *seq.F23, "frame2 vs flow-fwd");
    if (seq.I2 && seq.I1) require_same_size(*seq.I2, *seq.I1, "frame2 vs frame1");
    if (seq.I2 && seq.F21) require_same_size(*seq.I2, *seq.F21, "frame2 vs flow-bwd");
    return seq;
}

inline void add_common_params(Manifest& m, const DetectArgs& a) {
    if (!a.profile.empty()) m.set("profile", a.profile);
    m.set("sigma", a.params.sigma);
    m.set("theta-md", a.params.theta_md);
    m.set("theta-ism", a.params.theta_ism);
    m.set("tau", a.params.tau);
    m.set("alpha", a.params.alpha);
    m.set("d-max", a.params.d_max);
    m.set("grad-eps", a.params.grad_eps);
    m.set("edge-low", a.params.edge_low);
    m.set("edge-high", a.params.edge_high);
    m.set("jobs", a.params.jobs);
    m.set("flow-format", a.flow_format);
    m.set("out-dir", a.out_dir);
}

}  // namespace detail

inline int run_detect(const DetectArgs& args) {
    args.params.validate();
    detail::require(!args.frame2.empty(), "frame2", "(reference frame)");
    detail::require(!args.frame3.empty(), "frame3", "(target frame)");
    detail::require(!args.flow_fwd.empty(), "flow-fwd", "(forward flow estimate)");
    detail::ensure_out_dir(args.out_dir);

    auto seq = detail::load_sequence(args.frame1, args.frame2, args.frame3, args.flow_fwd,
                                     args.flow_bwd, args.edge_map, args.flow_format, true);
    DetectOutput out = detect_boundaries(seq.I1 ? &*seq.I1 : nullptr, *seq.I2, *seq.I3,
                                         seq.F21 ? &*seq.F21 : nullptr, *seq.F23,
                                         seq.edge ? &*seq.edge : nullptr, args.params);

    fs::path dir(args.out_dir);
    io::write_binary_map(out.b_hat, dir / "b_hat.png");
    io::write_binary_map(out.m_e, dir / "m_e.png");
    io::write_binary_map(out.m_md, dir / "m_md.png");
    io::write_binary_map(out.m_ism, dir / "m_ism.png");

    std::cout << "detect: " << out.b_hat.count() << " boundary pixels (m_md "
              << out.m_md.count() << ", m_e " << out.m_e.count() << ", m_ism "
              << out.m_ism.count() << ")\n";

    if (!args.gt_mb.empty()) {
        BinaryMap gt = io::read_binary_map(args.gt_mb);
        require_same_size(out.b_hat, gt, "prediction vs gt-mb");
        eval::PRStats s = eval::boundary_f1(out.b_hat, gt);
        io::write_csv(dir / "detect_metrics.csv",
                      {"tp", "fp", "fn", "precision", "recall", "f1"},
                      {{static_cast<double>(s.tp), static_cast<double>(s.fp),
                        static_cast<double>(s.fn), s.precision, s.recall, s.f1}});
        std::cout << "detect: F1 " << s.f1 << " (precision " << s.precision << ", recall "
                  << s.recall << ")\n";
    }

    Manifest m("detect");
    m.set_input("frame2", args.frame2);
    m.set_input("frame3", args.frame3);
    m.set_input("flow-fwd", args.flow_fwd);
    if (seq.I1) {
        m.set_input("frame1", args.frame1);
        m.set_input("flow-bwd", args.flow_bwd);
    }
    if (!args.edge_map.empty()) m.set_input("edge-map", args.edge_map);
    if (!args.gt_mb.empty()) m.set_input("gt-mb", args.gt_mb);
    detail::add_common_params(m, args);
    m.write(dir / "manifest.txt");
    return 0;
}

struct RefineArgs {
    DetectArgs detect;           // shared inputs/params; frame3 optional here
    std::string boundaries;      // precomputed boundary map; empty = detect internally
};

inline int run_refine(const RefineArgs& args) {
    const DetectArgs& d = args.detect;
    d.params.validate();
    detail::require(!d.frame2.empty(), "frame2", "(normals come from this frame)");
    detail::require(!d.flow_fwd.empty(), "flow-fwd", "(flow to refine)");
    if (args.boundaries.empty())
        detail::require(!d.frame3.empty(), "frame3",
                        "when --boundaries is not given (internal detection)");
    detail::ensure_out_dir(d.out_dir);
    fs::path dir(d.out_dir);

    auto seq = detail::load_sequence(d.frame1, d.frame2, d.frame3, d.flow_fwd, d.flow_bwd,
                                     d.edge_map, d.flow_format, args.boundaries.empty());
    BinaryMap boundaries;
    if (!args.boundaries.empty()) {
        boundaries = io::read_binary_map(args.boundaries);
        require_same_size(*seq.I2, boundaries, "frame2 vs boundaries");
    } else {
        DetectOutput out = detect_boundaries(seq.I1 ? &*seq.I1 : nullptr, *seq.I2, *seq.I3,
                                             seq.F21 ? &*seq.F21 : nullptr, *seq.F23,
                                             seq.edge ? &*seq.edge : nullptr, d.params);
        boundaries = out.b_hat;
        io::write_binary_map(boundaries, dir / "b_hat.png");
    }

    auto assignments =
        refine::replacement_set(*seq.F23, boundaries, *seq.I2, d.params.refine_params(),
                                d.params.jobs);
    FlowField refined = refine::refine_flow(*seq.F23, assignments);

    io::write_flo(refined, dir / "refined.flo");
    std::vector<std::vector<double>> rows;
    rows.reserve(assignments.size());
    for (const auto& a : assignments) {
        double dist = (a.p - a.b).norm();
        rows.push_back({a.b.x, a.b.y, a.u.x, a.u.y, static_cast<double>(a.d_star),
                        std::round(dist), a.p.x, a.p.y, a.q.x, a.q.y, a.replacement_flow.x,
                        a.replacement_flow.y});
    }
    io::write_csv(dir / "assignments.csv",
                  {"bx", "by", "ux", "uy", "d_star", "d", "px", "py", "qx", "qy", "flow_u",
                   "flow_v"},
                  rows);

    std::set<std::pair<int, int>> targets;
    for (const auto& a : assignments)
        targets.insert({static_cast<int>(std::lround(a.p.x)),
                        static_cast<int>(std::lround(a.p.y))});
    std::cout << "refine: " << boundaries.count() << " boundary pixels, " << assignments.size()
              << " assignments, " << targets.size() << " replaced pixels\n";

    Manifest m("refine");
    m.set_input("frame2", d.frame2);
    m.set_input("flow-fwd", d.flow_fwd);
    if (!d.frame3.empty()) m.set_input("frame3", d.frame3);
    if (seq.I1) {
        m.set_input("frame1", d.frame1);
        m.set_input("flow-bwd", d.flow_bwd);
    }
    if (!d.edge_map.empty()) m.set_input("edge-map", d.edge_map);
    if (!args.boundaries.empty()) m.set_input("boundaries", args.boundaries);
    detail::add_common_params(m, d);
    m.write(dir / "manifest.txt");
    return 0;
}

struct EvalArgs {
    std::string pred_mb, gt_mb;
    std::string flow, refined_flow, gt_flow;
    std::string assignments;
    std::string flow_format = "auto";
    std::string out_dir;
    std::vector<std::string> which;  // subset of {mb, flow, curves, scatter}; empty = deduce
    int max_dist = 60;
    int c_max = 20;
    double sigma = 5.0;
    double rel_tol = 0.0075;
    unsigned jobs = 0;
};

namespace detail {

inline void eval_replaced_points(const EvalArgs& args, const FlowField& flow,
                                 const FlowField& gt, const fs::path& dir) {
    io::CsvTable table = io::read_csv(args.assignments);
    int px = table.column("px"), py = table.column("py");
    if (px < 0 || py < 0)
        throw FormatError("assignments CSV lacks px/py columns: " + args.assignments);
    FlowField refined = io::read_flow(args.refined_flow, io::parse_flow_format(args.flow_format));
    require_same_size(flow, refined, "flow vs refined-flow");

    std::set<std::pair<int, int>> targets;
    for (const auto& row : table.rows)
        targets.insert({static_cast<int>(std::lround(row[px])),
                        static_cast<int>(std::lround(row[py]))});
    double init_sum = 0.0, ref_sum = 0.0;
    size_t n = 0;
    for (auto [x, y] : targets) {
        if (x < 0 || y < 0 || x >= gt.width() || y >= gt.height()) continue;
        if (!gt.is_valid(x, y)) continue;
        init_sum += (flow.at(x, y) - gt.at(x, y)).norm();
        ref_sum += (refined.at(x, y) - gt.at(x, y)).norm();
        ++n;
    }
    double init_aepe = n ? init_sum / n : 0.0;
    double ref_aepe = n ? ref_sum / n : 0.0;
    double reduction = init_aepe > 0.0 ? (init_aepe - ref_aepe) / init_aepe * 100.0 : 0.0;
    io::write_csv(dir / "eval_replaced.csv",
                  {"replaced_pixels", "init_aepe", "our_aepe", "reduction_pct"},
                  {{static_cast<double>(n), init_aepe, ref_aepe, reduction}});
    std::cout << "eval: replaced points " << n << ", init AEPE " << init_aepe << ", our AEPE "
              << ref_aepe << " (" << reduction << "% reduction)\n";
}

}  // namespace detail

inline int run_eval(const EvalArgs& args) {
    if (args.max_dist < 0) throw UsageError("--max-dist must be >= 0");
    if (args.c_max < 0) throw UsageError("--c-max must be >= 0");
    if (!(args.sigma > 0)) throw UsageError("--sigma must be > 0");
    if (!(args.rel_tol >= 0)) throw UsageError("--rel-tol must be >= 0");
    detail::ensure_out_dir(args.out_dir);
    fs::path dir(args.out_dir);
    auto fmt = io::parse_flow_format(args.flow_format);

    std::set<std::string> which(args.which.begin(), args.which.end());
    for (const auto& w : which)
        if (w != "mb" && w != "flow" && w != "curves" && w != "scatter")
            throw UsageError("--which accepts mb, flow, curves, scatter (got '" + w + "')");
    const bool deduce = which.empty();
    if (deduce) {
        if (!args.pred_mb.empty() && !args.gt_mb.empty()) which.insert("mb");
        if (!args.flow.empty() && !args.gt_flow.empty()) which.insert("flow");
        if (!args.flow.empty() && !args.gt_flow.empty() && !args.gt_mb.empty()) {
            which.insert("curves");
            which.insert("scatter");
        }
        if (which.empty())
            throw UsageError("no evaluation selected: supply --which or the inputs of at least "
                             "one mode (see --help)");
    }

    Manifest m("eval");
    for (const auto& w : which) m.set("which", w);

    if (which.count("mb")) {
        detail::require(!args.pred_mb.empty(), "pred-mb", "for --which mb");
        detail::require(!args.gt_mb.empty(), "gt-mb", "for --which mb");
        BinaryMap pred = io::read_binary_map(args.pred_mb);
        BinaryMap gt = io::read_binary_map(args.gt_mb);
        eval::PRStats s = eval::boundary_f1(pred, gt, args.rel_tol);
        io::write_csv(dir / "eval_mb.csv", {"tp", "fp", "fn", "precision", "recall", "f1"},
                      {{static_cast<double>(s.tp), static_cast<double>(s.fp),
                        static_cast<double>(s.fn), s.precision, s.recall, s.f1}});
        std::cout << "eval: boundary F1 " << s.f1 << " (precision " << s.precision
                  << ", recall " << s.recall << ")\n";
    }

    std::optional<FlowField> flow, gt_flow;
    if (!args.flow.empty()) flow = io::read_flow(args.flow, fmt);
    if (!args.gt_flow.empty()) gt_flow = io::read_flow(args.gt_flow, fmt);

    if (which.count("flow")) {
        detail::require(!args.flow.empty(), "flow", "for --which flow");
        detail::require(!args.gt_flow.empty(), "gt-flow", "for --which flow");
        require_same_size(*flow, *gt_flow, "flow vs gt-flow");
        double aepe = eval::epe(*flow, *gt_flow);
        io::write_csv(dir / "eval_flow.csv", {"aepe"}, {{aepe}});
        std::cout << "eval: AEPE " << aepe << "\n";
        if (!args.assignments.empty() && !args.refined_flow.empty())
            detail::eval_replaced_points(args, *flow, *gt_flow, dir);
    }

    std::optional<BinaryMap> gt_mb;
    if ((which.count("curves") || which.count("scatter"))) {
        detail::require(!args.flow.empty(), "flow", "for curves/scatter");
        detail::require(!args.gt_flow.empty(), "gt-flow", "for curves/scatter");
        detail::require(!args.gt_mb.empty(), "gt-mb", "for curves/scatter");
        gt_mb = io::read_binary_map(args.gt_mb);
        require_same_size(*flow, *gt_mb, "flow vs gt-mb");
    }

    if (which.count("curves")) {
        eval::DistanceCurve dc = eval::epe_vs_distance(*flow, *gt_flow, *gt_mb, args.max_dist);
        std::vector<std::vector<double>> rows;
        for (const auto& b : dc.bins)
            rows.push_back({static_cast<double>(b.distance), b.mean_epe,
                            static_cast<double>(b.count)});
        io::write_csv(dir / "curve_epe_vs_distance.csv", {"distance", "mean_epe", "count"}, rows);

        eval::DecompositionCurve ec =
            eval::error_decomposition(*flow, *gt_flow, *gt_mb, args.c_max);
        rows.clear();
        for (const auto& e : ec.entries)
            rows.push_back({static_cast<double>(e.c), e.e, e.a, e.r,
                            static_cast<double>(e.count)});
        io::write_csv(dir / "curve_error_decomposition.csv", {"c", "e", "a", "r", "count"}, rows);
        std::cout << "eval: wrote distance and decomposition curves\n";
    }

    if (which.count("scatter")) {
        auto pairs = eval::side_epe_pairs(*flow, *gt_flow, *gt_mb, args.sigma);
        std::vector<std::vector<double>> rows;
        rows.reserve(pairs.size());
        for (auto [small, large] : pairs) rows.push_back({small, large});
        io::write_csv(dir / "scatter_side_epe.csv", {"epe_small", "epe_large"}, rows);
        std::cout << "eval: wrote " << rows.size() << " side-EPE pairs\n";
    }

    if (!args.pred_mb.empty()) m.set_input("pred-mb", args.pred_mb);
    if (!args.gt_mb.empty()) m.set_input("gt-mb", args.gt_mb);
    if (!args.flow.empty()) m.set_input("flow", args.flow);
    if (!args.refined_flow.empty()) m.set_input("refined-flow", args.refined_flow);
    if (!args.gt_flow.empty()) m.set_input("gt-flow", args.gt_flow);
    if (!args.assignments.empty()) m.set_input("assignments", args.assignments);
    m.set("flow-format", args.flow_format);
    m.set("max-dist", args.max_dist);
    m.set("c-max", args.c_max);
    m.set("sigma", args.sigma);
    m.set("rel-tol", args.rel_tol);
    m.set("out-dir", args.out_dir);
    m.write(dir / "manifest.txt");
    return 0;
}

struct SynthArgs {
    eval::SynthSceneSpec spec;
    std::string out_dir;
};

inline int run_synth(const SynthArgs& args) {
    detail::ensure_out_dir(args.out_dir);
    fs::path dir(args.out_dir);
    eval::SynthScene scene = eval::synth_scene(args.spec);
    io::write_image(scene.I1, dir / "frame1.png");
    io::write_image(scene.I2, dir / "frame2.png");
    io::write_image(scene.I3, dir / "frame3.png");
    io::write_flo(scene.gt_flow, dir / "gt_flow.flo");
    io::write_flo(scene.est_flow, dir / "est_flow.flo");
    io::write_binary_map(scene.gt_mb, dir / "gt_mb.png");

    // the backward estimate of a symmetric three-frame scene is the negated
    // forward estimate; written out so detect/refine can use the backward term
    FlowField bwd(scene.est_flow.width(), scene.est_flow.height());
    for (int y = 0; y < bwd.height(); ++y)
        for (int x = 0; x < bwd.width(); ++x) bwd.set(x, y, -scene.est_flow.at(x, y));
    io::write_flo(bwd, dir / "est_flow_bwd.flo");

    std::cout << "synth: wrote " << args.spec.width << "x" << args.spec.height
              << " scene (seed " << args.spec.texture_seed << ") to " << args.out_dir << "\n";

    Manifest m("synth");
    m.set("width", args.spec.width);
    m.set("height", args.spec.height);
    m.set("fg-x", args.spec.fg_x);
    m.set("fg-y", args.spec.fg_y);
    m.set("fg-w", args.spec.fg_w);
    m.set("fg-h", args.spec.fg_h);
    m.set("dx", args.spec.dx);
    m.set("dy", args.spec.dy);
    m.set("seed", static_cast<unsigned>(args.spec.texture_seed));
    m.set("blur-sigma", args.spec.estimate_blur_sigma);
    m.set("corruption-band", args.spec.corruption_band);
    m.set("out-dir", args.out_dir);
    m.write(dir / "manifest.txt");
    return 0;
}

}  // namespace mbflow::pipeline
