// mbflow command-line front end.
//
// Subcommands: detect, refine, eval, synth, curves. Every run writes a
// manifest into --out-dir; re-running `mbflow <cmd> --config <manifest>`
// reproduces the outputs bit-exactly (command-line flags override config
// values). Exit codes: 0 success, 2 usage error, 3 data/format error.

#include <iostream>

#include <CLI11.hpp>

#include "mbflow/pipeline/runner.hpp"

namespace {

using mbflow::pipeline::DetectArgs;
using mbflow::pipeline::EvalArgs;
using mbflow::pipeline::PipelineParams;
using mbflow::pipeline::RefineArgs;
using mbflow::pipeline::SynthArgs;

void add_param_options(CLI::App* cmd, DetectArgs& args) {
    cmd->add_option("--profile", args.profile, "parameter profile: sintel or kitti")
        ->check(CLI::IsMember({"sintel", "kitti"}));
    cmd->add_option("--sigma", args.params.sigma, "side-point offset in pixels");
    cmd->add_option("--theta-md", args.params.theta_md, "flow-gradient threshold");
    cmd->add_option("--theta-ism", args.params.theta_ism, "cost-asymmetry threshold");
    cmd->add_option("--tau", args.params.tau, "safe-distance saturation threshold");
    cmd->add_option("--alpha", args.params.alpha, "cross-boundary difference factor");
    cmd->add_option("--d-max", args.params.d_max, "safe-distance scan cap in pixels");
    cmd->add_option("--grad-eps", args.params.grad_eps, "minimum usable gradient magnitude");
    cmd->add_option("--edge-low", args.params.edge_low, "edge detector low threshold");
    cmd->add_option("--edge-high", args.params.edge_high, "edge detector high threshold");
    cmd->add_option("--jobs", args.params.jobs, "worker threads (0 = all hardware threads)");
    cmd->add_option("--flow-format", args.flow_format, "flow file format")
        ->check(CLI::IsMember({"auto", "flo", "kitti"}));
}

// profile supplies theta defaults, explicit flags (or config values) win
void finalize_params(CLI::App* cmd, DetectArgs& args) {
    if (args.profile.empty()) return;
    PipelineParams prof;
    mbflow::pipeline::apply_profile(prof, args.profile);
    if (!cmd->count("--theta-md")) args.params.theta_md = prof.theta_md;
    if (!cmd->count("--theta-ism")) args.params.theta_ism = prof.theta_ism;
}

void add_sequence_options(CLI::App* cmd, DetectArgs& args, bool frame3_required) {
    cmd->add_option("--frame1", args.frame1, "previous frame (enables the backward term)");
    auto* f2 = cmd->add_option("--frame2", args.frame2, "reference frame")->required();
    auto* f3 = cmd->add_option("--frame3", args.frame3, "target frame");
    if (frame3_required) f3->required();
    (void)f2;
    cmd->add_option("--flow-fwd", args.flow_fwd, "forward flow estimate (frame2 -> frame3)")
        ->required();
    cmd->add_option("--flow-bwd", args.flow_bwd, "backward flow estimate (frame2 -> frame1)");
    cmd->add_option("--edge-map", args.edge_map,
                    "external grayscale edge map (skips the built-in detector)");
    cmd->add_option("--out-dir", args.out_dir, "output directory")->required();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"motion-boundary detection and optical-flow refinement"};
    app.require_subcommand(1);
    app.fallthrough();  // lets --config appear after the subcommand name
    app.set_config("--config", "", "config file / run manifest (key = value, [subcommand] section)");

    DetectArgs detect_args;
    auto* detect = app.add_subcommand("detect", "detect motion boundaries from flow + frames");
    add_sequence_options(detect, detect_args, /*frame3_required=*/true);
    detect->add_option("--gt-mb", detect_args.gt_mb,
                       "ground-truth boundary map (reports F1 when given)");
    add_param_options(detect, detect_args);

    RefineArgs refine_args;
    auto* refine = app.add_subcommand("refine", "refine flow near detected boundaries");
    add_sequence_options(refine, refine_args.detect, /*frame3_required=*/false);
    refine->add_option("--boundaries", refine_args.boundaries,
                       "precomputed boundary map (skips internal detection)");
    add_param_options(refine, refine_args.detect);

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "evaluate boundaries, flow and analysis curves");
    eval->add_option("--pred-mb", eval_args.pred_mb, "predicted boundary map");
    eval->add_option("--gt-mb", eval_args.gt_mb, "ground-truth boundary map");
    eval->add_option("--flow", eval_args.flow, "flow estimate under evaluation");
    eval->add_option("--refined-flow", eval_args.refined_flow, "refined flow (replaced-point report)");
    eval->add_option("--gt-flow", eval_args.gt_flow, "ground-truth flow");
    eval->add_option("--assignments", eval_args.assignments, "assignments CSV from refine");
    eval->add_option("--which", eval_args.which, "modes to run: mb flow curves scatter");
    eval->add_option("--max-dist", eval_args.max_dist, "distance-curve bin cap");
    eval->add_option("--c-max", eval_args.c_max, "decomposition offset cap");
    eval->add_option("--sigma", eval_args.sigma, "side-point offset for the scatter");
    eval->add_option("--rel-tol", eval_args.rel_tol, "F1 tolerance, fraction of the diagonal");
    eval->add_option("--flow-format", eval_args.flow_format, "flow file format")
        ->check(CLI::IsMember({"auto", "flo", "kitti"}));
    eval->add_option("--out-dir", eval_args.out_dir, "output directory")->required();

    auto* curves = app.add_subcommand("curves", "shorthand for eval --which curves scatter");
    EvalArgs curves_args;
    curves->add_option("--flow", curves_args.flow, "flow estimate under evaluation")->required();
    curves->add_option("--gt-flow", curves_args.gt_flow, "ground-truth flow")->required();
    curves->add_option("--gt-mb", curves_args.gt_mb, "ground-truth boundary map")->required();
    curves->add_option("--max-dist", curves_args.max_dist, "distance-curve bin cap");
    curves->add_option("--c-max", curves_args.c_max, "decomposition offset cap");
    curves->add_option("--sigma", curves_args.sigma, "side-point offset for the scatter");
    curves->add_option("--flow-format", curves_args.flow_format, "flow file format")
        ->check(CLI::IsMember({"auto", "flo", "kitti"}));
    curves->add_option("--out-dir", curves_args.out_dir, "output directory")->required();

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate a synthetic scene with ground truth");
    synth->add_option("--width", synth_args.spec.width, "frame width");
    synth->add_option("--height", synth_args.spec.height, "frame height");
    synth->add_option("--fg-x", synth_args.spec.fg_x, "foreground rectangle x");
    synth->add_option("--fg-y", synth_args.spec.fg_y, "foreground rectangle y");
    synth->add_option("--fg-w", synth_args.spec.fg_w, "foreground rectangle width");
    synth->add_option("--fg-h", synth_args.spec.fg_h, "foreground rectangle height");
    synth->add_option("--dx", synth_args.spec.dx, "foreground displacement x, pixels/frame");
    synth->add_option("--dy", synth_args.spec.dy, "foreground displacement y, pixels/frame");
    synth->add_option("--seed", synth_args.spec.texture_seed, "texture seed");
    synth->add_option("--blur-sigma", synth_args.spec.estimate_blur_sigma,
                      "estimate oversmoothing sigma");
    synth->add_option("--corruption-band", synth_args.spec.corruption_band,
                      "one-sided corruption band width, pixels");
    synth->add_option("--out-dir", synth_args.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*detect) {
            finalize_params(detect, detect_args);
            return mbflow::pipeline::run_detect(detect_args);
        }
        if (*refine) {
            finalize_params(refine, refine_args.detect);
            return mbflow::pipeline::run_refine(refine_args);
        }
        if (*eval) return mbflow::pipeline::run_eval(eval_args);
        if (*curves) {
            curves_args.which = {"curves", "scatter"};
            return mbflow::pipeline::run_eval(curves_args);
        }
        if (*synth) return mbflow::pipeline::run_synth(synth_args);
    } catch (const mbflow::pipeline::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
