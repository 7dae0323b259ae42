#pragma once

// All scalar hyper-parameters of the pipeline in one place, plus the two
// dataset profiles. Flags override profile values, profiles override the
// built-in defaults.

#include <stdexcept>
#include <string>

#include "mbflow/maps/ism.hpp"
#include "mbflow/refine/replace.hpp"

namespace mbflow::pipeline {

// invalid command-line usage (missing/ill-ranged options); the CLI maps
// this to exit code 2, data/format problems map to 3
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct PipelineParams {
    double sigma = 5.0;       // side-point offset for the ism map, pixels
    double theta_md = 1.0;    // flow-gradient threshold (1 sintel, 3 kitti)
    double theta_ism = 0.2;   // cost-asymmetry threshold (0.2 sintel, 0.6 kitti)
    double tau = 0.2;         // safe-distance saturation threshold
    double alpha = 0.2;       // cross-boundary difference factor
    int d_max = 20;           // safe-distance scan cap, pixels
    double grad_eps = 1e-6;   // minimum usable gradient magnitude
    double edge_low = 0.05;   // built-in edge detector hysteresis thresholds
    double edge_high = 0.15;
    unsigned jobs = 0;        // 0 = all hardware threads

    maps::IsmParams ism_params() const { return {sigma, theta_ism, grad_eps}; }
    refine::RefineParams refine_params() const { return {tau, alpha, d_max, grad_eps}; }

    void validate() const {
        if (!(sigma > 0)) throw UsageError("--sigma must be > 0");
        if (!(theta_md > 0)) throw UsageError("--theta-md must be > 0");
        if (!(theta_ism > 0)) throw UsageError("--theta-ism must be > 0");
        if (!(tau > 0 && tau < 1)) throw UsageError("--tau must be in (0,1)");
        if (!(alpha >= 0)) throw UsageError("--alpha must be >= 0");
        if (d_max < 2) throw UsageError("--d-max must be >= 2");
        if (!(grad_eps >= 0)) throw UsageError("--grad-eps must be >= 0");
        if (!(edge_low >= 0 && edge_high >= edge_low))
            throw UsageError("edge thresholds must satisfy 0 <= --edge-low <= --edge-high");
    }
};

// Applies a dataset profile; returns false for unknown names.
inline bool apply_profile(PipelineParams& p, const std::string& name) {
    if (name == "sintel") {
        p.theta_md = 1.0;
        p.theta_ism = 0.2;
        return true;
    }
    if (name == "kitti") {
        p.theta_md = 3.0;
        p.theta_ism = 0.6;
        return true;
    }
    return false;
}

}  // namespace mbflow::pipeline
