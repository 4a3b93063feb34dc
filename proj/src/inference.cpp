#include "danm/inference.hpp"

#include "danm/errors.hpp"

namespace danm {

std::string outcome_name(Outcome outcome) {
    switch (outcome) {
        case Outcome::XcausesY: return "x_causes_y";
        case Outcome::YcausesX: return "y_causes_x";
        case Outcome::BadFit: return "bad_fit";
        case Outcome::BothPossible: return "both_possible";
    }
    return "unknown";
}

Verdict decide(AnmFit forward, AnmFit backward, double alpha) {
    Verdict v;
    if (forward.accepted && !backward.accepted) {
        v.outcome = Outcome::XcausesY;
    } else if (!forward.accepted && backward.accepted) {
        v.outcome = Outcome::YcausesX;
    } else if (!forward.accepted && !backward.accepted) {
        v.outcome = Outcome::BadFit;
    } else {
        v.outcome = Outcome::BothPossible;
    }
    v.forward = std::move(forward);
    v.backward = std::move(backward);
    v.alpha = alpha;
    return v;
}

Verdict infer_direction(const PairedSample& sample, const RegressionConfig& config) {
    RegressionConfig forward_cfg = config;
    RegressionConfig backward_cfg = config;
    backward_cfg.seed = config.seed ^ kBackwardSeedXor;

    AnmFit forward = fit_anm(sample, forward_cfg);
    AnmFit backward = fit_anm(sample.swapped(), backward_cfg);
    return decide(std::move(forward), std::move(backward), config.alpha);
}

std::vector<CurvePoint> pvalue_curve(const PairedSample& sample,
                                     const std::vector<std::size_t>& grid,
                                     const RegressionConfig& config) {
    std::vector<CurvePoint> out;
    out.reserve(grid.size());
    std::size_t prev = 0;
    for (std::size_t n : grid) {
        if (n < prev) throw DataError("curve grid must be non-decreasing");
        if (n == 0 || n > sample.size()) throw DataError("curve grid value exceeds sample size");
        prev = n;
        const Verdict v = infer_direction(sample.prefix(n), config);
        out.push_back(CurvePoint{n, v.forward.p_value, v.backward.p_value});
    }
    return out;
}

}  // namespace danm
