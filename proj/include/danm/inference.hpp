#ifndef DANM_INFERENCE_HPP
#define DANM_INFERENCE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "danm/regression.hpp"

namespace danm {

enum class Outcome { XcausesY, YcausesX, BadFit, BothPossible };

std::string outcome_name(Outcome outcome);

struct Verdict {
    Outcome outcome = Outcome::BadFit;
    AnmFit forward;   // fit of y on x
    AnmFit backward;  // fit of x on y
    double alpha = 0.0;
};

// Truth table over the two acceptance flags: accept forward only -> X causes
// Y; accept backward only -> Y causes X; reject both -> bad fit; accept both
// -> both directions possible.
Verdict decide(AnmFit forward, AnmFit backward, double alpha);

// The backward fit's seed is the forward seed XOR this constant, which makes
// the two fits independent yet reproducible, and makes swapping the sample
// equivalent to swapping the seeds.
inline constexpr std::uint64_t kBackwardSeedXor = 0x9e3779b97f4a7c15ull;

// Fits both orientations (each fit's codomain is the effect variable's
// declared domain) and applies the decision rule.
Verdict infer_direction(const PairedSample& sample, const RegressionConfig& config);

struct CurvePoint {
    std::size_t n = 0;
    double p_forward = 0.0;
    double p_backward = 0.0;
};

// Runs infer_direction on growing prefixes of the sample (original row
// order) and records both p-values per grid size.
std::vector<CurvePoint> pvalue_curve(const PairedSample& sample, const std::vector<std::size_t>& grid,
                                     const RegressionConfig& config);

}  // namespace danm

#endif
