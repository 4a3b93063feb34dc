#ifndef DANM_REGRESSION_HPP
#define DANM_REGRESSION_HPP

#include <cstdint>
#include <vector>

#include "danm/domain.hpp"
#include "danm/stats.hpp"

namespace danm {

struct RegressionConfig {
    int max_sweeps = 10;     // J; the paper leaves it open
    double alpha = 0.05;
    int top_k = 0;           // 0 = score the full candidate range; k >= 1 = top-k acceleration
    double p_min = 1e-12;
    int n_perm = 10000;
    std::uint64_t seed = 0;

    TestConfig test_config() const { return TestConfig{p_min, n_perm, seed}; }
};

// A fitted direction: regression function, residuals, canonical noise pmf,
// and the independence evidence. dm_evaluations counts every candidate
// function whose dependence score was computed (the incumbent's score is
// carried over between coordinates rather than re-scored).
struct AnmFit {
    FunctionTable f;
    std::vector<int> residuals;
    Pmf noise_pmf;
    double p_value = 0.0;
    TestMethod method = TestMethod::ChiSquare;
    long long dm_evaluations = 0;
    int sweeps_used = 0;
    bool accepted = false;
    std::vector<DependenceScore> score_trace;  // score after each accepted update
};

// f(x) = argmax_y P(x, y); ties resolved to the largest y.
FunctionTable init_function(const JointPmf& joint);

// Candidate function values at x: the full integer range [min Y, max Y]
// observed (all of [0, m) for a cyclic codomain), or with top_k >= 1 the k
// values of largest joint mass at x, ties to the larger y, filled from the
// range when fewer than k values were observed. Returned sorted ascending.
std::vector<int> candidate_values(const JointPmf& joint, int x, const RegressionConfig& config);

// Discrete regression by dependence minimization: starting from
// init_function, sweeps the distinct x values in seeded random order, moving
// each f(x) to the candidate that minimizes the dependence between regressor
// and residuals (ties keep the incumbent, otherwise the largest y). Stops
// when the residuals pass the independence test at level alpha, when a full
// sweep changes nothing, or after max_sweeps. The result is canonicalized so
// the residual mode sits at offset 0.
AnmFit fit_anm(const PairedSample& sample, const RegressionConfig& config);

}  // namespace danm

#endif
