#ifndef DANM_STATS_HPP
#define DANM_STATS_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace danm {

// Co-occurrence table of two equal-length integer label vectors. Rows and
// columns are the sorted distinct values; no all-zero row or column exists.
struct ContingencyTable {
    std::vector<int> row_labels;
    std::vector<int> col_labels;
    std::vector<long long> counts;  // row-major
    long long total = 0;

    std::size_t rows() const { return row_labels.size(); }
    std::size_t cols() const { return col_labels.size(); }
    long long at(std::size_t r, std::size_t c) const { return counts[r * cols() + c]; }

    std::vector<long long> row_sums() const;
    std::vector<long long> col_sums() const;
};

ContingencyTable contingency_table(std::span<const int> u, std::span<const int> v);

enum class TestMethod { ChiSquare, FisherMC };

struct TestResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    TestMethod method = TestMethod::ChiSquare;
};

struct TestConfig {
    double p_min = 1e-12;    // below this the p-value is treated as underflowed
    int n_perm = 10000;      // Monte Carlo permutations for the Fisher fallback
    std::uint64_t seed = 0;  // seed for the permutation stream
};

// Regularized upper incomplete gamma Q(a, x); series/continued-fraction
// implementation good to ~1e-13 relative down to p ~ 1e-300.
double regularized_gamma_q(double a, double x);

// Upper tail of the chi-square distribution with dof degrees of freedom.
double chi_square_upper_tail(double statistic, int dof);

// Pearson statistic over cells with positive expected count; dof 0 tables
// (single row or column) report statistic 0 and p 1.
TestResult chi_square_test(const ContingencyTable& table);

// True iff strictly more than 80% of the expected counts exceed 5; the rule
// guarding the chi-square approximation.
bool cochran_ok(const ContingencyTable& table);

// Conditional Monte Carlo version of Fisher's exact test for r x c tables,
// using the Pearson statistic as discrepancy. One label vector is permuted
// uniformly n_perm times by a seeded generator;
// p = (1 + #{permuted stat >= observed}) / (n_perm + 1).
TestResult fisher_exact_mc(const ContingencyTable& table, int n_perm, std::uint64_t seed);

// Dispatch: chi-square when Cochran's condition holds, Fisher Monte Carlo
// otherwise; degenerate tables return p = 1.
TestResult independence_test(const ContingencyTable& table, const TestConfig& config);
TestResult independence_test(std::span<const int> u, std::span<const int> v,
                             const TestConfig& config);

// Regression loss: p-value ordering with a statistic fallback once the
// p-value underflows p_min. Smaller compares as "less dependent".
struct DependenceScore {
    bool underflow = false;
    double primary = -1.0;       // -p_value when not underflowed
    double fallback_stat = 0.0;  // the test statistic

    std::pair<int, double> key() const {
        return {underflow ? 1 : 0, underflow ? fallback_stat : primary};
    }
    friend bool operator<(const DependenceScore& a, const DependenceScore& b) {
        return a.key() < b.key();
    }
    friend bool operator==(const DependenceScore& a, const DependenceScore& b) {
        return a.key() == b.key();
    }
};

DependenceScore score_from_result(const TestResult& result, double p_min);
DependenceScore dependence_measure(std::span<const int> u, std::span<const int> v,
                                   const TestConfig& config);

}  // namespace danm

#endif
