#include "danm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "danm/errors.hpp"
#include "danm/rng.hpp"

namespace danm {

std::vector<long long> ContingencyTable::row_sums() const {
    std::vector<long long> out(rows(), 0);
    for (std::size_t r = 0; r < rows(); ++r)
        for (std::size_t c = 0; c < cols(); ++c) out[r] += at(r, c);
    return out;
}

std::vector<long long> ContingencyTable::col_sums() const {
    std::vector<long long> out(cols(), 0);
    for (std::size_t r = 0; r < rows(); ++r)
        for (std::size_t c = 0; c < cols(); ++c) out[c] += at(r, c);
    return out;
}

ContingencyTable contingency_table(std::span<const int> u, std::span<const int> v) {
    if (u.size() != v.size()) throw DataError("label vectors differ in length");
    if (u.empty()) throw DataError("empty input");

    std::vector<int> rows(u.begin(), u.end());
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    std::vector<int> cols(v.begin(), v.end());
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());

    ContingencyTable t;
    t.row_labels = std::move(rows);
    t.col_labels = std::move(cols);
    t.counts.assign(t.rows() * t.cols(), 0);
    t.total = static_cast<long long>(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto r = static_cast<std::size_t>(
            std::lower_bound(t.row_labels.begin(), t.row_labels.end(), u[i]) - t.row_labels.begin());
        const auto c = static_cast<std::size_t>(
            std::lower_bound(t.col_labels.begin(), t.col_labels.end(), v[i]) - t.col_labels.begin());
        ++t.counts[r * t.cols() + c];
    }
    return t;
}

namespace {

// Lower regularized incomplete gamma by power series; valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < 10000; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma by Lentz continued fraction; x >= a + 1.
double gamma_q_cf(double a, double x) {
    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_q(double a, double x) {
    if (a <= 0.0) throw std::invalid_argument("gamma shape must be positive");
    if (x < 0.0) throw std::invalid_argument("gamma argument must be nonnegative");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_upper_tail(double statistic, int dof) {
    if (dof <= 0) return 1.0;
    if (statistic <= 0.0) return 1.0;
    return regularized_gamma_q(dof / 2.0, statistic / 2.0);
}

namespace {

double pearson_statistic(const ContingencyTable& t, const std::vector<long long>& rs,
                         const std::vector<long long>& cs) {
    const auto n = static_cast<double>(t.total);
    double stat = 0.0;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        for (std::size_t c = 0; c < t.cols(); ++c) {
            const double e = static_cast<double>(rs[r]) * static_cast<double>(cs[c]) / n;
            if (e <= 0.0) continue;  // structurally impossible cell
            const double diff = static_cast<double>(t.at(r, c)) - e;
            stat += diff * diff / e;
        }
    }
    return stat;
}

}  // namespace

TestResult chi_square_test(const ContingencyTable& table) {
    TestResult out;
    out.method = TestMethod::ChiSquare;
    out.dof = static_cast<int>((table.rows() - 1) * (table.cols() - 1));
    if (out.dof == 0) {
        out.statistic = 0.0;
        out.p_value = 1.0;
        return out;
    }
    out.statistic = pearson_statistic(table, table.row_sums(), table.col_sums());
    out.p_value = chi_square_upper_tail(out.statistic, out.dof);
    return out;
}

bool cochran_ok(const ContingencyTable& table) {
    const auto rs = table.row_sums();
    const auto cs = table.col_sums();
    const auto n = static_cast<double>(table.total);
    std::size_t above = 0;
    const std::size_t cells = table.rows() * table.cols();
    for (std::size_t r = 0; r < table.rows(); ++r)
        for (std::size_t c = 0; c < table.cols(); ++c)
            if (static_cast<double>(rs[r]) * static_cast<double>(cs[c]) / n > 5.0) ++above;
    return static_cast<double>(above) > 0.8 * static_cast<double>(cells);
}

TestResult fisher_exact_mc(const ContingencyTable& table, int n_perm, std::uint64_t seed) {
    if (n_perm < 1) throw std::invalid_argument("n_perm must be positive");
    const std::size_t rows = table.rows();
    const std::size_t cols = table.cols();
    const auto rs = table.row_sums();
    const auto cs = table.col_sums();
    const auto n = static_cast<std::size_t>(table.total);

    TestResult out;
    out.method = TestMethod::FisherMC;
    out.dof = static_cast<int>((rows - 1) * (cols - 1));
    out.statistic = pearson_statistic(table, rs, cs);
    if (out.dof == 0) {
        out.p_value = 1.0;
        return out;
    }

    // Canonical expansion of the table into label vectors, ordered by
    // (row, column), so the result depends only on the table itself.
    std::vector<std::uint32_t> u_idx(n);
    std::vector<std::uint32_t> v_idx(n);
    {
        std::size_t pos = 0;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                for (long long k = 0; k < table.at(r, c); ++k) {
                    u_idx[pos] = static_cast<std::uint32_t>(r);
                    v_idx[pos] = static_cast<std::uint32_t>(c);
                    ++pos;
                }
    }

    // Margins are fixed under permutation, so the expected counts are too;
    // stat = sum o^2/e - N.
    std::vector<double> inv_e(rows * cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            inv_e[r * cols + c] =
                static_cast<double>(n) / (static_cast<double>(rs[r]) * static_cast<double>(cs[c]));

    const double threshold = out.statistic - 1e-9 * (1.0 + out.statistic);
    Rng rng(seed);
    std::vector<long long> perm_counts(rows * cols);
    long long hits = 0;
    for (int t = 0; t < n_perm; ++t) {
        rng.shuffle(v_idx);
        std::fill(perm_counts.begin(), perm_counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) ++perm_counts[u_idx[i] * cols + v_idx[i]];
        double stat = 0.0;
        for (std::size_t cell = 0; cell < perm_counts.size(); ++cell) {
            const auto o = static_cast<double>(perm_counts[cell]);
            stat += o * o * inv_e[cell];
        }
        stat -= static_cast<double>(n);
        if (stat >= threshold) ++hits;
    }
    out.p_value = static_cast<double>(1 + hits) / static_cast<double>(n_perm + 1);
    return out;
}

TestResult independence_test(const ContingencyTable& table, const TestConfig& config) {
    if (table.rows() <= 1 || table.cols() <= 1) return chi_square_test(table);
    if (cochran_ok(table)) return chi_square_test(table);
    return fisher_exact_mc(table, config.n_perm, config.seed);
}

TestResult independence_test(std::span<const int> u, std::span<const int> v,
                             const TestConfig& config) {
    return independence_test(contingency_table(u, v), config);
}

DependenceScore score_from_result(const TestResult& result, double p_min) {
    DependenceScore s;
    s.fallback_stat = result.statistic;
    s.underflow = result.p_value < p_min;
    s.primary = s.underflow ? 0.0 : -result.p_value;
    return s;
}

DependenceScore dependence_measure(std::span<const int> u, std::span<const int> v,
                                   const TestConfig& config) {
    return score_from_result(independence_test(u, v, config), config.p_min);
}

}  // namespace danm
