#include "danm/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "danm/errors.hpp"

namespace danm {

ValueDomain ValueDomain::cyclic(int m) {
    if (m < 2) throw std::invalid_argument("cyclic modulus must be >= 2");
    ValueDomain d;
    d.kind = Kind::Cyclic;
    d.modulus = m;
    return d;
}

PairedSample PairedSample::create(std::vector<std::pair<int, int>> rows, ValueDomain x_domain,
                                  ValueDomain y_domain) {
    if (rows.empty()) throw DataError("empty input");
    for (auto& [x, y] : rows) {
        x = x_domain.wrap(x);
        y = y_domain.wrap(y);
    }
    return PairedSample{std::move(rows), x_domain, y_domain};
}

PairedSample PairedSample::swapped() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(rows.size());
    for (const auto& [x, y] : rows) out.emplace_back(y, x);
    return PairedSample{std::move(out), y_domain, x_domain};
}

PairedSample PairedSample::prefix(std::size_t n) const {
    if (n == 0 || n > rows.size()) throw DataError("prefix size out of range");
    return PairedSample{{rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n)}, x_domain,
                        y_domain};
}

std::vector<int> PairedSample::x_column() const {
    std::vector<int> out;
    out.reserve(rows.size());
    for (const auto& [x, y] : rows) out.push_back(x);
    return out;
}

std::vector<int> PairedSample::y_column() const {
    std::vector<int> out;
    out.reserve(rows.size());
    for (const auto& [x, y] : rows) out.push_back(y);
    return out;
}

int FunctionTable::at(int x) const {
    auto it = entries.find(x);
    if (it == entries.end())
        throw std::out_of_range("function undefined at x = " + std::to_string(x));
    return it->second;
}

FunctionTable FunctionTable::shifted(int j) const {
    FunctionTable out;
    out.codomain = codomain;
    for (const auto& [x, y] : entries) out.entries[x] = codomain.wrap(static_cast<long long>(y) + j);
    return out;
}

bool FunctionTable::constant() const {
    if (entries.empty()) return true;
    const int first = entries.begin()->second;
    for (const auto& [x, y] : entries)
        if (y != first) return false;
    return true;
}

namespace {

Pmf finish_exact(std::vector<int> values, std::vector<Rational> mass, ValueDomain domain) {
    Rational total(0);
    for (const auto& m : mass) {
        if (m.is_negative()) throw std::invalid_argument("negative probability mass");
        total += m;
    }
    if (total != Rational(1)) throw std::invalid_argument("pmf mass must sum to 1, got " + total.str());
    Pmf out;
    out.values = std::move(values);
    out.mass_exact = std::move(mass);
    out.mass.reserve(out.mass_exact.size());
    for (const auto& m : out.mass_exact) out.mass.push_back(m.to_double());
    out.domain = domain;
    out.exact = true;
    return out;
}

void check_sorted_distinct(const std::vector<int>& values) {
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] <= values[i - 1]) throw std::invalid_argument("pmf values must be sorted and distinct");
}

// Centered representative used for the canonicalization tie-break: offsets in
// the upper half of a cyclic group count as negative shifts.
long long centered(int value, const ValueDomain& domain) {
    if (!domain.is_cyclic()) return value;
    const int m = domain.modulus;
    return 2 * value > m ? value - m : value;
}

}  // namespace

Pmf Pmf::from_counts(const std::map<int, long long>& counts, long long total, ValueDomain domain) {
    if (total <= 0) throw std::invalid_argument("pmf total must be positive");
    std::vector<int> values;
    std::vector<Rational> mass;
    values.reserve(counts.size());
    mass.reserve(counts.size());
    for (const auto& [v, c] : counts) {
        if (c < 0) throw std::invalid_argument("negative count");
        values.push_back(v);
        mass.emplace_back(c, total);
    }
    return finish_exact(std::move(values), std::move(mass), domain);
}

Pmf Pmf::from_rationals(std::vector<int> values, std::vector<Rational> mass, ValueDomain domain) {
    if (values.size() != mass.size()) throw std::invalid_argument("pmf size mismatch");
    if (values.empty()) throw std::invalid_argument("empty pmf");
    check_sorted_distinct(values);
    return finish_exact(std::move(values), std::move(mass), domain);
}

Pmf Pmf::from_weights(std::vector<int> values, const std::vector<long long>& weights,
                      ValueDomain domain) {
    if (values.size() != weights.size()) throw std::invalid_argument("pmf size mismatch");
    long long total = 0;
    for (long long w : weights) {
        if (w < 0) throw std::invalid_argument("negative weight");
        total += w;
    }
    if (total == 0) throw std::invalid_argument("all weights zero");
    std::vector<Rational> mass;
    mass.reserve(weights.size());
    for (long long w : weights) mass.emplace_back(w, total);
    check_sorted_distinct(values);
    return finish_exact(std::move(values), std::move(mass), domain);
}

Pmf Pmf::from_doubles(std::vector<int> values, std::vector<double> mass, ValueDomain domain) {
    if (values.size() != mass.size()) throw std::invalid_argument("pmf size mismatch");
    if (values.empty()) throw std::invalid_argument("empty pmf");
    check_sorted_distinct(values);
    double total = 0;
    for (double m : mass) {
        if (m < 0) throw std::invalid_argument("negative probability mass");
        total += m;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("pmf mass must sum to 1");
    Pmf out;
    out.values = std::move(values);
    out.mass = std::move(mass);
    out.domain = domain;
    out.exact = false;
    return out;
}

double Pmf::mass_at(int value) const {
    auto it = std::lower_bound(values.begin(), values.end(), value);
    if (it == values.end() || *it != value) return 0.0;
    return mass[static_cast<std::size_t>(it - values.begin())];
}

Rational Pmf::exact_mass_at(int value) const {
    if (!exact) throw std::logic_error("pmf does not carry exact masses");
    auto it = std::lower_bound(values.begin(), values.end(), value);
    if (it == values.end() || *it != value) return Rational(0);
    return mass_exact[static_cast<std::size_t>(it - values.begin())];
}

std::vector<int> Pmf::support() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const bool positive = exact ? !mass_exact[i].is_zero() : mass[i] > 0.0;
        if (positive) out.push_back(values[i]);
    }
    return out;
}

int Pmf::mode() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        bool better;
        if (exact) {
            if (mass_exact[i] != mass_exact[best]) {
                better = mass_exact[i] > mass_exact[best];
            } else {
                const long long ci = centered(values[i], domain);
                const long long cb = centered(values[best], domain);
                better = std::abs(ci) != std::abs(cb) ? std::abs(ci) < std::abs(cb) : ci > cb;
            }
        } else {
            if (mass[i] != mass[best]) {
                better = mass[i] > mass[best];
            } else {
                const long long ci = centered(values[i], domain);
                const long long cb = centered(values[best], domain);
                better = std::abs(ci) != std::abs(cb) ? std::abs(ci) < std::abs(cb) : ci > cb;
            }
        }
        if (better) best = i;
    }
    return values[best];
}

Pmf Pmf::shifted_back(int j) const {
    std::map<int, std::size_t> order;
    for (std::size_t i = 0; i < values.size(); ++i)
        order[domain.wrap(static_cast<long long>(values[i]) - j)] = i;
    Pmf out;
    out.domain = domain;
    out.exact = exact;
    for (const auto& [v, i] : order) {
        out.values.push_back(v);
        out.mass.push_back(mass[i]);
        if (exact) out.mass_exact.push_back(mass_exact[i]);
    }
    return out;
}

double Pmf::total_variation_from_uniform() const {
    if (!domain.is_cyclic()) throw std::logic_error("uniformity is defined on cyclic domains");
    const double u = 1.0 / domain.modulus;
    double tv = 0.0;
    double seen = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        tv += std::abs(mass[i] - u);
        seen += 1.0;
    }
    tv += (domain.modulus - seen) * u;  // values missing from the list carry mass 0
    return tv / 2.0;
}

JointPmf::JointPmf(std::vector<int> x_values, std::vector<int> y_values,
                   std::vector<long long> counts, long long total, ValueDomain x_domain,
                   ValueDomain y_domain)
    : x_values_(std::move(x_values)),
      y_values_(std::move(y_values)),
      counts_(std::move(counts)),
      total_(total),
      x_domain_(x_domain),
      y_domain_(y_domain) {
    if (x_values_.empty() || y_values_.empty()) throw DataError("empty input");
    if (counts_.size() != x_values_.size() * y_values_.size())
        throw std::invalid_argument("joint pmf shape mismatch");
    long long sum = 0;
    for (long long c : counts_) sum += c;
    if (sum != total_ || total_ <= 0) throw std::invalid_argument("joint pmf counts do not sum to total");
}

long long JointPmf::count_at(int x, int y) const {
    const auto xi = x_index(x);
    const auto yi = y_index(y);
    if (!xi || !yi) return 0;
    return count(*xi, *yi);
}

std::optional<std::size_t> JointPmf::x_index(int x) const {
    auto it = std::lower_bound(x_values_.begin(), x_values_.end(), x);
    if (it == x_values_.end() || *it != x) return std::nullopt;
    return static_cast<std::size_t>(it - x_values_.begin());
}

std::optional<std::size_t> JointPmf::y_index(int y) const {
    auto it = std::lower_bound(y_values_.begin(), y_values_.end(), y);
    if (it == y_values_.end() || *it != y) return std::nullopt;
    return static_cast<std::size_t>(it - y_values_.begin());
}

std::vector<long long> JointPmf::x_margin_counts() const {
    std::vector<long long> out(x_values_.size(), 0);
    for (std::size_t i = 0; i < x_values_.size(); ++i)
        for (std::size_t j = 0; j < y_values_.size(); ++j) out[i] += count(i, j);
    return out;
}

std::vector<long long> JointPmf::y_margin_counts() const {
    std::vector<long long> out(y_values_.size(), 0);
    for (std::size_t i = 0; i < x_values_.size(); ++i)
        for (std::size_t j = 0; j < y_values_.size(); ++j) out[j] += count(i, j);
    return out;
}

JointPmf empirical_joint(const PairedSample& sample) {
    if (sample.rows.empty()) throw DataError("empty input");
    std::map<std::pair<int, int>, long long> tally;
    for (const auto& row : sample.rows) ++tally[row];

    std::vector<int> xs;
    std::vector<int> ys;
    for (const auto& [key, c] : tally) {
        xs.push_back(key.first);
        ys.push_back(key.second);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    std::vector<long long> counts(xs.size() * ys.size(), 0);
    for (const auto& [key, c] : tally) {
        const auto xi = static_cast<std::size_t>(
            std::lower_bound(xs.begin(), xs.end(), key.first) - xs.begin());
        const auto yi = static_cast<std::size_t>(
            std::lower_bound(ys.begin(), ys.end(), key.second) - ys.begin());
        counts[xi * ys.size() + yi] = c;
    }
    return JointPmf(std::move(xs), std::move(ys), std::move(counts),
                    static_cast<long long>(sample.rows.size()), sample.x_domain, sample.y_domain);
}

std::vector<int> residuals(const PairedSample& sample, const FunctionTable& f) {
    std::vector<int> out;
    out.reserve(sample.rows.size());
    for (const auto& [x, y] : sample.rows)
        out.push_back(sample.y_domain.wrap(static_cast<long long>(y) - f.at(x)));
    return out;
}

Pmf residual_pmf(const std::vector<int>& residuals, ValueDomain domain) {
    if (residuals.empty()) throw DataError("empty input");
    std::map<int, long long> counts;
    for (int r : residuals) ++counts[domain.wrap(r)];
    return Pmf::from_counts(counts, static_cast<long long>(residuals.size()), domain);
}

std::pair<FunctionTable, Pmf> canonicalize(const FunctionTable& f, const Pmf& noise) {
    const int shift = noise.mode();
    return {f.shifted(shift), noise.shifted_back(shift)};
}

}  // namespace danm
