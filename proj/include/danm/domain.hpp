#ifndef DANM_DOMAIN_HPP
#define DANM_DOMAIN_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "danm/rational.hpp"

namespace danm {

// Remainder in [0, m) regardless of the sign of a.
inline long long mod_floor(long long a, long long m) {
    long long r = a % m;
    return r < 0 ? r + m : r;
}

// A variable either lives on the integers or on Z/mZ with modular addition.
struct ValueDomain {
    enum class Kind { Integer, Cyclic };

    Kind kind = Kind::Integer;
    int modulus = 0;  // >= 2 iff Cyclic

    static ValueDomain integer() { return {}; }
    static ValueDomain cyclic(int m);

    bool is_cyclic() const { return kind == Kind::Cyclic; }

    // Canonical representative: identity for Integer, value mod m for Cyclic.
    int wrap(long long v) const {
        return is_cyclic() ? static_cast<int>(mod_floor(v, modulus)) : static_cast<int>(v);
    }

    friend bool operator==(const ValueDomain& a, const ValueDomain& b) {
        return a.kind == b.kind && a.modulus == b.modulus;
    }
    friend bool operator!=(const ValueDomain& a, const ValueDomain& b) { return !(a == b); }

    std::string str() const {
        return is_cyclic() ? "cyclic:" + std::to_string(modulus) : "integer";
    }
};

// Ordered (x, y) observations; the unit of inference input. Cyclic values are
// normalized into [0, m) on construction.
struct PairedSample {
    std::vector<std::pair<int, int>> rows;
    ValueDomain x_domain;
    ValueDomain y_domain;

    static PairedSample create(std::vector<std::pair<int, int>> rows, ValueDomain x_domain,
                               ValueDomain y_domain);

    std::size_t size() const { return rows.size(); }

    PairedSample swapped() const;
    PairedSample prefix(std::size_t n) const;

    std::vector<int> x_column() const;
    std::vector<int> y_column() const;
};

// A finite map x -> y, total on its declared support.
struct FunctionTable {
    std::map<int, int> entries;
    ValueDomain codomain;

    int at(int x) const;
    bool defined_at(int x) const { return entries.count(x) != 0; }

    // f + j, reduced into the codomain when cyclic.
    FunctionTable shifted(int j) const;

    bool constant() const;

    friend bool operator==(const FunctionTable& a, const FunctionTable& b) {
        return a.entries == b.entries && a.codomain == b.codomain;
    }
};

// Probability mass over a finite set of integer values. Masses built from
// counts, rationals or integer weights stay exact; masses built from doubles
// are flagged inexact so downstream equality checks switch to tolerances.
struct Pmf {
    std::vector<int> values;           // sorted, distinct
    std::vector<double> mass;          // always populated
    std::vector<Rational> mass_exact;  // populated iff exact
    ValueDomain domain;
    bool exact = false;

    static Pmf from_counts(const std::map<int, long long>& counts, long long total,
                           ValueDomain domain);
    static Pmf from_rationals(std::vector<int> values, std::vector<Rational> mass,
                              ValueDomain domain);
    static Pmf from_weights(std::vector<int> values, const std::vector<long long>& weights,
                            ValueDomain domain);
    static Pmf from_doubles(std::vector<int> values, std::vector<double> mass, ValueDomain domain);

    std::size_t size() const { return values.size(); }
    double mass_at(int value) const;
    Rational exact_mass_at(int value) const;

    // Values carrying strictly positive mass.
    std::vector<int> support() const;

    // Largest-mass value with ties broken toward the smallest magnitude
    // (centered representative for cyclic domains), then the positive one.
    int mode() const;

    // Pmf of value - j, wrapped for cyclic domains; realizes n'(i) = n(i + j).
    Pmf shifted_back(int j) const;

    double total_variation_from_uniform() const;
};

// Empirical joint distribution stored as integer counts over the observed
// grid; masses become floats only when read.
class JointPmf {
public:
    JointPmf(std::vector<int> x_values, std::vector<int> y_values, std::vector<long long> counts,
             long long total, ValueDomain x_domain, ValueDomain y_domain);

    const std::vector<int>& x_values() const { return x_values_; }
    const std::vector<int>& y_values() const { return y_values_; }
    const ValueDomain& x_domain() const { return x_domain_; }
    const ValueDomain& y_domain() const { return y_domain_; }
    long long total() const { return total_; }

    long long count(std::size_t xi, std::size_t yi) const {
        return counts_[xi * y_values_.size() + yi];
    }
    double mass(std::size_t xi, std::size_t yi) const {
        return static_cast<double>(count(xi, yi)) / static_cast<double>(total_);
    }
    long long count_at(int x, int y) const;

    std::optional<std::size_t> x_index(int x) const;
    std::optional<std::size_t> y_index(int y) const;

    std::vector<long long> x_margin_counts() const;
    std::vector<long long> y_margin_counts() const;

private:
    std::vector<int> x_values_;
    std::vector<int> y_values_;
    std::vector<long long> counts_;  // row-major, |x| rows by |y| columns
    long long total_;
    ValueDomain x_domain_;
    ValueDomain y_domain_;
};

JointPmf empirical_joint(const PairedSample& sample);

// r_i = y_i - f(x_i), reduced into [0, m) when the codomain is cyclic.
std::vector<int> residuals(const PairedSample& sample, const FunctionTable& f);

// Exact empirical pmf of a residual vector.
Pmf residual_pmf(const std::vector<int>& residuals, ValueDomain domain);

// Shifts f by the residual mode so the noise mass at offset 0 is maximal.
// Ties among equally frequent offsets go to the smallest magnitude, then the
// positive one; the convention is fixed so outputs are deterministic.
std::pair<FunctionTable, Pmf> canonicalize(const FunctionTable& f, const Pmf& residual_pmf);

}  // namespace danm

#endif
