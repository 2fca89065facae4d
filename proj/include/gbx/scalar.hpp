// Exact scalar coefficients: rational functions whose numerator and
// denominator are sparse sums of monomials with rational exponents.
#pragma once

#include <gmpxx.h>

#include <boost/rational.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gbx/error.hpp"

namespace gbx {

using Rational = mpq_class;
using Exponent = boost::rational<std::int64_t>;

// Sparse monomial: (variable index, exponent) pairs, indices strictly
// increasing, exponents nonzero.
class Monomial {
public:
    using Entry = std::pair<int, Exponent>;

    Monomial() = default;
    static Monomial var(int index, Exponent e = 1);

    const std::vector<Entry>& entries() const { return e_; }
    bool is_one() const { return e_.empty(); }
    Exponent exponent(int index) const;

    Monomial operator*(const Monomial& o) const;
    Monomial inverse() const;
    Monomial pow(Exponent k) const;

    // Lexicographic comparison of the dense exponent vectors.
    friend int compare(const Monomial& a, const Monomial& b);
    friend bool operator==(const Monomial& a, const Monomial& b) { return a.e_ == b.e_; }
    friend bool operator<(const Monomial& a, const Monomial& b) { return compare(a, b) < 0; }

private:
    std::vector<Entry> e_;
};

struct PolyTerm {
    Monomial mono;
    Rational coef;
};

// Sum of rational-exponent monomials, terms sorted descending, no zeros.
class Poly {
public:
    Poly() = default;
    explicit Poly(Rational c);
    Poly(Rational c, Monomial m);

    const std::vector<PolyTerm>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const;
    bool is_monomial() const { return t_.size() == 1; }
    bool is_one() const;
    const PolyTerm& lead() const { return t_.front(); }

    Poly operator-() const;
    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly scaled(const Rational& c) const;
    Poly shifted(const Monomial& m) const;  // multiply by a monomial

    // Exact quotient when `d` divides this polynomial, otherwise nullopt.
    std::optional<Poly> exact_div(const Poly& d) const;

    friend bool operator==(const Poly& a, const Poly& b);

    // Build from unsorted terms (duplicates merged, zeros dropped).
    static Poly from_terms(std::vector<PolyTerm> ts);

private:
    std::vector<PolyTerm> t_;
};

// Names and chart signs of the scalar variables.  sign: +1 or -1 on the
// declared chart, 0 when undeclared.  On a negative chart the stored
// atom is |v|, so v itself is written -|v|.
struct ScalarSpace {
    std::vector<std::string> names;
    std::vector<int> signs;

    int size() const { return static_cast<int>(names.size()); }
    int index_of(const std::string& name) const;  // -1 when absent
};

class ScalarExpr {
public:
    ScalarExpr() = default;
    ScalarExpr(long c) : num_(Rational(c)) {}  // NOLINT: literal constants
    explicit ScalarExpr(Rational c) : num_(std::move(c)) {}
    explicit ScalarExpr(Poly p) : num_(std::move(p)) {}
    ScalarExpr(Poly num, Poly den);

    // The coordinate v, respecting the chart: -|v| on a negative chart.
    static ScalarExpr variable(const ScalarSpace& sp, int index);

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }  // empty means 1
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_zero(); }
    bool is_constant() const { return den_.is_zero() && num_.is_constant(); }
    std::optional<Rational> constant_value() const;
    bool is_monomial() const { return den_.is_zero() && num_.is_monomial(); }

    ScalarExpr operator-() const;
    ScalarExpr operator+(const ScalarExpr& o) const;
    ScalarExpr operator-(const ScalarExpr& o) const;
    ScalarExpr operator*(const ScalarExpr& o) const;
    ScalarExpr operator/(const ScalarExpr& o) const;
    ScalarExpr& operator+=(const ScalarExpr& o) { return *this = *this + o; }
    ScalarExpr& operator-=(const ScalarExpr& o) { return *this = *this - o; }
    ScalarExpr& operator*=(const ScalarExpr& o) { return *this = *this * o; }

    ScalarExpr inverse() const;
    ScalarExpr pow(long k) const;

    // Value equality (exact: cross-multiplication in an integral domain).
    friend bool operator==(const ScalarExpr& a, const ScalarExpr& b);
    friend bool operator!=(const ScalarExpr& a, const ScalarExpr& b) { return !(a == b); }

private:
    void normalize();
    Poly num_;
    Poly den_;
};

// Arithmetic entry point mirroring the three binary operations.
enum class ScalarOp { add, mul, div };
ScalarExpr scalar_arith(const ScalarExpr& a, const ScalarExpr& b, ScalarOp op);

// Partial derivative by variable index; negative-chart atoms contribute
// d|v|/dv = -1.
ScalarExpr diff(const ScalarExpr& a, const ScalarSpace& sp, int index);
ScalarExpr scalar_diff(const ScalarExpr& a, const ScalarSpace& sp, const std::string& coord);

// Exact evaluation; unset entries of `point` must not occur in `a`.
Rational eval(const ScalarExpr& a, const ScalarSpace& sp,
              const std::vector<std::optional<Rational>>& point);

// Replace variable `index` by `value`.  Only integer exponents of that
// variable may occur.
ScalarExpr substitute(const ScalarExpr& a, const ScalarSpace& sp, int index,
                      const ScalarExpr& value);

// Square root of |a| for a single-term a whose variables all lie on the
// chart and whose coefficient is a rational square.  nullopt otherwise.
std::optional<ScalarExpr> sqrt_abs_monomial(const ScalarExpr& a, const ScalarSpace& sp);

// Sign of a nonzero expression when decidable from the chart alone
// (single term, every variable charted or raised to an even integer
// power).  0 when undecided.
int chart_sign(const ScalarExpr& a, const ScalarSpace& sp);

// True when every variable with nonzero exponent in the single-term
// expression `a` is declared on the chart (so it never vanishes there).
bool is_unit_on_chart(const ScalarExpr& a, const ScalarSpace& sp);

std::string to_string(const ScalarExpr& a, const ScalarSpace& sp);
std::string to_string(const Rational& q);

// b-th root of a positive rational when it is rational.
std::optional<Rational> rational_root(const Rational& x, std::int64_t b);
Rational rational_pow(const Rational& x, Exponent e);  // throws NonRationalValue

} // namespace gbx
