#include "gbx/scalar.hpp"

#include <algorithm>
#include <climits>
#include <map>
#include <set>

namespace gbx {

std::string_view to_string(ErrorCode c) {
    switch (c) {
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::UnknownCoordinate: return "UnknownCoordinate";
    case ErrorCode::PoleAtPoint: return "PoleAtPoint";
    case ErrorCode::NegativeBaseFractionalPower: return "NegativeBaseFractionalPower";
    case ErrorCode::NonRationalValue: return "NonRationalValue";
    case ErrorCode::ChartViolation: return "ChartViolation";
    case ErrorCode::ContextMismatch: return "ContextMismatch";
    case ErrorCode::WrongBidegree: return "WrongBidegree";
    case ErrorCode::NotAStructure: return "NotAStructure";
    case ErrorCode::NotAMultivector: return "NotAMultivector";
    case ErrorCode::NotAForm: return "NotAForm";
    case ErrorCode::NotASection: return "NotASection";
    case ErrorCode::NotHomogeneous: return "NotHomogeneous";
    case ErrorCode::SingularWeight: return "SingularWeight";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::NotInvertibleOnChart: return "NotInvertibleOnChart";
    case ErrorCode::SkewConditionFails: return "SkewConditionFails";
    case ErrorCode::MissingTensor: return "MissingTensor";
    case ErrorCode::SideConditionFails: return "SideConditionFails";
    case ErrorCode::TorsionNonzero: return "TorsionNonzero";
    case ErrorCode::NotPoisson: return "NotPoisson";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::SquareMismatch: return "SquareMismatch";
    case ErrorCode::WrongDegree: return "WrongDegree";
    case ErrorCode::NotABaseFunction: return "NotABaseFunction";
    case ErrorCode::EffectivityRequired: return "EffectivityRequired";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::PfaffianNotUnit: return "PfaffianNotUnit";
    case ErrorCode::DegenerateForm: return "DegenerateForm";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::UnboundName: return "UnboundName";
    case ErrorCode::Unsupported: return "Unsupported";
    }
    return "Error";
}

namespace {

Rational to_rational(Exponent e) {
    Rational q(mpz_class(e.numerator()), mpz_class(e.denominator()));
    q.canonicalize();
    return q;
}

bool is_integer(Exponent e) { return e.denominator() == 1; }

} // namespace

// ---------------------------------------------------------------- Monomial

Monomial Monomial::var(int index, Exponent e) {
    Monomial m;
    if (e.numerator() != 0) m.e_.emplace_back(index, e);
    return m;
}

Exponent Monomial::exponent(int index) const {
    for (const auto& [i, e] : e_)
        if (i == index) return e;
    return 0;
}

Monomial Monomial::operator*(const Monomial& o) const {
    Monomial r;
    r.e_.reserve(e_.size() + o.e_.size());
    std::size_t i = 0, j = 0;
    while (i < e_.size() || j < o.e_.size()) {
        if (j == o.e_.size() || (i < e_.size() && e_[i].first < o.e_[j].first)) {
            r.e_.push_back(e_[i++]);
        } else if (i == e_.size() || o.e_[j].first < e_[i].first) {
            r.e_.push_back(o.e_[j++]);
        } else {
            Exponent s = e_[i].second + o.e_[j].second;
            if (s.numerator() != 0) r.e_.emplace_back(e_[i].first, s);
            ++i;
            ++j;
        }
    }
    return r;
}

Monomial Monomial::inverse() const {
    Monomial r = *this;
    for (auto& entry : r.e_) entry.second = -entry.second;
    return r;
}

Monomial Monomial::pow(Exponent k) const {
    if (k.numerator() == 0) return {};
    Monomial r = *this;
    for (auto& entry : r.e_) entry.second *= k;
    return r;
}

int compare(const Monomial& a, const Monomial& b) {
    std::size_t i = 0, j = 0;
    while (i < a.e_.size() || j < b.e_.size()) {
        int ia = i < a.e_.size() ? a.e_[i].first : INT_MAX;
        int ib = j < b.e_.size() ? b.e_[j].first : INT_MAX;
        if (ia == ib) {
            if (a.e_[i].second != b.e_[j].second) return a.e_[i].second < b.e_[j].second ? -1 : 1;
            ++i;
            ++j;
        } else if (ia < ib) {
            return a.e_[i].second.numerator() > 0 ? 1 : -1;
        } else {
            return b.e_[j].second.numerator() > 0 ? -1 : 1;
        }
    }
    return 0;
}

// -------------------------------------------------------------------- Poly

Poly::Poly(Rational c) {
    if (c != 0) t_.push_back({Monomial{}, std::move(c)});
}

Poly::Poly(Rational c, Monomial m) {
    if (c != 0) t_.push_back({std::move(m), std::move(c)});
}

bool Poly::is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].mono.is_one()); }

bool Poly::is_one() const { return t_.size() == 1 && t_[0].mono.is_one() && t_[0].coef == 1; }

Poly Poly::from_terms(std::vector<PolyTerm> ts) {
    std::sort(ts.begin(), ts.end(),
              [](const PolyTerm& a, const PolyTerm& b) { return compare(a.mono, b.mono) > 0; });
    Poly r;
    for (auto& t : ts) {
        if (!r.t_.empty() && r.t_.back().mono == t.mono) {
            r.t_.back().coef += t.coef;
        } else {
            if (!r.t_.empty() && r.t_.back().coef == 0) r.t_.pop_back();
            r.t_.push_back(std::move(t));
        }
    }
    if (!r.t_.empty() && r.t_.back().coef == 0) r.t_.pop_back();
    return r;
}

Poly Poly::operator-() const {
    Poly r = *this;
    for (auto& t : r.t_) t.coef = -t.coef;
    return r;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r;
    r.t_.reserve(t_.size() + o.t_.size());
    std::size_t i = 0, j = 0;
    while (i < t_.size() || j < o.t_.size()) {
        int c = i == t_.size() ? -1 : j == o.t_.size() ? 1 : compare(t_[i].mono, o.t_[j].mono);
        if (c > 0) {
            r.t_.push_back(t_[i++]);
        } else if (c < 0) {
            r.t_.push_back(o.t_[j++]);
        } else {
            Rational s = t_[i].coef + o.t_[j].coef;
            if (s != 0) r.t_.push_back({t_[i].mono, std::move(s)});
            ++i;
            ++j;
        }
    }
    return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
    if (t_.empty() || o.t_.empty()) return {};
    if (o.t_.size() == 1) return shifted(o.t_[0].mono).scaled(o.t_[0].coef);
    if (t_.size() == 1) return o.shifted(t_[0].mono).scaled(t_[0].coef);
    std::vector<PolyTerm> ts;
    ts.reserve(t_.size() * o.t_.size());
    for (const auto& a : t_)
        for (const auto& b : o.t_) ts.push_back({a.mono * b.mono, a.coef * b.coef});
    return from_terms(std::move(ts));
}

Poly Poly::scaled(const Rational& c) const {
    if (c == 0) return {};
    Poly r = *this;
    for (auto& t : r.t_) t.coef *= c;
    return r;
}

Poly Poly::shifted(const Monomial& m) const {
    // Multiplying by a monomial preserves the order (group order).
    Poly r = *this;
    if (m.is_one()) return r;
    for (auto& t : r.t_) t.mono = t.mono * m;
    return r;
}

bool operator==(const Poly& a, const Poly& b) {
    if (a.t_.size() != b.t_.size()) return false;
    for (std::size_t i = 0; i < a.t_.size(); ++i)
        if (!(a.t_[i].mono == b.t_[i].mono) || a.t_[i].coef != b.t_[i].coef) return false;
    return true;
}

namespace {

// Per-variable [min, max] exponent over the terms of p (absent = 0).
std::map<int, std::pair<Exponent, Exponent>> exponent_box(const Poly& p, const std::set<int>& vars) {
    std::map<int, std::pair<Exponent, Exponent>> box;
    for (int v : vars) {
        bool first = true;
        Exponent lo = 0, hi = 0;
        for (const auto& t : p.terms()) {
            Exponent e = t.mono.exponent(v);
            if (first) {
                lo = hi = e;
                first = false;
            } else {
                lo = std::min(lo, e);
                hi = std::max(hi, e);
            }
        }
        box[v] = {lo, hi};
    }
    return box;
}

} // namespace

std::optional<Poly> Poly::exact_div(const Poly& d) const {
    if (d.is_zero()) throw Error(ErrorCode::DivisionByZero, "polynomial division by zero");
    if (is_zero()) return Poly{};
    if (d.is_monomial()) {
        Rational inv = 1 / d.lead().coef;
        return shifted(d.lead().mono.inverse()).scaled(inv);
    }
    if (t_.size() < d.t_.size()) return std::nullopt;
    std::set<int> vars;
    for (const auto* p : {this, &d})
        for (const auto& t : p->t_)
            for (const auto& en : t.mono.entries()) vars.insert(en.first);
    auto nb = exponent_box(*this, vars);
    auto db = exponent_box(d, vars);
    std::map<int, std::pair<Exponent, Exponent>> qb;
    for (int v : vars) {
        Exponent lo = nb[v].first - db[v].first, hi = nb[v].second - db[v].second;
        if (lo > hi) return std::nullopt;
        qb[v] = {lo, hi};
    }
    Poly r = *this;
    std::vector<PolyTerm> q;
    const Monomial dlead_inv = d.lead().mono.inverse();
    const Rational dlead_c = d.lead().coef;
    for (int iter = 0; !r.is_zero(); ++iter) {
        if (iter > 20000) return std::nullopt;
        Monomial m = r.lead().mono * dlead_inv;
        for (int v : vars) {
            Exponent e = m.exponent(v);
            if (e < qb[v].first || e > qb[v].second) return std::nullopt;
        }
        Rational c = r.lead().coef / dlead_c;
        r = r - d.shifted(m).scaled(c);
        q.push_back({std::move(m), std::move(c)});
    }
    return from_terms(std::move(q));
}

// ------------------------------------------------------------- ScalarSpace

int ScalarSpace::index_of(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
        if (names[i] == name) return i;
    return -1;
}

// -------------------------------------------------------------- ScalarExpr

ScalarExpr::ScalarExpr(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw Error(ErrorCode::DivisionByZero, "zero denominator");
    normalize();
}

void ScalarExpr::normalize() {
    if (num_.is_zero()) {
        den_ = Poly{};
        return;
    }
    if (den_.is_zero()) return;
    if (den_.is_monomial()) {
        const auto& lt = den_.lead();
        num_ = num_.shifted(lt.mono.inverse()).scaled(1 / lt.coef);
        den_ = Poly{};
        return;
    }
    // Pull the monomial content out of the denominator.
    std::set<int> vars;
    for (const auto& t : den_.terms())
        for (const auto& en : t.mono.entries()) vars.insert(en.first);
    Monomial content;
    for (int v : vars) {
        Exponent lo = 0;
        bool first = true;
        for (const auto& t : den_.terms()) {
            Exponent e = t.mono.exponent(v);
            lo = first ? e : std::min(lo, e);
            first = false;
        }
        if (lo.numerator() != 0) content = content * Monomial::var(v, lo);
    }
    if (!content.is_one()) {
        Monomial inv = content.inverse();
        den_ = den_.shifted(inv);
        num_ = num_.shifted(inv);
    }
    Rational lc = den_.lead().coef;
    if (lc != 1) {
        Rational inv = 1 / lc;
        den_ = den_.scaled(inv);
        num_ = num_.scaled(inv);
    }
    if (auto q = num_.exact_div(den_)) {
        num_ = std::move(*q);
        den_ = Poly{};
    }
}

ScalarExpr ScalarExpr::variable(const ScalarSpace& sp, int index) {
    if (index < 0 || index >= sp.size())
        throw Error(ErrorCode::UnknownCoordinate, "variable index out of range");
    int s = sp.signs.empty() ? 0 : sp.signs[index];
    return ScalarExpr(Poly(Rational(s < 0 ? -1 : 1), Monomial::var(index)));
}

std::optional<Rational> ScalarExpr::constant_value() const {
    if (!is_constant()) return std::nullopt;
    return num_.is_zero() ? Rational(0) : num_.lead().coef;
}

ScalarExpr ScalarExpr::operator-() const {
    ScalarExpr r = *this;
    r.num_ = -r.num_;
    return r;
}

ScalarExpr ScalarExpr::operator+(const ScalarExpr& o) const {
    if (o.is_zero()) return *this;
    if (is_zero()) return o;
    if (is_polynomial() && o.is_polynomial()) return ScalarExpr(num_ + o.num_);
    if (o.is_polynomial()) return ScalarExpr(num_ + o.num_ * den_, den_);
    if (is_polynomial()) return ScalarExpr(num_ * o.den_ + o.num_, o.den_);
    if (den_ == o.den_) return ScalarExpr(num_ + o.num_, den_);
    if (auto q = o.den_.exact_div(den_)) return ScalarExpr(num_ * *q + o.num_, o.den_);
    if (auto q = den_.exact_div(o.den_)) return ScalarExpr(num_ + o.num_ * *q, den_);
    return ScalarExpr(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

ScalarExpr ScalarExpr::operator-(const ScalarExpr& o) const { return *this + (-o); }

ScalarExpr ScalarExpr::operator*(const ScalarExpr& o) const {
    if (is_zero() || o.is_zero()) return {};
    if (is_polynomial() && o.is_polynomial()) return ScalarExpr(num_ * o.num_);
    Poly a = num_, b = o.num_;
    Poly da = den_, db = o.den_;
    // Cancel across before multiplying out.
    if (!db.is_zero())
        if (auto q = a.exact_div(db)) {
            a = std::move(*q);
            db = Poly{};
        }
    if (!da.is_zero())
        if (auto q = b.exact_div(da)) {
            b = std::move(*q);
            da = Poly{};
        }
    Poly den = da.is_zero() ? db : db.is_zero() ? da : da * db;
    if (den.is_zero()) return ScalarExpr(a * b);
    return ScalarExpr(a * b, den);
}

ScalarExpr ScalarExpr::inverse() const {
    if (is_zero()) throw Error(ErrorCode::DivisionByZero, "inverse of zero");
    return ScalarExpr(den_.is_zero() ? Poly(Rational(1)) : den_, num_);
}

ScalarExpr ScalarExpr::operator/(const ScalarExpr& o) const {
    if (o.is_zero()) throw Error(ErrorCode::DivisionByZero, "scalar division by zero");
    return *this * o.inverse();
}

ScalarExpr ScalarExpr::pow(long k) const {
    if (k < 0) return inverse().pow(-k);
    ScalarExpr result(1), base = *this;
    while (k > 0) {
        if (k & 1) result = result * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return result;
}

bool operator==(const ScalarExpr& a, const ScalarExpr& b) {
    if (a.den_ == b.den_) return a.num_ == b.num_;
    Poly da = a.den_.is_zero() ? Poly(Rational(1)) : a.den_;
    Poly db = b.den_.is_zero() ? Poly(Rational(1)) : b.den_;
    return a.num_ * db == b.num_ * da;
}

ScalarExpr scalar_arith(const ScalarExpr& a, const ScalarExpr& b, ScalarOp op) {
    switch (op) {
    case ScalarOp::add: return a + b;
    case ScalarOp::mul: return a * b;
    case ScalarOp::div: return a / b;
    }
    return {};
}

// ---------------------------------------------------------- calculus & co

namespace {

Poly diff_poly(const Poly& p, int index, int sign) {
    std::vector<PolyTerm> ts;
    for (const auto& t : p.terms()) {
        Exponent e = t.mono.exponent(index);
        if (e.numerator() == 0) continue;
        Rational c = t.coef * to_rational(e);
        if (sign < 0) c = -c;
        ts.push_back({t.mono * Monomial::var(index, -1), std::move(c)});
    }
    return Poly::from_terms(std::move(ts));
}

} // namespace

ScalarExpr diff(const ScalarExpr& a, const ScalarSpace& sp, int index) {
    if (index < 0 || index >= sp.size())
        throw Error(ErrorCode::UnknownCoordinate, "no coordinate with index " + std::to_string(index));
    int s = sp.signs.empty() ? 0 : sp.signs[index];
    if (a.is_polynomial()) return ScalarExpr(diff_poly(a.num(), index, s));
    Poly dn = diff_poly(a.num(), index, s), dd = diff_poly(a.den(), index, s);
    return ScalarExpr(dn * a.den() - a.num() * dd, a.den() * a.den());
}

ScalarExpr scalar_diff(const ScalarExpr& a, const ScalarSpace& sp, const std::string& coord) {
    int i = sp.index_of(coord);
    if (i < 0) throw Error(ErrorCode::UnknownCoordinate, "unknown coordinate '" + coord + "'");
    return diff(a, sp, i);
}

std::optional<Rational> rational_root(const Rational& x, std::int64_t b) {
    if (x < 0) return std::nullopt;
    if (b == 1) return x;
    mpz_class rn, rd;
    if (!mpz_root(rn.get_mpz_t(), x.get_num_mpz_t(), static_cast<unsigned long>(b))) return std::nullopt;
    if (!mpz_root(rd.get_mpz_t(), x.get_den_mpz_t(), static_cast<unsigned long>(b))) return std::nullopt;
    Rational r(rn, rd);
    r.canonicalize();
    return r;
}

Rational rational_pow(const Rational& x, Exponent e) {
    if (e.numerator() == 0) return 1;
    Rational base = x;
    std::int64_t n = e.numerator();
    if (!is_integer(e)) {
        if (x < 0) throw Error(ErrorCode::NegativeBaseFractionalPower, "fractional power of a negative value");
        if (x == 0) {
            if (n < 0) throw Error(ErrorCode::PoleAtPoint, "negative power of zero");
            return 0;
        }
        auto r = rational_root(x, e.denominator());
        if (!r) throw Error(ErrorCode::NonRationalValue, "root of " + x.get_str() + " is irrational");
        base = *r;
    }
    if (n < 0) {
        if (base == 0) throw Error(ErrorCode::PoleAtPoint, "negative power of zero");
        base = 1 / base;
        n = -n;
    }
    Rational out = 1;
    for (std::int64_t k = 0; k < n; ++k) out *= base;
    return out;
}

namespace {

Rational eval_poly(const Poly& p, const std::vector<Rational>& atoms, const std::vector<bool>& have,
                   const ScalarSpace& sp) {
    Rational sum = 0;
    for (const auto& t : p.terms()) {
        Rational v = t.coef;
        for (const auto& [i, e] : t.mono.entries()) {
            if (!have[i])
                throw Error(ErrorCode::UnknownCoordinate, "no value for '" + sp.names[i] + "'");
            v *= rational_pow(atoms[i], e);
        }
        sum += v;
    }
    return sum;
}

} // namespace

Rational eval(const ScalarExpr& a, const ScalarSpace& sp, const std::vector<std::optional<Rational>>& point) {
    std::vector<Rational> atoms(sp.size());
    std::vector<bool> have(sp.size(), false);
    for (int i = 0; i < sp.size() && i < static_cast<int>(point.size()); ++i) {
        if (!point[i]) continue;
        const Rational& x = *point[i];
        int s = sp.signs.empty() ? 0 : sp.signs[i];
        if ((s > 0 && x <= 0) || (s < 0 && x >= 0))
            throw Error(ErrorCode::ChartViolation, "point violates the chart sign of '" + sp.names[i] + "'");
        atoms[i] = s < 0 ? Rational(-x) : x;
        have[i] = true;
    }
    Rational n = eval_poly(a.num(), atoms, have, sp);
    if (a.is_polynomial()) return n;
    Rational d = eval_poly(a.den(), atoms, have, sp);
    if (d == 0) throw Error(ErrorCode::PoleAtPoint, "denominator vanishes at the point");
    return n / d;
}

namespace {

ScalarExpr substitute_poly(const Poly& p, const ScalarSpace& sp, int index, const ScalarExpr& value) {
    int s = sp.signs.empty() ? 0 : sp.signs[index];
    ScalarExpr atom = s < 0 ? -value : value;
    ScalarExpr out;
    std::map<std::int64_t, ScalarExpr> powers;
    for (const auto& t : p.terms()) {
        Exponent e = t.mono.exponent(index);
        if (!is_integer(e))
            throw Error(ErrorCode::Unsupported,
                        "cannot substitute into a fractional power of '" + sp.names[index] + "'");
        Monomial rest = t.mono * Monomial::var(index, -e);
        ScalarExpr term(Poly(t.coef, rest));
        if (e.numerator() != 0) {
            auto it = powers.find(e.numerator());
            if (it == powers.end()) it = powers.emplace(e.numerator(), atom.pow(e.numerator())).first;
            term = term * it->second;
        }
        out += term;
    }
    return out;
}

} // namespace

ScalarExpr substitute(const ScalarExpr& a, const ScalarSpace& sp, int index, const ScalarExpr& value) {
    ScalarExpr n = substitute_poly(a.num(), sp, index, value);
    if (a.is_polynomial()) return n;
    return n / substitute_poly(a.den(), sp, index, value);
}

bool is_unit_on_chart(const ScalarExpr& a, const ScalarSpace& sp) {
    if (a.is_zero()) return false;
    if (!a.is_monomial()) return false;
    for (const auto& [i, e] : a.num().lead().mono.entries())
        if (sp.signs.empty() || sp.signs[i] == 0) return false;
    return true;
}

int chart_sign(const ScalarExpr& a, const ScalarSpace& sp) {
    if (!is_unit_on_chart(a, sp)) return 0;
    return sgn(a.num().lead().coef);
}

std::optional<ScalarExpr> sqrt_abs_monomial(const ScalarExpr& a, const ScalarSpace& sp) {
    if (!is_unit_on_chart(a, sp)) return std::nullopt;
    const auto& t = a.num().lead();
    Rational c = abs(t.coef);
    auto r = rational_root(c, 2);
    if (!r) return std::nullopt;
    return ScalarExpr(Poly(*r, t.mono.pow(Exponent(1, 2))));
}

// ---------------------------------------------------------------- printing

std::string to_string(const Rational& q) { return q.get_str(); }

namespace {

std::string mono_string(const Monomial& m, const ScalarSpace& sp) {
    std::string s;
    for (const auto& [i, e] : m.entries()) {
        if (!s.empty()) s += "*";
        std::string name = i < sp.size() ? sp.names[i] : "v" + std::to_string(i);
        bool neg_chart = !sp.signs.empty() && i < sp.size() && sp.signs[i] < 0;
        s += neg_chart ? "abs(" + name + ")" : name;
        if (e == Exponent(1)) continue;
        if (is_integer(e) && e.numerator() > 0)
            s += "^" + std::to_string(e.numerator());
        else if (is_integer(e))
            s += "^(" + std::to_string(e.numerator()) + ")";
        else
            s += "^(" + std::to_string(e.numerator()) + "/" + std::to_string(e.denominator()) + ")";
    }
    return s;
}

std::string poly_string(const Poly& p, const ScalarSpace& sp) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& t : p.terms()) {
        std::string body;
        bool neg = t.coef < 0;
        Rational c = abs(t.coef);
        if (t.mono.is_one())
            body = c.get_str();
        else if (c == 1)
            body = mono_string(t.mono, sp);
        else
            body = c.get_str() + "*" + mono_string(t.mono, sp);
        if (first)
            out = (neg ? "-" : "") + body;
        else
            out += (neg ? " - " : " + ") + body;
        first = false;
    }
    return out;
}

} // namespace

std::string to_string(const ScalarExpr& a, const ScalarSpace& sp) {
    if (a.is_polynomial()) return poly_string(a.num(), sp);
    std::string n = poly_string(a.num(), sp);
    if (a.num().terms().size() > 1) n = "(" + n + ")";
    return n + "/(" + poly_string(a.den(), sp) + ")";
}

} // namespace gbx
