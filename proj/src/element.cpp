#include "gbx/element.hpp"

#include <bit>

namespace gbx {

namespace {

int popcount(std::uint32_t w) { return std::popcount(w); }
std::uint32_t bits_above(int b) { return b >= 31 ? 0u : (~0u << (b + 1)); }
std::uint32_t bits_below(int b) { return (1u << b) - 1u; }

} // namespace

int merge_sign(std::uint32_t w1, std::uint32_t w2) {
    if (w1 & w2) return 0;
    int swaps = 0;
    for (std::uint32_t rest = w2; rest; rest &= rest - 1) {
        int b = std::countr_zero(rest);
        swaps += popcount(w1 & bits_above(b));
    }
    return (swaps & 1) ? -1 : 1;
}

Bidegree term_bidegree(const TermKey& k, int r) {
    int pdeg = 0;
    for (auto e : k.pexp) pdeg += e;
    std::uint32_t theta_mask = (1u << r) - 1u;
    int nt = popcount(k.word & theta_mask);
    int nx = popcount(k.word & ~theta_mask);
    return {pdeg + nt - 1, pdeg + nx - 1};
}

int term_degree(const TermKey& k) {
    int pdeg = 0;
    for (auto e : k.pexp) pdeg += e;
    return 2 * pdeg + popcount(k.word);
}

void require_same_context(const GradedElement& u, const GradedElement& v) {
    if (!u.context()->same_as(*v.context()))
        throw Error(ErrorCode::ContextMismatch, "elements live in different contexts");
}

// ------------------------------------------------------------ constructors

GradedElement GradedElement::scalar(ContextPtr ctx, const ScalarExpr& c) {
    GradedElement e(ctx);
    TermKey k;
    k.pexp.assign(ctx->n(), 0);
    e.add_term(k, c);
    e.drop_zeros();
    return e;
}

GradedElement GradedElement::coordinate(ContextPtr ctx, int i) {
    auto v = ScalarExpr::variable(ctx->space(), i);
    return scalar(ctx, v);
}

GradedElement GradedElement::xi(ContextPtr ctx, int a) {
    int r = ctx->r();
    return monomial(ctx, ScalarExpr(1), std::vector<std::uint8_t>(ctx->n(), 0), {r + a});
}

GradedElement GradedElement::theta(ContextPtr ctx, int a) {
    return monomial(ctx, ScalarExpr(1), std::vector<std::uint8_t>(ctx->n(), 0), {a});
}

GradedElement GradedElement::momentum(ContextPtr ctx, int i) {
    std::vector<std::uint8_t> pe(ctx->n(), 0);
    pe.at(i) = 1;
    return monomial(ctx, ScalarExpr(1), pe, {});
}

GradedElement GradedElement::monomial(ContextPtr ctx, const ScalarExpr& c, std::vector<std::uint8_t> pexp,
                                      const std::vector<int>& generators) {
    GradedElement e(ctx);
    if (static_cast<int>(pexp.size()) != ctx->n()) throw Error(ErrorCode::TypeError, "p-exponent length");
    std::uint32_t w = 0;
    int sign = 1;
    for (int g : generators) {
        if (g < 0 || g >= 2 * ctx->r()) throw Error(ErrorCode::TypeError, "generator index out of range");
        std::uint32_t bit = 1u << g;
        int s = merge_sign(w, bit);
        if (s == 0) return e;  // odd square
        sign *= s;
        w |= bit;
    }
    TermKey k{w, std::move(pexp)};
    e.add_term(k, sign > 0 ? c : -c);
    e.drop_zeros();
    return e;
}

GradedElement GradedElement::identity(ContextPtr ctx) {
    GradedElement e(ctx);
    int r = ctx->r();
    for (int a = 0; a < r; ++a)
        e += monomial(ctx, ScalarExpr(1), std::vector<std::uint8_t>(ctx->n(), 0), {r + a, a});
    return e;
}

// ------------------------------------------------------------- arithmetic

ScalarExpr GradedElement::coefficient(const TermKey& k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? ScalarExpr() : it->second;
}

ScalarExpr GradedElement::coefficient(std::uint32_t word) const {
    TermKey k{word, std::vector<std::uint8_t>(ctx_->n(), 0)};
    return coefficient(k);
}

void GradedElement::add_term(const TermKey& k, const ScalarExpr& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(k, c);
    if (!inserted) it->second += c;
}

void GradedElement::drop_zeros() {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->second.is_zero())
            it = terms_.erase(it);
        else
            ++it;
    }
}

GradedElement GradedElement::operator-() const {
    GradedElement r = *this;
    for (auto& [k, c] : r.terms_) c = -c;
    return r;
}

GradedElement& GradedElement::operator+=(const GradedElement& o) {
    require_same_context(*this, o);
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    drop_zeros();
    return *this;
}

GradedElement& GradedElement::operator-=(const GradedElement& o) {
    require_same_context(*this, o);
    for (const auto& [k, c] : o.terms_) add_term(k, -c);
    drop_zeros();
    return *this;
}

GradedElement GradedElement::operator+(const GradedElement& o) const {
    GradedElement r = *this;
    r += o;
    return r;
}

GradedElement GradedElement::operator-(const GradedElement& o) const {
    GradedElement r = *this;
    r -= o;
    return r;
}

GradedElement GradedElement::operator*(const ScalarExpr& c) const {
    GradedElement r(ctx_);
    if (c.is_zero()) return r;
    for (const auto& [k, v] : terms_) r.terms_.emplace(k, v * c);
    r.drop_zeros();
    return r;
}

bool operator==(const GradedElement& a, const GradedElement& b) {
    require_same_context(a, b);
    if (a.terms_.size() == b.terms_.size()) {
        bool same = true;
        for (auto i = a.terms_.begin(), j = b.terms_.begin(); i != a.terms_.end(); ++i, ++j) {
            if (!(i->first == j->first) || !(i->second == j->second)) {
                same = false;
                break;
            }
        }
        if (same) return true;
    }
    return (a - b).is_zero();
}

bool GradedElement::is_p_free() const {
    for (const auto& [k, c] : terms_)
        for (auto e : k.pexp)
            if (e) return false;
    return true;
}

bool GradedElement::is_scalar() const {
    for (const auto& [k, c] : terms_)
        if (k.word != 0) return false;
    return is_p_free();
}

bool GradedElement::is_multivector() const {
    std::uint32_t theta_mask = (1u << ctx_->r()) - 1u;
    for (const auto& [k, c] : terms_)
        if (k.word & ~theta_mask) return false;
    return is_p_free();
}

bool GradedElement::is_form() const {
    std::uint32_t theta_mask = (1u << ctx_->r()) - 1u;
    for (const auto& [k, c] : terms_)
        if (k.word & theta_mask) return false;
    return is_p_free();
}

std::map<Bidegree, GradedElement> GradedElement::components() const {
    std::map<Bidegree, GradedElement> out;
    for (const auto& [k, c] : terms_) {
        Bidegree b = term_bidegree(k, ctx_->r());
        auto it = out.try_emplace(b, GradedElement(ctx_)).first;
        it->second.terms_.emplace(k, c);
    }
    return out;
}

std::optional<Bidegree> GradedElement::bidegree() const {
    auto comps = components();
    if (comps.size() != 1) return std::nullopt;
    return comps.begin()->first;
}

GradedElement GradedElement::component(Bidegree b) const {
    GradedElement r(ctx_);
    for (const auto& [k, c] : terms_)
        if (term_bidegree(k, ctx_->r()) == b) r.terms_.emplace(k, c);
    return r;
}

std::vector<BidegreeComponent> bidegree_of(const GradedElement& u) {
    std::vector<BidegreeComponent> out;
    for (auto& [b, e] : u.components()) out.push_back({b, b.total(), e});
    return out;
}

GradedElement diff_coefficients(const GradedElement& u, int i) {
    const auto& sp = u.context()->space();
    return u.map_coefficients([&](const ScalarExpr& c) { return diff(c, sp, i); });
}

GradedElement wedge(const GradedElement& u, const GradedElement& v) {
    require_same_context(u, v);
    GradedElement out(u.context());
    const int n = u.context()->n();
    for (const auto& [ku, cu] : u.terms()) {
        for (const auto& [kv, cv] : v.terms()) {
            int s = merge_sign(ku.word, kv.word);
            if (s == 0) continue;
            TermKey k{ku.word | kv.word, ku.pexp};
            for (int i = 0; i < n; ++i) k.pexp[i] = static_cast<std::uint8_t>(k.pexp[i] + kv.pexp[i]);
            ScalarExpr c = cu * cv;
            out.add_term(k, s > 0 ? c : -c);
        }
    }
    out.drop_zeros();
    return out;
}

// The bracket is fixed by {p_i, x^j} = delta and {xi^a, theta_b} = delta
// (both odd pairings symmetric), extended as a biderivation:
//   {u,v} = sum_i (du/dp_i)(dv/dx^i) - (du/dx^i)(dv/dp_i)
//         + sum_a (u d/dtheta_a)(d/dxi^a v) + (u d/dxi^a)(d/dtheta_a v)
// with right derivatives on u and left derivatives on v.
GradedElement big_bracket(const GradedElement& u, const GradedElement& v) {
    require_same_context(u, v);
    const auto& ctx = u.context();
    const int n = ctx->n(), r = ctx->r();
    const auto& sp = ctx->space();
    GradedElement out(ctx);

    // Which base directions need coefficient derivatives on each side.
    std::vector<bool> u_has_p(n, false), v_has_p(n, false);
    for (const auto& [k, c] : u.terms())
        for (int i = 0; i < n; ++i)
            if (k.pexp[i]) u_has_p[i] = true;
    for (const auto& [k, c] : v.terms())
        for (int i = 0; i < n; ++i)
            if (k.pexp[i]) v_has_p[i] = true;

    auto derivatives = [&](const GradedElement& e, const std::vector<bool>& need) {
        std::vector<std::vector<ScalarExpr>> d;
        d.reserve(e.size());
        for (const auto& [k, c] : e.terms()) {
            std::vector<ScalarExpr> row(n);
            for (int i = 0; i < n; ++i)
                if (need[i]) row[i] = diff(c, sp, i);
            d.push_back(std::move(row));
        }
        return d;
    };
    auto du = derivatives(u, v_has_p);
    auto dv = derivatives(v, u_has_p);

    TermKey k;
    std::size_t iu = 0;
    for (const auto& [ku, cu] : u.terms()) {
        std::size_t iv = 0;
        for (const auto& [kv, cv] : v.terms()) {
            // Even pairs.
            int s_even = 0;
            bool s_known = false;
            for (int i = 0; i < n; ++i) {
                bool a = ku.pexp[i] && !dv[iv][i].is_zero();
                bool b = kv.pexp[i] && !du[iu][i].is_zero();
                if (!a && !b) continue;
                if (!s_known) {
                    s_even = merge_sign(ku.word, kv.word);
                    s_known = true;
                }
                if (s_even == 0) break;
                k.word = ku.word | kv.word;
                k.pexp = ku.pexp;
                for (int j = 0; j < n; ++j) k.pexp[j] = static_cast<std::uint8_t>(k.pexp[j] + kv.pexp[j]);
                --k.pexp[i];
                ScalarExpr c;
                if (a) c += ScalarExpr(static_cast<long>(ku.pexp[i])) * cu * dv[iv][i];
                if (b) c -= ScalarExpr(static_cast<long>(kv.pexp[i])) * du[iu][i] * cv;
                out.add_term(k, s_even > 0 ? c : -c);
            }
            // Odd pairs.
            for (int a = 0; a < r; ++a) {
                for (int pass = 0; pass < 2; ++pass) {
                    // pass 0: theta_a in u, xi^a in v; pass 1: xi^a in u, theta_a in v.
                    int bu = pass == 0 ? a : r + a;
                    int bv = pass == 0 ? r + a : a;
                    if (!(ku.word >> bu & 1u) || !(kv.word >> bv & 1u)) continue;
                    int s = (popcount(ku.word & bits_above(bu)) + popcount(kv.word & bits_below(bv))) & 1 ? -1 : 1;
                    std::uint32_t w1 = ku.word & ~(1u << bu), w2 = kv.word & ~(1u << bv);
                    int m = merge_sign(w1, w2);
                    if (m == 0) continue;
                    s *= m;
                    k.word = w1 | w2;
                    k.pexp = ku.pexp;
                    for (int j = 0; j < n; ++j) k.pexp[j] = static_cast<std::uint8_t>(k.pexp[j] + kv.pexp[j]);
                    ScalarExpr c = cu * cv;
                    out.add_term(k, s > 0 ? c : -c);
                }
            }
            ++iv;
        }
        ++iu;
    }
    out.drop_zeros();
    return out;
}

// ---------------------------------------------------------------- printing

std::string word_string(const GradedContext& ctx, std::uint32_t word) {
    std::string s;
    int r = ctx.r();
    for (int g = 0; g < 2 * r; ++g) {
        if (!(word >> g & 1u)) continue;
        if (!s.empty()) s += "^";
        s += g < r ? ctx.theta_name(g) : ctx.fiber()[g - r];
    }
    return s;
}

std::string to_string(const GradedElement& u) {
    if (u.is_zero()) return "0";
    const auto& ctx = *u.context();
    std::string out;
    bool first = true;
    for (const auto& [k, c] : u.terms()) {
        std::vector<std::string> parts;
        for (int i = 0; i < ctx.n(); ++i) {
            if (!k.pexp[i]) continue;
            std::string m = ctx.momentum_name(i);
            if (k.pexp[i] > 1) m += "^" + std::to_string(k.pexp[i]);
            parts.push_back(m);
        }
        if (k.word) parts.push_back(word_string(ctx, k.word));
        bool neg = false;
        std::string coef;
        if (c.is_monomial()) {
            neg = c.num().lead().coef < 0;
            coef = to_string(neg ? -c : c, ctx.space());
        } else {
            coef = "(" + to_string(c, ctx.space()) + ")";
        }
        std::string body;
        if (coef == "1" && !parts.empty()) {
            body.clear();
        } else {
            body = coef;
        }
        for (const auto& p : parts) body += (body.empty() ? "" : "*") + p;
        if (first)
            out = (neg ? "-" : "") + body;
        else
            out += (neg ? " - " : " + ") + body;
        first = false;
    }
    return out;
}

} // namespace gbx
