// Shared helpers for the unit and acceptance binaries: seeded random
// elements and a dense exterior-algebra oracle that never touches the
// graded bracket engine.
#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "gbx/algebroid.hpp"
#include "gbx/tensor.hpp"

namespace gbx::testing {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : g_(seed) {}
    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g_); }
    bool coin() { return uniform(0, 1) == 1; }
    // Nonzero small integer.
    long small() {
        int v = uniform(1, 4);
        return coin() ? v : -v;
    }
    std::vector<int> subset(int n, int k) {
        std::vector<int> all(n);
        for (int i = 0; i < n; ++i) all[i] = i;
        std::shuffle(all.begin(), all.end(), g_);
        all.resize(k);
        std::sort(all.begin(), all.end());
        return all;
    }

private:
    std::mt19937_64 g_;
};

// Nonzero polynomial in the base coordinates of degree <= max_deg.
inline ScalarExpr random_poly(Rng& rng, const ContextPtr& ctx, int max_deg = 2, int max_terms = 2) {
    const ScalarSpace& sp = ctx->space();
    for (;;) {
        ScalarExpr s(0);
        int terms = rng.uniform(1, max_terms);
        for (int t = 0; t < terms; ++t) {
            ScalarExpr m(rng.small());
            int deg = rng.uniform(0, max_deg);
            for (int k = 0; k < deg; ++k) m = m * ScalarExpr::variable(sp, rng.uniform(0, ctx->n() - 1));
            s += m;
        }
        if (!s.is_zero()) return s;
    }
}

inline ScalarExpr random_constant(Rng& rng) { return ScalarExpr(rng.small()); }

// Random element of one shifted bidegree.  Terms mix different numbers of
// momenta when the bidegree allows it.  Throws when the bidegree has no
// monomials in this context.
inline GradedElement random_homogeneous(Rng& rng, const ContextPtr& ctx, Bidegree b, int terms = 2,
                                        int max_deg = 2, int max_momenta = 1) {
    const int n = ctx->n(), r = ctx->r();
    std::vector<int> shapes;
    for (int np = 0; np <= max_momenta; ++np) {
        int nt = b.p + 1 - np, nx = b.q + 1 - np;
        if (nt >= 0 && nx >= 0 && nt <= r && nx <= r) shapes.push_back(np);
    }
    if (shapes.empty()) throw std::invalid_argument("no monomials in this bidegree");
    GradedElement u(ctx);
    for (int t = 0; t < terms; ++t) {
        int np = shapes[rng.uniform(0, static_cast<int>(shapes.size()) - 1)];
        std::vector<std::uint8_t> pexp(n, 0);
        for (int k = 0; k < np; ++k) ++pexp[rng.uniform(0, n - 1)];
        std::vector<int> gens = rng.subset(r, b.p + 1 - np);
        for (int x : rng.subset(r, b.q + 1 - np)) gens.push_back(r + x);
        u += GradedElement::monomial(ctx, random_poly(rng, ctx, max_deg), pexp, gens);
    }
    return u;
}

inline bool bidegree_possible(const ContextPtr& ctx, Bidegree b, int max_momenta = 1) {
    for (int np = 0; np <= max_momenta; ++np) {
        int nt = b.p + 1 - np, nx = b.q + 1 - np;
        if (nt >= 0 && nx >= 0 && nt <= ctx->r() && nx <= ctx->r()) return true;
    }
    return false;
}

inline Bidegree random_bidegree(Rng& rng, const ContextPtr& ctx, int lo = -1, int hi = 2) {
    for (;;) {
        Bidegree b{rng.uniform(lo, hi), rng.uniform(lo, hi)};
        if (bidegree_possible(ctx, b)) return b;
    }
}

inline int total_degree(const GradedElement& u) { return u.bidegree()->total(); }

// Random effective 2-form on a 2-D cotangent context (q1,q2,p1,p2): a
// combination of the five primitive directions with polynomial
// coefficients.
inline GradedElement random_effective_2d(Rng& rng, const ContextPtr& ctx, int max_deg = 1) {
    const int r = ctx->r();
    auto x = [&](int i) { return GradedElement::xi(ctx, i); };
    std::vector<GradedElement> basis = {wedge(x(0), x(1)), wedge(x(2), x(3)), wedge(x(2), x(1)), wedge(x(3), x(0)),
                                        wedge(x(2), x(0)) - wedge(x(3), x(1))};
    (void)r;
    for (;;) {
        GradedElement w(ctx);
        for (const auto& b : basis)
            if (rng.coin()) w += b * random_poly(rng, ctx, max_deg);
        if (!w.is_zero()) return w;
    }
}

inline Matrix random_matrix(Rng& rng, const ContextPtr& ctx, int rows, int cols, bool constant) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (rng.uniform(0, 2) > 0) m(i, j) = constant ? random_constant(rng) : random_poly(rng, ctx, 1);
    return m;
}

inline Matrix random_skew(Rng& rng, const ContextPtr& ctx, int n, bool constant) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform(0, 2) > 0) {
                m(i, j) = constant ? random_constant(rng) : random_poly(rng, ctx, 1);
                m(j, i) = -m(i, j);
            }
    return m;
}

// ------------------------------------------------------------------ dense
// Constant-coefficient forms on R^dim: sorted index tuples to rationals.

struct DenseForm {
    int dim = 0;
    std::map<std::vector<int>, Rational> c;

    static DenseForm basis(int dim, std::vector<int> idx, Rational coef = 1) {
        DenseForm f{dim, {}};
        f.add(std::move(idx), coef);
        return f;
    }
    // Adds coef * e^{idx} after sorting idx with the permutation sign.
    void add(std::vector<int> idx, const Rational& coef) {
        int sign = 1;
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j + 1 < idx.size() - i; ++j)
                if (idx[j] > idx[j + 1]) {
                    std::swap(idx[j], idx[j + 1]);
                    sign = -sign;
                } else if (idx[j] == idx[j + 1]) {
                    return;
                }
        for (std::size_t j = 0; j + 1 < idx.size(); ++j)
            if (idx[j] == idx[j + 1]) return;
        Rational& slot = c[idx];
        slot += sign * coef;
        if (slot == 0) c.erase(idx);
    }
    DenseForm operator+(const DenseForm& o) const {
        DenseForm r = *this;
        for (const auto& [k, v] : o.c) r.add(k, v);
        return r;
    }
    DenseForm operator-(const DenseForm& o) const { return *this + o * Rational(-1); }
    DenseForm operator*(const Rational& s) const {
        DenseForm r{dim, {}};
        for (const auto& [k, v] : c) r.add(k, v * s);
        return r;
    }
    bool is_zero() const { return c.empty(); }
};

inline DenseForm dense_wedge(const DenseForm& a, const DenseForm& b) {
    DenseForm r{a.dim, {}};
    for (const auto& [ka, va] : a.c)
        for (const auto& [kb, vb] : b.c) {
            std::vector<int> idx = ka;
            idx.insert(idx.end(), kb.begin(), kb.end());
            r.add(idx, va * vb);
        }
    return r;
}

// i_{e_k} on e^{i1..ip}: sign (-1)^position of k.
inline DenseForm dense_interior(int k, const DenseForm& a) {
    DenseForm r{a.dim, {}};
    for (const auto& [idx, v] : a.c) {
        auto it = std::find(idx.begin(), idx.end(), k);
        if (it == idx.end()) continue;
        int pos = static_cast<int>(it - idx.begin());
        std::vector<int> rest = idx;
        rest.erase(rest.begin() + pos);
        r.add(rest, pos % 2 ? Rational(-v) : v);
    }
    return r;
}

inline Rational top_coefficient(const DenseForm& a) {
    std::vector<int> all(a.dim);
    for (int i = 0; i < a.dim; ++i) all[i] = i;
    auto it = a.c.find(all);
    return it == a.c.end() ? Rational(0) : it->second;
}

// Value of a 2-form on a pair of basis vectors.
inline Rational dense_pair(const DenseForm& w, int a, int b) {
    DenseForm x = dense_interior(b, dense_interior(a, w));
    auto it = x.c.find({});
    return it == x.c.end() ? Rational(0) : it->second;
}

// Frame index convention for T*R^n: (q1..qn, p1..pn), matching the
// cotangent context's base and fiber order.
inline DenseForm dense_canonical(int n) {
    DenseForm om{2 * n, {}};
    for (int i = 0; i < n; ++i) om.add({n + i, i}, 1);  // dp_i ^ dq_i
    return om;
}

struct DenseHitchin {
    std::vector<std::vector<Rational>> K;  // K[a][b]: component a of K(e_b)
    Rational lambda;
    std::vector<std::vector<Rational>> q;  // Omega(K e_a, e_b)
    std::vector<Rational> pf;             // -3 (t^t^Omega)/Omega^3 with t = i_{e_a} rho
};

// K(e_b) = Y with i_Y vol = i_{e_b} rho ^ rho, vol = -Omega^3/6, computed
// by brute force over the top degree.
inline DenseHitchin dense_hitchin(const DenseForm& rho, int n) {
    const int dim = 2 * n;
    DenseForm Om = dense_canonical(n);
    DenseForm Om3 = dense_wedge(Om, dense_wedge(Om, Om));
    DenseForm vol = Om3 * Rational(-1, 6);
    const Rational c = top_coefficient(vol);
    DenseHitchin h;
    h.K.assign(dim, std::vector<Rational>(dim, 0));
    for (int b = 0; b < dim; ++b) {
        DenseForm five = dense_wedge(dense_interior(b, rho), rho);
        for (int a = 0; a < dim; ++a) {
            // i_{e_a} (c e^{0..dim-1}) = c (-1)^a e^{0..a^..dim-1}
            std::vector<int> rest;
            for (int i = 0; i < dim; ++i)
                if (i != a) rest.push_back(i);
            auto it = five.c.find(rest);
            Rational v = it == five.c.end() ? Rational(0) : it->second;
            h.K[a][b] = v / c * (a % 2 ? -1 : 1);
        }
    }
    Rational tr = 0;
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) tr += h.K[a][b] * h.K[b][a];
    h.lambda = tr / 6;
    h.q.assign(dim, std::vector<Rational>(dim, 0));
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
            for (int c2 = 0; c2 < dim; ++c2) h.q[a][b] += h.K[c2][a] * dense_pair(Om, c2, b);
    for (int a = 0; a < dim; ++a) {
        DenseForm t = dense_interior(a, rho);
        h.pf.push_back(Rational(-3) * top_coefficient(dense_wedge(t, dense_wedge(t, Om))) / top_coefficient(Om3));
    }
    return h;
}

// The same constant form as a graded element of a cotangent context.
inline GradedElement to_element(const ContextPtr& ctx, const DenseForm& f) {
    GradedElement u(ctx);
    const int r = ctx->r();
    for (const auto& [idx, v] : f.c) {
        std::vector<int> gens;
        for (int i : idx) gens.push_back(r + i);
        u += GradedElement::monomial(ctx, ScalarExpr(v), std::vector<std::uint8_t>(ctx->n(), 0), gens);
    }
    return u;
}

} // namespace gbx::testing
