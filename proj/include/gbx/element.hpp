// Elements of the bigraded Poisson algebra: sums of
// scalar * p-monomial * odd word, with the big bracket.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gbx/context.hpp"
#include "gbx/scalar.hpp"

namespace gbx {

// Odd word as a bit set over theta_0..theta_{r-1}, xi^0..xi^{r-1}
// (bit a is theta_a, bit r+a is xi^a); the canonical word lists the set
// bits in increasing order.
struct TermKey {
    std::uint32_t word = 0;
    std::vector<std::uint8_t> pexp;  // length n

    friend bool operator<(const TermKey& a, const TermKey& b) {
        if (a.word != b.word) return a.word < b.word;
        return a.pexp < b.pexp;
    }
    friend bool operator==(const TermKey& a, const TermKey& b) {
        return a.word == b.word && a.pexp == b.pexp;
    }
};

struct Bidegree {
    int p = 0, q = 0;  // shifted
    friend bool operator<(const Bidegree& a, const Bidegree& b) {
        return a.p != b.p ? a.p < b.p : a.q < b.q;
    }
    friend bool operator==(const Bidegree& a, const Bidegree& b) { return a.p == b.p && a.q == b.q; }
    int total() const { return p + q + 2; }
    int weight() const { return q - p; }
};

class GradedElement {
public:
    using TermMap = std::map<TermKey, ScalarExpr>;

    explicit GradedElement(ContextPtr ctx) : ctx_(std::move(ctx)) {}

    static GradedElement scalar(ContextPtr ctx, const ScalarExpr& c);
    static GradedElement coordinate(ContextPtr ctx, int i);  // x^i
    static GradedElement xi(ContextPtr ctx, int a);
    static GradedElement theta(ContextPtr ctx, int a);
    static GradedElement momentum(ContextPtr ctx, int i);  // p_i
    // c * p^pexp * (generators in the given order); generator g < r is
    // theta_g, g >= r is xi^{g-r}.  Repeats give zero.
    static GradedElement monomial(ContextPtr ctx, const ScalarExpr& c, std::vector<std::uint8_t> pexp,
                                  const std::vector<int>& generators);
    // The identity endomorphism sum_a xi^a theta_a.
    static GradedElement identity(ContextPtr ctx);

    const ContextPtr& context() const { return ctx_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    // Coefficient of a canonical term (zero when absent).
    ScalarExpr coefficient(const TermKey& k) const;
    ScalarExpr coefficient(std::uint32_t word) const;  // p-free term

    GradedElement operator-() const;
    GradedElement operator+(const GradedElement& o) const;
    GradedElement operator-(const GradedElement& o) const;
    GradedElement& operator+=(const GradedElement& o);
    GradedElement& operator-=(const GradedElement& o);
    GradedElement operator*(const ScalarExpr& c) const;
    GradedElement operator*(long c) const { return *this * ScalarExpr(c); }

    // Value equality.
    friend bool operator==(const GradedElement& a, const GradedElement& b);
    friend bool operator!=(const GradedElement& a, const GradedElement& b) { return !(a == b); }

    // Adds c to the coefficient of k (the accumulation primitive).
    void add_term(const TermKey& k, const ScalarExpr& c);
    void drop_zeros();

    // Shape predicates.
    bool is_scalar() const;       // only the empty word, no p
    bool is_multivector() const;  // theta words only, no p
    bool is_form() const;         // xi words only, no p
    bool is_p_free() const;

    // Decomposition into homogeneous components by shifted bidegree.
    std::map<Bidegree, GradedElement> components() const;
    std::optional<Bidegree> bidegree() const;  // when homogeneous (zero -> nullopt)
    GradedElement component(Bidegree b) const;

    // Apply f to every coefficient.
    template <class F>
    GradedElement map_coefficients(F f) const {
        GradedElement r(ctx_);
        for (const auto& [k, c] : terms_) r.add_term(k, f(c));
        r.drop_zeros();
        return r;
    }

private:
    ContextPtr ctx_;
    TermMap terms_;
};

inline GradedElement operator*(const ScalarExpr& c, const GradedElement& u) { return u * c; }

Bidegree term_bidegree(const TermKey& k, int r);
int term_degree(const TermKey& k);  // total degree 2|p| + |word|

// Sign (+1/-1) of concatenating disjoint canonical words w1 then w2; 0
// when they overlap.
int merge_sign(std::uint32_t w1, std::uint32_t w2);

void require_same_context(const GradedElement& u, const GradedElement& v);

GradedElement wedge(const GradedElement& u, const GradedElement& v);
GradedElement big_bracket(const GradedElement& u, const GradedElement& v);

// Shifted bidegree components with their total degrees.
struct BidegreeComponent {
    Bidegree bidegree;
    int total_degree;
    GradedElement component;
};
std::vector<BidegreeComponent> bidegree_of(const GradedElement& u);

// Derivative of every coefficient along base coordinate i.
GradedElement diff_coefficients(const GradedElement& u, int i);

std::string to_string(const GradedElement& u);
std::string word_string(const GradedContext& ctx, std::uint32_t word);

// An error that carries the offending residual so callers can inspect it.
class ResidualError : public Error {
public:
    ResidualError(ErrorCode code, const std::string& what, GradedElement residual)
        : Error(code, what + " (residual " + to_string(residual) + ")"), residual_(std::move(residual)) {}
    const GradedElement& residual() const { return residual_; }

private:
    GradedElement residual_;
};

} // namespace gbx
