#include "gbx/sl2.hpp"

namespace gbx {

Sl2Frame::Sl2Frame(GradedElement pi, GradedElement omega) : pi_(std::move(pi)), omega_(std::move(omega)) {
    GradedElement id = GradedElement::identity(pi_.context());
    GradedElement res = big_bracket(pi_, omega_) - id;
    if (!res.is_zero()) throw ResidualError(ErrorCode::Degenerate, "{pi, omega} is not the identity", res);
}

GradedElement Sl2Frame::I(const GradedElement& u) const {
    GradedElement r(u.context());
    for (const auto& [b, comp] : u.components()) r += comp * ScalarExpr(static_cast<long>(b.weight()));
    return r;
}

int weight_of(const GradedElement& u) {
    auto b = u.bidegree();
    if (!b) throw Error(ErrorCode::NotHomogeneous, to_string(u));
    return b->weight();
}

PrimitivityResult is_primitive(const Sl2Frame& F, const GradedElement& u) {
    GradedElement r = F.ad_pi_right(u);
    return {r.is_zero(), r};
}

std::vector<GradedElement> lepage_decompose(const Sl2Frame& F, const GradedElement& u) {
    if (u.is_zero()) return {u};
    const int w = weight_of(u);
    // Highest k with ad'_pi^k u != 0 bounds the decomposition.
    std::vector<GradedElement> lowered{u};
    while (true) {
        GradedElement next = F.ad_pi_right(lowered.back());
        if (next.is_zero()) break;
        lowered.push_back(std::move(next));
        if (lowered.size() > 64) throw Error(ErrorCode::Unsupported, "lowering operator does not terminate");
    }
    const int kmax = static_cast<int>(lowered.size()) - 1;
    std::vector<GradedElement> parts(kmax + 1, GradedElement(u.context()));
    GradedElement rest = u;
    for (int k = kmax; k >= 1; --k) {
        // On ad_omega^k v with v primitive of weight wv, ad'_pi^k acts by
        // prod_{j=1..k} -j (wv + j - 1).
        const long wv = w - 2L * k;
        Rational c(1);
        for (long j = 1; j <= k; ++j) c *= Rational(-j * (wv + j - 1));
        GradedElement low = rest;
        for (int j = 0; j < k; ++j) low = F.ad_pi_right(low);
        if (low.is_zero()) continue;
        if (c == 0)
            throw ResidualError(ErrorCode::SingularWeight,
                                "divisor vanishes at k=" + std::to_string(k) + ", weight " + std::to_string(wv), low);
        c = 1 / c;
        parts[k] = low * ScalarExpr(c);
        GradedElement lifted = parts[k];
        for (int j = 0; j < k; ++j) lifted = F.ad_omega(lifted);
        rest -= lifted;
    }
    parts[0] = rest;
    return parts;
}

GradedElement lepage_reassemble(const Sl2Frame& F, const std::vector<GradedElement>& parts) {
    GradedElement sum(F.pi().context());
    for (std::size_t k = 0; k < parts.size(); ++k) {
        GradedElement t = parts[k];
        for (std::size_t j = 0; j < k; ++j) t = F.ad_omega(t);
        sum += t;
    }
    return sum;
}

} // namespace gbx
