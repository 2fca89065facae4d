// The sl(2) triple (ad_omega, ad'_pi, I) of an inverse pair and the
// Lepage decomposition into primitive pieces.
#pragma once

#include <vector>

#include "gbx/element.hpp"

namespace gbx {

class Sl2Frame {
public:
    // Throws Degenerate unless {pi, omega} is exactly the identity.
    Sl2Frame(GradedElement pi, GradedElement omega);

    const GradedElement& pi() const { return pi_; }
    const GradedElement& omega() const { return omega_; }

    GradedElement ad_omega(const GradedElement& u) const { return big_bracket(omega_, u); }
    GradedElement ad_pi_right(const GradedElement& u) const { return big_bracket(u, pi_); }
    // Multiplies every homogeneous component by its weight.
    GradedElement I(const GradedElement& u) const;

private:
    GradedElement pi_, omega_;
};

// q - p of a homogeneous element; NotHomogeneous otherwise.
int weight_of(const GradedElement& u);

struct PrimitivityResult {
    bool primitive;
    GradedElement residual;  // {u, pi}
};
PrimitivityResult is_primitive(const Sl2Frame& F, const GradedElement& u);

// u = sum_k ad_omega^k u_k with every u_k primitive.  Entry k is u_k
// (possibly zero).  SingularWeight when a needed divisor vanishes.
std::vector<GradedElement> lepage_decompose(const Sl2Frame& F, const GradedElement& u);
GradedElement lepage_reassemble(const Sl2Frame& F, const std::vector<GradedElement>& parts);

} // namespace gbx
