// Bivector / 2-form / (1,1)-tensor calculus and the checks for composite
// structures built from them (PN, P-Omega, Omega-N, Hitchin pairs, ...).
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gbx/algebroid.hpp"

namespace gbx {

GradedElement sharp_apply(const GradedElement& pi, const GradedElement& alpha);   // {alpha, pi}
GradedElement flat_apply(const GradedElement& omega, const GradedElement& X);     // {omega, X}
GradedElement endo_from(const GradedElement& pi, const GradedElement& omega);     // {pi, omega}
GradedElement transpose_apply(const GradedElement& N, const GradedElement& alpha); // N* alpha = {N, alpha}

// Inverse pair: {invert_two_form(w), w} = Id.  Degenerate when the frame
// matrix is singular; NotInvertibleOnChart when its determinant may vanish
// on the chart.
GradedElement invert_two_form(const GradedElement& omega);
GradedElement invert_bivector(const GradedElement& pi);

// Frame-matrix forms of the algebraic side conditions.  Zero matrix means
// the condition holds.
Matrix skew_condition_residual(const GradedElement& pi, const GradedElement& N);  // N pi# - pi# N*
Matrix flat_condition_residual(const GradedElement& omega, const GradedElement& N);  // w-flat N - N* w-flat

GradedElement pi_N(const GradedElement& pi, const GradedElement& N);        // 1/2 {pi, N}
GradedElement omega_N(const GradedElement& omega, const GradedElement& N);  // 1/2 {N, omega}
// 2-form whose flat map is omega-flat o K.
GradedElement form_composed(const GradedElement& omega, const GradedElement& K);
// omega with {pi, omega} = N for nondegenerate pi, and pi with {pi, omega} = N
// for nondegenerate omega.
GradedElement form_from_endo(const GradedElement& pi, const GradedElement& N);
GradedElement bivector_from_endo(const GradedElement& omega, const GradedElement& N);

GradedElement poisson_residual(const AlgebroidStructure& A, const GradedElement& pi);  // {{pi,mu},pi}

// {pi,{N,mu}} + {N,{pi,mu}}; SkewConditionFails when N pi# != pi# N*.
GradedElement compatibility_tensor(const AlgebroidStructure& A, const GradedElement& pi, const GradedElement& N);

enum class CompositeKind { Poisson, Complementary, PN, POmega, OmegaN, HitchinPair, CompatiblePair };
std::string_view to_string(CompositeKind k);
std::optional<CompositeKind> composite_kind_from(std::string_view name);

struct Condition {
    std::string name;
    bool holds = false;
    std::string residual;  // printed residual ("0" when it holds)
};

struct StructureReport {
    CompositeKind kind;
    std::vector<Condition> conditions;
    bool verdict = false;
};

struct StructureData {
    std::optional<GradedElement> pi, pi1, omega, N;
};

// Evaluates every defining condition.  MissingTensor when the kind needs a
// tensor that was not supplied; SideConditionFails when the algebraic
// precondition fails.
StructureReport check_structure(const AlgebroidStructure& A, CompositeKind kind, const StructureData& data);

struct TildeStructure {
    GradedElement mu_tilde, mu1, mu2, self_bracket;
    FrameTable bracket_table;  // {{theta_a, mu~}, theta_b}
    FrameTable formula_table;  // [X,Y]^mu_N - pi#(i_{X^Y} d omega)
};
TildeStructure tilde_structure(const AlgebroidStructure& A, const GradedElement& pi, const GradedElement& omega);

struct TwistResult {
    GradedElement lambda;    // -(omega + 1/4 {N,{N,omega}})
    GradedElement residual;  // T_mu N - {sigma, d lambda}
};
TwistResult twist_form(const AlgebroidStructure& A, const GradedElement& omega, const GradedElement& N);

struct RecursionReport {
    GradedElement N, torsion, c_pi, c_pi1, eq_C, eq_C0, eq_C1;
};
// N = pi1# o (pi#)^{-1}.
RecursionReport recursion_operator(const AlgebroidStructure& A, const GradedElement& pi, const GradedElement& pi1);

// d_mu(Tr N); TorsionNonzero when N is not Nijenhuis.
GradedElement modular_cocycle(const AlgebroidStructure& A, const GradedElement& N);

} // namespace gbx
