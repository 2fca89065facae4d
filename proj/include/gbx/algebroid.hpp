// Lie algebroid and proto-bialgebroid structures and the brackets,
// differentials, deformations and torsions derived from them.
#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "gbx/tensor.hpp"

namespace gbx {

enum class StructureKind {
    LieAlgebroid,          // mu only
    TwistedLieAlgebroid,   // mu + closed 3-form
    LieBialgebroid,        // mu + gamma
    LieQuasiBialgebroid,   // psi = 0
    QuasiLieBialgebroid,   // phi = 0
    ProtoBialgebroid,
};
std::string_view to_string(StructureKind k);

struct AlgebroidStructure {
    GradedElement S;
    GradedElement phi, mu, gamma, psi;  // shifted (2,-1), (0,1), (1,0), (-1,2)
    GradedElement residual;             // {S,S}
    StructureKind kind = StructureKind::LieAlgebroid;

    bool valid() const { return residual.is_zero(); }
    const ContextPtr& context() const { return S.context(); }
};

// Splits S into its four components and records {S,S}; no validity demand.
AlgebroidStructure decompose_structure(const GradedElement& S);
// As above but throws NotAStructure (a ResidualError) when {S,S} != 0.
AlgebroidStructure validate_structure(const GradedElement& S);

// p_i xi^i on a context whose fiber is identified with the base tangent
// directions (requires n == r).
GradedElement standard_mu(const ContextPtr& ctx);
AlgebroidStructure standard_structure(const ContextPtr& ctx);

struct Background3Form {
    GradedElement H;
    GradedElement closedness;  // d_mu H
    bool closed() const { return closedness.is_zero(); }
};
Background3Form make_background(const AlgebroidStructure& A, const GradedElement& H);

GradedElement schouten_bracket(const AlgebroidStructure& A, const GradedElement& X, const GradedElement& Y);
GradedElement differential_apply(const AlgebroidStructure& A, const GradedElement& alpha);
GradedElement deform(const AlgebroidStructure& A, const GradedElement& N);  // {N, mu}

// Composition N1 o N2 of (1,1)-tensors acting by X -> {X, N}.
GradedElement endo_compose(const GradedElement& N1, const GradedElement& N2);
GradedElement endo_square(const GradedElement& N);

// 1/2 ({N,{N,mu}} - {N^2,mu}).
GradedElement nijenhuis_torsion(const AlgebroidStructure& A, const GradedElement& N);

// Values of the torsion on frame pairs, computed from brackets of sections:
// table[a][b] = T(theta_a, theta_b).
using FrameTable = std::vector<std::vector<GradedElement>>;
FrameTable nijenhuis_torsion_direct(const AlgebroidStructure& A, const GradedElement& N);
// The table of a vector-valued 2-form T on the frame, via T(u,v) = {{u,T},v}.
FrameTable evaluate_on_frame(const GradedElement& T);

// 1/2 {{N,mu},{N,mu}} - {mu, T_mu N}; vanishes for every N.
GradedElement torsion_squares_identity(const AlgebroidStructure& A, const GradedElement& N);

// Sections of the double: p-free sums of single theta or single xi terms.
bool is_section(const GradedElement& u);
GradedElement vector_part(const GradedElement& u);
GradedElement form_part(const GradedElement& u);

// {{u, mu + gamma (+ H)}, v}.
GradedElement dorfman_bracket(const AlgebroidStructure& A, const GradedElement& u, const GradedElement& v,
                              const std::optional<GradedElement>& H = std::nullopt);

// u -> u + i_X B where X is the vector part of u.
GradedElement gauge_transform(const GradedElement& B, const GradedElement& u);

} // namespace gbx
