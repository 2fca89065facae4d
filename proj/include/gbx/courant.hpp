// Endomorphisms of the double A + A*, their Dorfman torsion, and the
// complex / product / subtangent classification by {{N,S},N}.
#pragma once

#include <optional>
#include <string_view>

#include "gbx/algebroid.hpp"

namespace gbx {

// An endomorphism of the double in the frame (theta_0.., xi^0..), columns
// are images.  When it is orthogonal it is also carried as the quadratic
// element sigma + N + lambda acting by u -> {u, element}.
class DoubleEndo {
public:
    // From a quadratic p-free element; WrongBidegree otherwise.
    static DoubleEndo from_element(const GradedElement& e);
    // From the four r x r blocks (top-left, top-right, bottom-left,
    // bottom-right).  Non-orthogonal blocks are accepted and kept
    // matrix-only.
    static DoubleEndo from_blocks(const ContextPtr& ctx, const Matrix& tl, const Matrix& tr, const Matrix& bl,
                                  const Matrix& br);
    // Any 2r x 2r matrix.
    static DoubleEndo from_matrix(const ContextPtr& ctx, const Matrix& m);

    const ContextPtr& context() const { return ctx_; }
    const Matrix& matrix() const { return m_; }
    Matrix block(int row, int col) const;  // row, col in {0, 1}
    bool orthogonal() const { return element_.has_value(); }
    // The quadratic element; NotOrthogonal when there is none.
    const GradedElement& element() const;

    GradedElement apply(const GradedElement& section) const;
    // c with N^2 = c Id, if any.
    std::optional<ScalarExpr> square_multiple() const { return (m_ * m_).identity_multiple(); }

private:
    DoubleEndo(ContextPtr ctx, Matrix m, std::optional<GradedElement> e)
        : ctx_(std::move(ctx)), m_(std::move(m)), element_(std::move(e)) {}
    ContextPtr ctx_;
    Matrix m_;
    std::optional<GradedElement> element_;
};

// Frame of the double: index k < r is theta_k, otherwise xi^{k-r}.
GradedElement double_frame(const ContextPtr& ctx, int k);
std::vector<ScalarExpr> section_components(const GradedElement& u);

// 1/2({N,{N,S}} - {N^2,S}) with {c Id, S} read as c S.  SquareMismatch when
// N^2 is not a multiple of the identity, NotOrthogonal when N has no
// element form.
GradedElement courant_torsion(const GradedElement& S, const DoubleEndo& N);
// Table over the double frame of [Nu,Nv] - N([Nu,v] + [u,Nv]) + N^2[u,v]
// using the Dorfman bracket, or its skew-symmetrization when skew is set.
FrameTable courant_torsion_direct(const GradedElement& S, const DoubleEndo& N, bool skew = false);
// {{u,T},v} over the double frame.
FrameTable evaluate_on_double_frame(const GradedElement& T);

enum class GeneralizedKind { Complex, Product, Subtangent, None };
std::string_view to_string(GeneralizedKind k);

struct GeneralizedReport {
    GeneralizedKind kind = GeneralizedKind::None;
    ScalarExpr square;          // c with N^2 = c Id
    GradedElement twisted;      // {{N,S},N}
    bool equals_S = false, equals_minus_S = false, equals_zero = false;
};
// NotOrthogonal, SquareMismatch (square not -1, 1 or 0 times Id).
GeneralizedReport classify_generalized(const GradedElement& S, const DoubleEndo& N);

struct DeformedStructure {
    GradedElement S_N;          // {N, S}
    GradedElement self_bracket; // {S_N, S_N}
    GradedElement identity_residual;  // 1/2{S_N,S_N} - {S, T_S N}, when the torsion exists
    bool identity_checked = false;
};
DeformedStructure deform_courant(const GradedElement& S, const DoubleEndo& N);

} // namespace gbx
