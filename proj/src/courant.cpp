#include "gbx/courant.hpp"

#include <bit>

namespace gbx {

namespace {

const ScalarExpr kHalf{Rational(1, 2)};

Matrix matrix_of_element(const GradedElement& e) {
    const ContextPtr& ctx = e.context();
    const int d = 2 * ctx->r();
    Matrix m(d, d);
    for (int k = 0; k < d; ++k) {
        auto col = section_components(big_bracket(double_frame(ctx, k), e));
        for (int i = 0; i < d; ++i) m(i, k) = col[i];
    }
    return m;
}

Matrix sub_block(const Matrix& m, int r, int row, int col) {
    Matrix b(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) b(i, j) = m(row * r + i, col * r + j);
    return b;
}

GradedElement section_from(const ContextPtr& ctx, const std::vector<ScalarExpr>& c) {
    GradedElement u(ctx);
    for (std::size_t k = 0; k < c.size(); ++k)
        if (!c[k].is_zero()) u += double_frame(ctx, static_cast<int>(k)) * c[k];
    return u;
}

GradedElement apply_matrix(const Matrix& m, const GradedElement& u) {
    auto c = section_components(u);
    std::vector<ScalarExpr> out(c.size());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (!m(i, j).is_zero() && !c[j].is_zero()) out[i] = out[i] + m(i, j) * c[j];
    return section_from(u.context(), out);
}

} // namespace

GradedElement double_frame(const ContextPtr& ctx, int k) {
    return k < ctx->r() ? GradedElement::theta(ctx, k) : GradedElement::xi(ctx, k - ctx->r());
}

std::vector<ScalarExpr> section_components(const GradedElement& u) {
    const int r = u.context()->r();
    std::vector<ScalarExpr> c(2 * r);
    if (!is_section(u) && !u.is_zero()) throw Error(ErrorCode::NotASection, to_string(u));
    for (const auto& [k, v] : u.terms()) c[std::countr_zero(k.word)] = v;
    return c;
}

DoubleEndo DoubleEndo::from_element(const GradedElement& e) {
    if (!e.is_p_free()) throw Error(ErrorCode::WrongBidegree, "endomorphism of the double must be p-free");
    for (const auto& [k, c] : e.terms())
        if (std::popcount(k.word) != 2)
            throw Error(ErrorCode::WrongBidegree, "endomorphism of the double must be quadratic, got " + to_string(e));
    return DoubleEndo(e.context(), matrix_of_element(e), e);
}

DoubleEndo DoubleEndo::from_matrix(const ContextPtr& ctx, const Matrix& m) {
    const int r = ctx->r();
    if (m.rows() != 2 * r || m.cols() != 2 * r)
        throw Error(ErrorCode::ContextMismatch, "block matrix has the wrong size");
    // The quadratic element acts with blocks (N, -P; -W, -N^T).
    GradedElement e = bivector_from(ctx, -sub_block(m, r, 0, 1)) + endo_from_matrix(ctx, sub_block(m, r, 0, 0)) +
                      form2_from(ctx, -sub_block(m, r, 1, 0));
    if (matrix_of_element(e) == m) return DoubleEndo(ctx, m, e);
    return DoubleEndo(ctx, m, std::nullopt);
}

DoubleEndo DoubleEndo::from_blocks(const ContextPtr& ctx, const Matrix& tl, const Matrix& tr, const Matrix& bl,
                                   const Matrix& br) {
    const int r = ctx->r();
    Matrix m(2 * r, 2 * r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            m(i, j) = tl(i, j);
            m(i, r + j) = tr(i, j);
            m(r + i, j) = bl(i, j);
            m(r + i, r + j) = br(i, j);
        }
    return from_matrix(ctx, m);
}

Matrix DoubleEndo::block(int row, int col) const { return sub_block(m_, ctx_->r(), row, col); }

const GradedElement& DoubleEndo::element() const {
    if (!element_) throw Error(ErrorCode::NotOrthogonal, "endomorphism of the double is not orthogonal");
    return *element_;
}

GradedElement DoubleEndo::apply(const GradedElement& section) const { return apply_matrix(m_, section); }

GradedElement courant_torsion(const GradedElement& S, const DoubleEndo& N) {
    const GradedElement& e = N.element();
    auto c = N.square_multiple();
    if (!c) throw Error(ErrorCode::SquareMismatch, "the square is not a multiple of the identity");
    return (big_bracket(e, big_bracket(e, S)) - S * *c) * kHalf;
}

FrameTable courant_torsion_direct(const GradedElement& S, const DoubleEndo& N, bool skew) {
    const ContextPtr& ctx = N.context();
    const int d = 2 * ctx->r();
    const Matrix sq = N.matrix() * N.matrix();
    auto br = [&](const GradedElement& u, const GradedElement& v) {
        GradedElement b = big_bracket(big_bracket(u, S), v);
        if (!skew) return b;
        return (b - big_bracket(big_bracket(v, S), u)) * kHalf;
    };
    FrameTable t(d, std::vector<GradedElement>(d, GradedElement(ctx)));
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
            GradedElement u = double_frame(ctx, k), v = double_frame(ctx, l);
            GradedElement Nu = N.apply(u), Nv = N.apply(v);
            t[k][l] = br(Nu, Nv) - N.apply(br(Nu, v) + br(u, Nv)) + apply_matrix(sq, br(u, v));
        }
    return t;
}

FrameTable evaluate_on_double_frame(const GradedElement& T) {
    const ContextPtr& ctx = T.context();
    const int d = 2 * ctx->r();
    FrameTable t(d, std::vector<GradedElement>(d, GradedElement(ctx)));
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
            t[k][l] = big_bracket(big_bracket(double_frame(ctx, k), T), double_frame(ctx, l));
    return t;
}

std::string_view to_string(GeneralizedKind k) {
    switch (k) {
    case GeneralizedKind::Complex: return "complex";
    case GeneralizedKind::Product: return "product";
    case GeneralizedKind::Subtangent: return "subtangent";
    case GeneralizedKind::None: return "none";
    }
    return "?";
}

GeneralizedReport classify_generalized(const GradedElement& S, const DoubleEndo& N) {
    const GradedElement& e = N.element();
    auto c = N.square_multiple();
    const bool known = c && c->is_constant() &&
                       (c->constant_value() == Rational(-1) || c->constant_value() == Rational(1) || c->is_zero());
    if (!known) throw Error(ErrorCode::SquareMismatch, "the square is not -Id, Id or 0");
    GeneralizedReport rep{GeneralizedKind::None, *c, big_bracket(big_bracket(e, S), e)};
    rep.equals_S = rep.twisted == S;
    rep.equals_minus_S = rep.twisted == -S;
    rep.equals_zero = rep.twisted.is_zero();
    if (c->is_zero()) {
        if (rep.equals_zero) rep.kind = GeneralizedKind::Subtangent;
    } else if (c->constant_value() == Rational(-1)) {
        if (rep.equals_S) rep.kind = GeneralizedKind::Complex;
    } else if (rep.equals_minus_S) {
        rep.kind = GeneralizedKind::Product;
    }
    return rep;
}

DeformedStructure deform_courant(const GradedElement& S, const DoubleEndo& N) {
    const GradedElement& e = N.element();
    DeformedStructure d{big_bracket(e, S), GradedElement(S.context()), GradedElement(S.context()), false};
    d.self_bracket = big_bracket(d.S_N, d.S_N);
    if (N.square_multiple()) {
        d.identity_residual = d.self_bracket * kHalf - big_bracket(S, courant_torsion(S, N));
        d.identity_checked = true;
    }
    return d;
}

} // namespace gbx
