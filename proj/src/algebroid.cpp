#include "gbx/algebroid.hpp"

#include <bit>

namespace gbx {

std::string_view to_string(StructureKind k) {
    switch (k) {
    case StructureKind::LieAlgebroid: return "LieAlgebroid";
    case StructureKind::TwistedLieAlgebroid: return "TwistedLieAlgebroid";
    case StructureKind::LieBialgebroid: return "LieBialgebroid";
    case StructureKind::LieQuasiBialgebroid: return "LieQuasiBialgebroid";
    case StructureKind::QuasiLieBialgebroid: return "QuasiLieBialgebroid";
    case StructureKind::ProtoBialgebroid: return "ProtoBialgebroid";
    }
    return "?";
}

AlgebroidStructure decompose_structure(const GradedElement& S) {
    const ContextPtr& ctx = S.context();
    AlgebroidStructure A{S, GradedElement(ctx), GradedElement(ctx), GradedElement(ctx), GradedElement(ctx),
                         GradedElement(ctx)};
    for (auto& [b, comp] : S.components()) {
        if (b == Bidegree{2, -1}) A.phi = comp;
        else if (b == Bidegree{0, 1}) A.mu = comp;
        else if (b == Bidegree{1, 0}) A.gamma = comp;
        else if (b == Bidegree{-1, 2}) A.psi = comp;
        else
            throw ResidualError(ErrorCode::WrongBidegree,
                                "structure component of shifted bidegree (" + std::to_string(b.p) + "," +
                                    std::to_string(b.q) + ")",
                                comp);
    }
    const bool g = !A.gamma.is_zero(), f = !A.phi.is_zero(), s = !A.psi.is_zero();
    if (!g && !f) A.kind = s ? StructureKind::TwistedLieAlgebroid : StructureKind::LieAlgebroid;
    else if (!f && !s) A.kind = StructureKind::LieBialgebroid;
    else if (!s) A.kind = StructureKind::LieQuasiBialgebroid;
    else if (!f) A.kind = StructureKind::QuasiLieBialgebroid;
    else A.kind = StructureKind::ProtoBialgebroid;
    A.residual = big_bracket(S, S);
    return A;
}

AlgebroidStructure validate_structure(const GradedElement& S) {
    AlgebroidStructure A = decompose_structure(S);
    if (!A.valid()) throw ResidualError(ErrorCode::NotAStructure, "{S,S} does not vanish", A.residual);
    return A;
}

GradedElement standard_mu(const ContextPtr& ctx) {
    if (ctx->n() != ctx->r())
        throw Error(ErrorCode::ContextMismatch, "the standard structure needs rank equal to the base dimension");
    GradedElement mu(ctx);
    for (int i = 0; i < ctx->n(); ++i) mu += wedge(GradedElement::momentum(ctx, i), GradedElement::xi(ctx, i));
    return mu;
}

AlgebroidStructure standard_structure(const ContextPtr& ctx) { return decompose_structure(standard_mu(ctx)); }

Background3Form make_background(const AlgebroidStructure& A, const GradedElement& H) {
    if (!is_k_form(H, 3) && !H.is_zero()) throw Error(ErrorCode::WrongBidegree, "background must be a 3-form");
    return {H, big_bracket(A.mu, H)};
}

GradedElement schouten_bracket(const AlgebroidStructure& A, const GradedElement& X, const GradedElement& Y) {
    if (!X.is_multivector()) throw Error(ErrorCode::NotAMultivector, to_string(X));
    if (!Y.is_multivector()) throw Error(ErrorCode::NotAMultivector, to_string(Y));
    return big_bracket(big_bracket(X, A.mu), Y);
}

GradedElement differential_apply(const AlgebroidStructure& A, const GradedElement& alpha) {
    if (!alpha.is_form()) throw Error(ErrorCode::NotAForm, to_string(alpha));
    return big_bracket(A.mu, alpha);
}

namespace {
void require_endo(const GradedElement& N) {
    if (!N.is_zero() && !is_endo(N))
        throw Error(ErrorCode::WrongBidegree, "expected a (1,1)-tensor, got " + to_string(N));
}
} // namespace

GradedElement deform(const AlgebroidStructure& A, const GradedElement& N) {
    require_endo(N);
    return big_bracket(N, A.mu);
}

GradedElement endo_compose(const GradedElement& N1, const GradedElement& N2) {
    require_same_context(N1, N2);
    if (N1.is_zero() || N2.is_zero()) return GradedElement(N1.context());
    return endo_from_matrix(N1.context(), endo_matrix(N1) * endo_matrix(N2));
}

GradedElement endo_square(const GradedElement& N) { return endo_compose(N, N); }

GradedElement nijenhuis_torsion(const AlgebroidStructure& A, const GradedElement& N) {
    require_endo(N);
    GradedElement r = big_bracket(N, big_bracket(N, A.mu)) - big_bracket(endo_square(N), A.mu);
    return r * ScalarExpr(Rational(1, 2));
}

FrameTable nijenhuis_torsion_direct(const AlgebroidStructure& A, const GradedElement& N) {
    require_endo(N);
    const ContextPtr& ctx = A.context();
    const int r = ctx->r();
    auto apply = [&](const GradedElement& X) { return big_bracket(X, N); };
    auto br = [&](const GradedElement& X, const GradedElement& Y) { return schouten_bracket(A, X, Y); };
    FrameTable t(r, std::vector<GradedElement>(r, GradedElement(ctx)));
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) {
            GradedElement X = GradedElement::theta(ctx, a), Y = GradedElement::theta(ctx, b);
            GradedElement NX = apply(X), NY = apply(Y);
            t[a][b] = br(NX, NY) - apply(br(NX, Y) + br(X, NY)) + apply(apply(br(X, Y)));
        }
    return t;
}

FrameTable evaluate_on_frame(const GradedElement& T) {
    const ContextPtr& ctx = T.context();
    const int r = ctx->r();
    FrameTable t(r, std::vector<GradedElement>(r, GradedElement(ctx)));
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b)
            t[a][b] = big_bracket(big_bracket(GradedElement::theta(ctx, a), T), GradedElement::theta(ctx, b));
    return t;
}

GradedElement torsion_squares_identity(const AlgebroidStructure& A, const GradedElement& N) {
    GradedElement muN = deform(A, N);
    return big_bracket(muN, muN) * ScalarExpr(Rational(1, 2)) - big_bracket(A.mu, nijenhuis_torsion(A, N));
}

bool is_section(const GradedElement& u) {
    if (!u.is_p_free()) return false;
    for (const auto& [k, c] : u.terms())
        if (std::popcount(k.word) != 1) return false;
    return true;
}

GradedElement vector_part(const GradedElement& u) {
    GradedElement r(u.context());
    const std::uint32_t mask = (1u << u.context()->r()) - 1u;
    for (const auto& [k, c] : u.terms())
        if (k.word & mask) r.add_term(k, c);
    return r;
}

GradedElement form_part(const GradedElement& u) { return u - vector_part(u); }

GradedElement dorfman_bracket(const AlgebroidStructure& A, const GradedElement& u, const GradedElement& v,
                              const std::optional<GradedElement>& H) {
    if (!is_section(u)) throw Error(ErrorCode::NotASection, to_string(u));
    if (!is_section(v)) throw Error(ErrorCode::NotASection, to_string(v));
    GradedElement S = A.mu + A.gamma;
    if (H) {
        if (!H->is_zero() && !is_k_form(*H, 3)) throw Error(ErrorCode::WrongBidegree, "background must be a 3-form");
        S += *H;
    }
    return big_bracket(big_bracket(u, S), v);
}

GradedElement gauge_transform(const GradedElement& B, const GradedElement& u) {
    if (!B.is_zero() && !is_form2(B)) throw Error(ErrorCode::WrongBidegree, "gauge field must be a 2-form");
    if (!is_section(u)) throw Error(ErrorCode::NotASection, to_string(u));
    return u + big_bracket(vector_part(u), B);
}

} // namespace gbx
