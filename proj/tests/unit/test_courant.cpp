#include <doctest.h>

#include "gbx/compat.hpp"
#include "gbx/courant.hpp"
#include "gbx/monge_ampere.hpp"
#include "support.hpp"

using namespace gbx;
using gbx::testing::Rng;

namespace {

GradedElement bb(const GradedElement& a, const GradedElement& b) { return big_bracket(a, b); }

bool tables_equal(const FrameTable& a, const FrameTable& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j)
            if (a[i][j] != b[i][j]) return false;
    return true;
}

bool table_zero(const FrameTable& t) {
    for (const auto& row : t)
        for (const auto& e : row)
            if (!e.is_zero()) return false;
    return true;
}

// Generalized complex structure of a symplectic form: pi + omega with
// {pi, omega} = Id squares to -Id.
DoubleEndo symplectic_type(const GradedElement& omega) {
    return DoubleEndo::from_element(invert_two_form(omega) + omega);
}

// Generalized almost complex structure with polynomial blocks: the
// symplectic type of dx^dy conjugated by exp of a random 2-form B.
DoubleEndo random_almost_complex(Rng& rng, const ContextPtr& ctx) {
    GradedElement w = wedge(GradedElement::xi(ctx, 0), GradedElement::xi(ctx, 1)) * rng.small();
    GradedElement e = invert_two_form(w) + w;
    GradedElement B = form2_from(ctx, gbx::testing::random_skew(rng, ctx, ctx->r(), false));
    return DoubleEndo::from_element(e + bb(B, e) + bb(B, bb(B, e)) * ScalarExpr(Rational(1, 2)));
}

} // namespace

TEST_SUITE("courant-gcs") {

TEST_CASE("identity of the double") {
    auto T = GradedContext::tangent({"x", "y"});
    GradedElement mu = standard_mu(T);
    Matrix I = Matrix::identity(2), Z(2, 2);
    DoubleEndo id = DoubleEndo::from_blocks(T, I, Z, Z, I);
    CHECK_FALSE(id.orthogonal());
    CHECK(table_zero(courant_torsion_direct(mu, id)));
    CHECK_THROWS_AS(courant_torsion(mu, id), Error);
    CHECK_THROWS_AS(classify_generalized(mu, id), Error);
}

TEST_CASE("elementary classifications") {
    auto T = GradedContext::tangent({"x", "y"});
    GradedElement mu = standard_mu(T);
    DoubleEndo zero = DoubleEndo::from_element(GradedElement(T));
    GeneralizedReport z = classify_generalized(mu, zero);
    CHECK(z.kind == GeneralizedKind::Subtangent);
    CHECK(z.equals_zero);
    // The Euler element acts as +1 on vectors and -1 on forms.
    DoubleEndo euler = DoubleEndo::from_element(GradedElement::identity(T));
    CHECK(euler.apply(GradedElement::theta(T, 0)) == GradedElement::theta(T, 0));
    CHECK(euler.apply(GradedElement::xi(T, 1)) == -GradedElement::xi(T, 1));
    GeneralizedReport e = classify_generalized(mu, euler);
    CHECK(e.kind == GeneralizedKind::Product);
    CHECK(e.twisted == -mu);
    // The symplectic type squares to -Id.
    auto C = GradedContext::cotangent({"q1", "q2"});
    DoubleEndo J = symplectic_type(canonical_symplectic(C));
    REQUIRE(J.square_multiple());
    CHECK(*J.square_multiple() == ScalarExpr(-1));
    GeneralizedReport c = classify_generalized(standard_mu(C), J);
    CHECK(c.kind == GeneralizedKind::Complex);
    CHECK(table_zero(courant_torsion_direct(standard_mu(C), J)));
    // A non-orthogonal matrix and a square that is not a multiple of Id.
    Matrix I = Matrix::identity(2), Z(2, 2);
    CHECK_THROWS_AS(classify_generalized(mu, DoubleEndo::from_blocks(T, I, I, Z, Z)), Error);
    Matrix D(2, 2);
    D(0, 0) = ScalarExpr(1);
    try {
        classify_generalized(mu, DoubleEndo::from_element(endo_from_matrix(T, D)));
        FAIL("expected SquareMismatch");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::SquareMismatch);
    }
}

TEST_CASE("deformation by the Euler element weighs components") {
    auto T = GradedContext::tangent({"x", "y", "z"});
    GradedElement mu = standard_mu(T);
    auto th = [&](int a) { return GradedElement::theta(T, a); };
    auto xi = [&](int a) { return GradedElement::xi(T, a); };
    GradedElement psi = wedge(wedge(xi(0), xi(1)), xi(2)) * 2;
    GradedElement gamma = wedge(wedge(th(0), th(1)), xi(2));
    GradedElement phi = wedge(wedge(th(0), th(1)), th(2)) * ScalarExpr(Rational(-1, 3));
    DeformedStructure d = deform_courant(mu + gamma + psi + phi, DoubleEndo::from_element(GradedElement::identity(T)));
    CHECK(d.S_N == mu - gamma + psi * 3 - phi * 3);
}

TEST_CASE("torsion routes agree and the deformation identity") {
    Rng rng(60);
    auto C = GradedContext::cotangent({"q1", "q2"});
    GradedElement mu = standard_mu(C);
    std::vector<DoubleEndo> endos;
    for (int k = 0; k < 4; ++k) {
        GradedElement w = form2_from(C, gbx::testing::random_skew(rng, C, 4, true)) + canonical_symplectic(C);
        if (form2_matrix(w).determinant().is_zero()) continue;
        endos.push_back(symplectic_type(w));
    }
    auto Cv = GradedContext::cotangent({"q1", "q2"}, {{"p1", 1}});
    MA2Report R = analyze_2d(build_ma(ma_instance("von_karman", Cv)));
    REQUIRE(R.J);
    for (const auto& N : endos) {
        GradedElement T = courant_torsion(mu, N);
        CHECK(tables_equal(evaluate_on_double_frame(T), courant_torsion_direct(mu, N)));
        DeformedStructure d = deform_courant(mu, N);
        REQUIRE(d.identity_checked);
        // Graded Jacobi: 1/2 {S_N, S_N} = -{S, T}.
        CHECK(d.self_bracket * ScalarExpr(Rational(1, 2)) == -bb(mu, T));
        CHECK(d.identity_residual == bb(mu, T) * (-2));
    }
    // The complex structure J of a Monge-Ampere form with J^2 = -Id.
    DoubleEndo JJ = DoubleEndo::from_element(*R.J);
    GradedElement muv = standard_mu(Cv);
    GradedElement TJ = courant_torsion(muv, JJ);
    CHECK_FALSE(TJ.is_zero());
    CHECK(tables_equal(evaluate_on_double_frame(TJ), courant_torsion_direct(muv, JJ)));
    DeformedStructure dj = deform_courant(muv, JJ);
    CHECK_FALSE(dj.self_bracket.is_zero());
    CHECK(dj.self_bracket * ScalarExpr(Rational(1, 2)) == -bb(muv, TJ));
}

TEST_CASE("almost complex: Dorfman and Courant torsion tables coincide") {
    Rng rng(61);
    auto T = GradedContext::tangent({"x", "y"});
    GradedElement mu = standard_mu(T);
    for (int k = 0; k < 8; ++k) {
        DoubleEndo N = random_almost_complex(rng, T);
        REQUIRE(N.square_multiple());
        REQUIRE(*N.square_multiple() == ScalarExpr(-1));
        CHECK(tables_equal(courant_torsion_direct(mu, N, false), courant_torsion_direct(mu, N, true)));
    }
}

TEST_CASE("classification is invariant under a closed B-field") {
    Rng rng(62);
    auto C = GradedContext::cotangent({"q1", "q2"});
    AlgebroidStructure A = standard_structure(C);
    const ScalarSpace& sp = C->space();
    GradedElement B = differential_apply(
        A, form1_from(C, {ScalarExpr::variable(sp, 1) * ScalarExpr::variable(sp, 2), ScalarExpr(0), ScalarExpr(0),
                          ScalarExpr::variable(sp, 0)}));
    REQUIRE(bb(A.mu, B).is_zero());
    DoubleEndo J = symplectic_type(canonical_symplectic(C));
    GradedElement e = J.element();
    GradedElement eB = e + bb(B, e) + bb(B, bb(B, e)) * ScalarExpr(Rational(1, 2));
    GeneralizedReport before = classify_generalized(A.mu, J);
    GeneralizedReport after = classify_generalized(A.mu, DoubleEndo::from_element(eB));
    CHECK(before.kind == after.kind);
    CHECK(after.kind == GeneralizedKind::Complex);
}

} // TEST_SUITE
