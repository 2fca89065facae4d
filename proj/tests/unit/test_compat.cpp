#include <doctest.h>

#include "gbx/compat.hpp"
#include "gbx/monge_ampere.hpp"
#include "support.hpp"

using namespace gbx;
using gbx::testing::Rng;

namespace {

const ScalarExpr kHalf{Rational(1, 2)};

GradedElement bb(const GradedElement& a, const GradedElement& b) { return big_bracket(a, b); }

GradedElement constant_skew_bivector(Rng& rng, const ContextPtr& ctx) {
    return bivector_from(ctx, gbx::testing::random_skew(rng, ctx, ctx->r(), true));
}
GradedElement constant_skew_form(Rng& rng, const ContextPtr& ctx) {
    return form2_from(ctx, gbx::testing::random_skew(rng, ctx, ctx->r(), true));
}

// A constant nondegenerate 2-form on a rank-4 frame: Omega plus a random
// constant perturbation, retried until the determinant is nonzero.
GradedElement constant_symplectic(Rng& rng, const ContextPtr& ctx) {
    for (;;) {
        GradedElement w = canonical_symplectic(ctx) + constant_skew_form(rng, ctx);
        if (!form2_matrix(w).determinant().is_zero()) return w;
    }
}

bool holds(const StructureReport& r) { return r.verdict; }

// A failed algebraic precondition also counts as a failing check.
bool passes(const AlgebroidStructure& A, CompositeKind kind, const StructureData& d) {
    try {
        return check_structure(A, kind, d).verdict;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::SideConditionFails || e.code() == ErrorCode::SkewConditionFails) return false;
        throw;
    }
}

} // namespace

TEST_SUITE("compat") {

TEST_CASE("sharp and flat follow the coordinate formulas") {
    auto T = GradedContext::tangent({"x", "y", "z"});
    GradedElement th1 = GradedElement::theta(T, 0), th2 = GradedElement::theta(T, 1);
    GradedElement xi1 = GradedElement::xi(T, 0), xi2 = GradedElement::xi(T, 1);
    // pi^{ab} alpha_a theta_b with pi^{12} = 1.
    CHECK(sharp_apply(wedge(th1, th2), xi1) == th2);
    CHECK(sharp_apply(wedge(th1, th2), GradedElement(T)).is_zero());
    // -i_X omega with i_{theta_1}(xi^1 xi^2) = xi^2.
    CHECK(flat_apply(wedge(xi1, xi2), th1) == -xi2);
    CHECK(flat_apply(wedge(xi1, xi2), GradedElement(T)).is_zero());

    auto C = GradedContext::cotangent({"q1", "q2"});
    // Omega = dp1^dq1 + dp2^dq2; -i_{d/dq1} Omega = dp1.
    GradedElement Om = canonical_symplectic(C);
    CHECK(flat_apply(Om, GradedElement::theta(C, 0)) == GradedElement::xi(C, 2));
}

TEST_CASE("von Karman inverse bivector") {
    auto C = GradedContext::cotangent({"q1", "q2"}, {{"p1", 1}});
    GradedElement w = ma_instance("von_karman", C);
    GradedElement pw = invert_two_form(w);
    CHECK(endo_from(pw, w) == GradedElement::identity(C));
    const ScalarSpace& sp = C->space();
    ScalarExpr inv_p1 = ScalarExpr(1) / ScalarExpr::variable(sp, 2);
    GradedElement expected = wedge(GradedElement::theta(C, 2), GradedElement::theta(C, 1)) * inv_p1 -
                             wedge(GradedElement::theta(C, 3), GradedElement::theta(C, 0));
    CHECK(pw == expected);
    // dq1 pairs with the -d/dp2 ^ d/dq1 = d/dq1 ^ d/dp2 term.
    CHECK(sharp_apply(pw, GradedElement::xi(C, 0)) == GradedElement::theta(C, 3));
}

TEST_CASE("endomorphism of a pair") {
    Rng rng(40);
    auto T = GradedContext::tangent({"x", "y", "z"});
    for (int k = 0; k < 15; ++k) {
        GradedElement pi = bivector_from(T, gbx::testing::random_skew(rng, T, 3, false));
        GradedElement w = form2_from(T, gbx::testing::random_skew(rng, T, 3, false));
        GradedElement N = endo_from(pi, w);
        for (int a = 0; a < 3; ++a) {
            GradedElement X = GradedElement::theta(T, a);
            CHECK(bb(X, N) == sharp_apply(pi, flat_apply(w, X)));
        }
        // Matrix oracle: (pi# w-flat X)^b = -P(b,a) W(a,c) X^c.
        CHECK(endo_matrix(N) == -(bivector_matrix(pi) * form2_matrix(w)));
    }
    CHECK(endo_from(bivector_from(T, Matrix(3, 3)), form2_from(T, Matrix(3, 3))).is_zero());
}

TEST_CASE("inverse pairs") {
    Rng rng(41);
    auto C = GradedContext::cotangent({"q1", "q2"});
    GradedElement Om = canonical_symplectic(C);
    CHECK(endo_from(invert_two_form(Om), Om) == GradedElement::identity(C));
    for (int k = 0; k < 10; ++k) {
        GradedElement w = constant_symplectic(rng, C);
        GradedElement pi = invert_two_form(w);
        CHECK(endo_from(pi, w) == GradedElement::identity(C));
        CHECK(invert_bivector(pi) == w);
    }
    auto T = GradedContext::tangent({"x", "y", "z"});
    try {
        invert_two_form(wedge(GradedElement::xi(T, 0), GradedElement::xi(T, 1)));
        FAIL("expected Degenerate");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Degenerate);
    }
    auto P = GradedContext::tangent({"x", "y"});
    GradedElement xw = wedge(GradedElement::xi(P, 0), GradedElement::xi(P, 1)) * ScalarExpr::variable(P->space(), 0);
    try {
        invert_two_form(xw);
        FAIL("expected NotInvertibleOnChart");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotInvertibleOnChart);
    }
}

TEST_CASE("compatibility tensor examples") {
    Rng rng(42);
    auto C = GradedContext::cotangent({"q1", "q2"});
    AlgebroidStructure A = standard_structure(C);
    GradedElement pi = invert_two_form(constant_symplectic(rng, C));
    GradedElement id = GradedElement::identity(C);
    CHECK(compatibility_tensor(A, pi, id).is_zero());
    CHECK(compatibility_tensor(A, pi, id * ScalarExpr(Rational(-5, 2))).is_zero());
    GradedElement w = constant_skew_form(rng, C);
    CHECK(compatibility_tensor(A, pi, endo_from(pi, w)).is_zero());
    // A generic N breaks N pi# = pi# N*.
    Matrix M(4, 4);
    M(0, 1) = ScalarExpr(1);
    try {
        compatibility_tensor(A, pi, endo_from_matrix(C, M));
        FAIL("expected SkewConditionFails");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SkewConditionFails);
    }
}

TEST_CASE("composite structure examples") {
    Rng rng(43);
    auto C = GradedContext::cotangent({"q1", "q2"});
    AlgebroidStructure A = standard_structure(C);
    GradedElement Om = canonical_symplectic(C);
    GradedElement piOm = invert_two_form(Om);

    StructureReport r = check_structure(A, CompositeKind::POmega, {piOm, std::nullopt, ma_instance("laplace", C), std::nullopt});
    CHECK(r.verdict);
    for (const auto& c : r.conditions) CHECK_MESSAGE(c.holds, c.name);

    GradedElement pi = invert_two_form(constant_symplectic(rng, C));
    CHECK(holds(check_structure(A, CompositeKind::Complementary, {pi, std::nullopt, invert_bivector(pi), std::nullopt})));
    CHECK(holds(check_structure(A, CompositeKind::Poisson, {pi, std::nullopt, std::nullopt, std::nullopt})));

    CHECK_THROWS_AS(check_structure(A, CompositeKind::PN, {pi, std::nullopt, std::nullopt, std::nullopt}), Error);

    // {x,y} = 1, {y,z} = y: the Jacobiator on (x,y,z) is {x,y} = 1.
    auto T = GradedContext::tangent({"x", "y", "z"});
    AlgebroidStructure AT = standard_structure(T);
    GradedElement bad = wedge(GradedElement::theta(T, 1), GradedElement::theta(T, 2)) * ScalarExpr::variable(T->space(), 1) +
                        wedge(GradedElement::theta(T, 0), GradedElement::theta(T, 1));
    StructureReport nr = check_structure(AT, CompositeKind::Poisson, {bad, std::nullopt, std::nullopt, std::nullopt});
    CHECK_FALSE(nr.verdict);
    CHECK(nr.conditions[0].residual == to_string(poisson_residual(AT, bad)));
    CHECK_FALSE(poisson_residual(AT, bad).is_zero());
}

TEST_CASE("von Karman composites fail") {
    auto C = GradedContext::cotangent({"q1", "q2"}, {{"p1", 1}});
    AlgebroidStructure A = standard_structure(C);
    MA2Report R = analyze_2d(build_ma(ma_instance("von_karman", C)));
    REQUIRE(R.J);
    REQUIRE(R.omega_tilde);
    CHECK_FALSE(passes(A, CompositeKind::OmegaN, {std::nullopt, std::nullopt, *R.omega_tilde, *R.J}));
    CHECK_FALSE(passes(A, CompositeKind::PN, {invert_two_form(canonical_symplectic(C)), std::nullopt, std::nullopt, *R.J}));
}

TEST_CASE("identity lemmas on random instances") {
    Rng rng(44);
    auto T = GradedContext::tangent({"x", "y", "z", "w"});
    AlgebroidStructure A = standard_structure(T);
    const GradedElement& mu = A.mu;
    for (int k = 0; k < 12; ++k) {
        GradedElement pi = bivector_from(T, gbx::testing::random_skew(rng, T, 4, false));
        GradedElement w = form2_from(T, gbx::testing::random_skew(rng, T, 4, false));
        GradedElement N = endo_from(pi, w);
        GradedElement dmu_w = bb(mu, w);
        GradedElement dN_w = bb(bb(N, mu), w);
        GradedElement ww_pi = bb(bb(w, bb(pi, mu)), w);
        GradedElement pp = bb(bb(pi, mu), pi);
        // d_N = [i_N, d_mu] = d_{mu_N} on forms.
        CHECK(dN_w == bb(N, dmu_w) - bb(mu, bb(N, w)));
        // 1/2 [w,w]_pi + d_N w + d_mu(w_N) = 0 with w_N = 1/2 {N, w}.
        CHECK((ww_pi * kHalf + dN_w + bb(mu, omega_N(w, N))).is_zero());
        // {[pi,pi], w} = {{pi, d w}, pi} - C(pi, N) under graded skew-symmetry.
        CHECK(bb(pp, w) == bb(bb(pi, dmu_w), pi) - compatibility_tensor(A, pi, N));
        GradedElement rhs = bb(bb(bb(pi, dmu_w), pi), w) + bb(bb(pi, N), dmu_w) - bb(pi, dN_w) * 2 -
                            nijenhuis_torsion(A, N) * 4;
        CHECK(bb(bb(pp, w), w) == rhs);
        // N^2 = -1/2 {{N, sigma}, tau}.
        CHECK(endo_square(N) == bb(bb(N, pi), w) * (-kHalf));

        GradedElement psi = gbx::testing::random_homogeneous(rng, T, Bidegree{-1, 2}, 2, 1, 0);
        GradedElement X = vector_from(T, {gbx::testing::random_poly(rng, T, 1), ScalarExpr(0),
                                          gbx::testing::random_poly(rng, T, 1), ScalarExpr(1)});
        GradedElement Y = GradedElement::theta(T, k % 4) * gbx::testing::random_poly(rng, T, 1);
        CHECK(bb(bb(X, bb(psi, pi)), Y) == sharp_apply(pi, bb(bb(X, psi), Y)));
    }
}

TEST_CASE("implication diagram on constant instances") {
    Rng rng(45);
    auto C = GradedContext::cotangent({"q1", "q2"});
    AlgebroidStructure A = standard_structure(C);
    for (int k = 0; k < 6; ++k) {
        GradedElement w0 = constant_symplectic(rng, C);
        GradedElement pi = invert_two_form(w0);
        GradedElement w = constant_skew_form(rng, C);
        GradedElement N = endo_from(pi, w);
        StructureData d{pi, std::nullopt, w, N};
        REQUIRE(holds(check_structure(A, CompositeKind::POmega, d)));
        CHECK(holds(check_structure(A, CompositeKind::PN, d)));
        CHECK(holds(check_structure(A, CompositeKind::OmegaN, d)));
        CHECK(holds(check_structure(A, CompositeKind::Complementary, d)));
        // Nondegenerate omega: Omega-N gives back PN and P-Omega with pi from N.
        GradedElement wn = constant_symplectic(rng, C);
        GradedElement Nn = endo_from(invert_two_form(wn), constant_skew_form(rng, C));
        StructureData dn{std::nullopt, std::nullopt, wn, Nn};
        REQUIRE(holds(check_structure(A, CompositeKind::OmegaN, dn)));
        GradedElement pin = bivector_from_endo(wn, Nn);
        CHECK(endo_from(pin, wn) == Nn);
        CHECK(holds(check_structure(A, CompositeKind::PN, {pin, std::nullopt, std::nullopt, Nn})));
        CHECK(holds(check_structure(A, CompositeKind::POmega, {pin, std::nullopt, wn, Nn})));
    }
}

TEST_CASE("tilde structure") {
    Rng rng(46);
    auto C = GradedContext::cotangent({"q1", "q2"});
    AlgebroidStructure A = standard_structure(C);
    GradedElement pi = invert_two_form(constant_symplectic(rng, C));
    TildeStructure t = tilde_structure(A, pi, invert_bivector(pi));
    CHECK(t.mu_tilde == A.mu);
    CHECK(t.mu2.is_zero());
    GradedElement w = constant_skew_form(rng, C);
    TildeStructure t2 = tilde_structure(A, pi, w);
    CHECK(t2.mu2.is_zero());
    CHECK(t2.self_bracket.is_zero());
    for (std::size_t a = 0; a < t2.bracket_table.size(); ++a)
        for (std::size_t b = 0; b < t2.bracket_table.size(); ++b) CHECK(t2.bracket_table[a][b] == t2.formula_table[a][b]);
}

TEST_CASE("twist of a Hitchin pair") {
    Rng rng(47);
    auto C = GradedContext::cotangent({"q1", "q2"});
    AlgebroidStructure A = standard_structure(C);
    GradedElement w = constant_symplectic(rng, C);
    TwistResult z = twist_form(A, w, GradedElement(C));
    CHECK(z.lambda == -w);
    CHECK(z.residual.is_zero());
    GradedElement N = endo_from(invert_two_form(w), constant_skew_form(rng, C));
    REQUIRE(holds(check_structure(A, CompositeKind::HitchinPair, {std::nullopt, std::nullopt, w, N})));
    TwistResult t = twist_form(A, w, N);
    CHECK(t.residual.is_zero());
    CHECK(t.lambda == -(w + bb(N, bb(N, w)) * ScalarExpr(Rational(1, 4))));
}

TEST_CASE("recursion operators") {
    Rng rng(48);
    auto C = GradedContext::cotangent({"q1", "q2"});
    AlgebroidStructure A = standard_structure(C);
    GradedElement pi = invert_two_form(constant_symplectic(rng, C));
    auto check_all_zero = [](const RecursionReport& r) {
        CHECK(r.torsion.is_zero());
        CHECK(r.c_pi.is_zero());
        CHECK(r.c_pi1.is_zero());
        CHECK(r.eq_C.is_zero());
        CHECK(r.eq_C0.is_zero());
        CHECK(r.eq_C1.is_zero());
    };
    RecursionReport same = recursion_operator(A, pi, pi);
    CHECK(same.N == GradedElement::identity(C));
    check_all_zero(same);
    RecursionReport scaled = recursion_operator(A, pi, pi * 3);
    CHECK(scaled.N == GradedElement::identity(C) * 3);
    check_all_zero(scaled);
    GradedElement pi1 = invert_two_form(constant_symplectic(rng, C));
    check_all_zero(recursion_operator(A, pi, pi1));
    GradedElement zero(C);
    CHECK_THROWS_AS(recursion_operator(A, zero, pi), Error);
}

TEST_CASE("modular cocycle") {
    auto T = GradedContext::tangent({"x", "y", "z"});
    AlgebroidStructure A = standard_structure(T);
    CHECK(modular_cocycle(A, GradedElement::identity(T)).is_zero());
    const ScalarSpace& sp = T->space();
    ScalarExpr f = ScalarExpr::variable(sp, 0) * ScalarExpr::variable(sp, 1);
    GradedElement df = differential_apply(A, GradedElement::scalar(T, f));
    CHECK(modular_cocycle(A, GradedElement::identity(T) * f) == df * 3);
    Rng rng(49);
    auto C = GradedContext::cotangent({"q1", "q2"});
    for (int k = 0; k < 10; ++k) {
        MA2Report R = analyze_2d(build_ma(gbx::testing::random_effective_2d(rng, C)));
        CHECK(R.trace_A.is_zero());
    }
    // diag(1, x, 1): T(d/dx, d/dy) = (1 - x) d/dy.
    Matrix M = Matrix::identity(3);
    M(1, 1) = ScalarExpr::variable(sp, 0);
    GradedElement N = endo_from_matrix(T, M);
    REQUIRE_FALSE(nijenhuis_torsion(A, N).is_zero());
    try {
        modular_cocycle(A, N);
        FAIL("expected TorsionNonzero");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TorsionNonzero);
    }
}

} // TEST_SUITE
