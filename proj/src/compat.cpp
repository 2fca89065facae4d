#include "gbx/compat.hpp"

namespace gbx {

namespace {

const ScalarExpr kHalf{Rational(1, 2)};

void require_form1(const GradedElement& a) {
    if (!a.is_zero() && !is_form1(a)) throw Error(ErrorCode::WrongBidegree, "expected a 1-form, got " + to_string(a));
}
void require_vector(const GradedElement& a) {
    if (!a.is_zero() && !is_vector(a)) throw Error(ErrorCode::WrongBidegree, "expected a vector, got " + to_string(a));
}
void require_bivector(const GradedElement& a) {
    if (!a.is_zero() && !is_bivector(a))
        throw Error(ErrorCode::WrongBidegree, "expected a bivector, got " + to_string(a));
}
void require_form2(const GradedElement& a) {
    if (!a.is_zero() && !is_form2(a)) throw Error(ErrorCode::WrongBidegree, "expected a 2-form, got " + to_string(a));
}
void require_endo(const GradedElement& a) {
    if (!a.is_zero() && !is_endo(a))
        throw Error(ErrorCode::WrongBidegree, "expected a (1,1)-tensor, got " + to_string(a));
}

Matrix bivector_or_zero(const GradedElement& pi) {
    return pi.is_zero() ? Matrix(pi.context()->r(), pi.context()->r()) : bivector_matrix(pi);
}
Matrix form2_or_zero(const GradedElement& w) {
    return w.is_zero() ? Matrix(w.context()->r(), w.context()->r()) : form2_matrix(w);
}
Matrix endo_or_zero(const GradedElement& N) {
    return N.is_zero() ? Matrix(N.context()->r(), N.context()->r()) : endo_matrix(N);
}

// Inverse of a frame matrix whose determinant must not vanish on the chart.
Matrix chart_inverse(const Matrix& m, const ScalarSpace& sp, const char* what) {
    ScalarExpr det = m.determinant();
    if (det.is_zero()) throw Error(ErrorCode::Degenerate, std::string(what) + " is degenerate");
    if (!is_unit_on_chart(det, sp))
        throw Error(ErrorCode::NotInvertibleOnChart,
                    std::string(what) + " has determinant " + to_string(det, sp) + " which may vanish on the chart");
    return *m.inverse();
}

bool is_skew(const Matrix& m) { return (m + m.transpose()).is_zero(); }

std::string matrix_string(const Matrix& m, const ScalarSpace& sp) {
    std::string s = "[";
    for (int i = 0; i < m.rows(); ++i) {
        s += i ? "; " : "";
        for (int j = 0; j < m.cols(); ++j) s += (j ? ", " : "") + to_string(m(i, j), sp);
    }
    return s + "]";
}

Condition make_condition(std::string name, const GradedElement& residual) {
    return {std::move(name), residual.is_zero(), to_string(residual)};
}

} // namespace

GradedElement sharp_apply(const GradedElement& pi, const GradedElement& alpha) {
    require_bivector(pi);
    require_form1(alpha);
    return big_bracket(alpha, pi);
}

GradedElement flat_apply(const GradedElement& omega, const GradedElement& X) {
    require_form2(omega);
    require_vector(X);
    return big_bracket(omega, X);
}

GradedElement endo_from(const GradedElement& pi, const GradedElement& omega) {
    require_bivector(pi);
    require_form2(omega);
    return big_bracket(pi, omega);
}

GradedElement transpose_apply(const GradedElement& N, const GradedElement& alpha) {
    require_endo(N);
    require_form1(alpha);
    return big_bracket(N, alpha);
}

// The frame matrix of {pi, omega} is -P W.
GradedElement invert_two_form(const GradedElement& omega) {
    require_form2(omega);
    const ContextPtr& ctx = omega.context();
    Matrix W = form2_or_zero(omega);
    Matrix P = -chart_inverse(W, ctx->space(), "2-form");
    return bivector_from(ctx, P);
}

GradedElement invert_bivector(const GradedElement& pi) {
    require_bivector(pi);
    const ContextPtr& ctx = pi.context();
    Matrix P = bivector_or_zero(pi);
    Matrix W = -chart_inverse(P, ctx->space(), "bivector");
    return form2_from(ctx, W);
}

// pi# has frame matrix -P, omega-flat has W, N has M, N* has M^T.
Matrix skew_condition_residual(const GradedElement& pi, const GradedElement& N) {
    require_bivector(pi);
    require_endo(N);
    Matrix P = bivector_or_zero(pi), M = endo_or_zero(N);
    return M * P - P * M.transpose();
}

Matrix flat_condition_residual(const GradedElement& omega, const GradedElement& N) {
    require_form2(omega);
    require_endo(N);
    Matrix W = form2_or_zero(omega), M = endo_or_zero(N);
    return W * M - M.transpose() * W;
}

GradedElement pi_N(const GradedElement& pi, const GradedElement& N) { return big_bracket(pi, N) * kHalf; }

GradedElement omega_N(const GradedElement& omega, const GradedElement& N) { return big_bracket(N, omega) * kHalf; }

GradedElement form_composed(const GradedElement& omega, const GradedElement& K) {
    require_form2(omega);
    require_endo(K);
    Matrix m = form2_or_zero(omega) * endo_or_zero(K);
    if (!is_skew(m)) throw Error(ErrorCode::SideConditionFails, "omega-flat o K is not skew");
    return form2_from(omega.context(), m);
}

GradedElement form_from_endo(const GradedElement& pi, const GradedElement& N) {
    require_bivector(pi);
    require_endo(N);
    const ContextPtr& ctx = pi.context();
    Matrix P = bivector_or_zero(pi);
    Matrix W = -(chart_inverse(P, ctx->space(), "bivector") * endo_or_zero(N));
    if (!is_skew(W)) throw Error(ErrorCode::SkewConditionFails, "(pi#)^-1 o N is not skew");
    return form2_from(ctx, W);
}

GradedElement bivector_from_endo(const GradedElement& omega, const GradedElement& N) {
    require_form2(omega);
    require_endo(N);
    const ContextPtr& ctx = omega.context();
    Matrix W = form2_or_zero(omega);
    Matrix P = -(endo_or_zero(N) * chart_inverse(W, ctx->space(), "2-form"));
    if (!is_skew(P)) throw Error(ErrorCode::SideConditionFails, "N o (omega-flat)^-1 is not skew");
    return bivector_from(ctx, P);
}

GradedElement poisson_residual(const AlgebroidStructure& A, const GradedElement& pi) {
    return big_bracket(big_bracket(pi, A.mu), pi);
}

GradedElement compatibility_tensor(const AlgebroidStructure& A, const GradedElement& pi, const GradedElement& N) {
    Matrix skew = skew_condition_residual(pi, N);
    if (!skew.is_zero())
        throw Error(ErrorCode::SkewConditionFails,
                    "N pi# - pi# N* = " + matrix_string(skew, pi.context()->space()));
    return big_bracket(pi, big_bracket(N, A.mu)) + big_bracket(N, big_bracket(pi, A.mu));
}

std::string_view to_string(CompositeKind k) {
    switch (k) {
    case CompositeKind::Poisson: return "Poisson";
    case CompositeKind::Complementary: return "Complementary";
    case CompositeKind::PN: return "PN";
    case CompositeKind::POmega: return "POmega";
    case CompositeKind::OmegaN: return "OmegaN";
    case CompositeKind::HitchinPair: return "HitchinPair";
    case CompositeKind::CompatiblePair: return "CompatiblePair";
    }
    return "?";
}

std::optional<CompositeKind> composite_kind_from(std::string_view name) {
    for (CompositeKind k : {CompositeKind::Poisson, CompositeKind::Complementary, CompositeKind::PN,
                            CompositeKind::POmega, CompositeKind::OmegaN, CompositeKind::HitchinPair,
                            CompositeKind::CompatiblePair})
        if (to_string(k) == name) return k;
    return std::nullopt;
}

StructureReport check_structure(const AlgebroidStructure& A, CompositeKind kind, const StructureData& data) {
    auto need = [&](const std::optional<GradedElement>& t, const char* name) -> const GradedElement& {
        if (!t) throw Error(ErrorCode::MissingTensor, std::string(to_string(kind)) + " needs " + name);
        return *t;
    };
    const GradedElement& mu = A.mu;
    StructureReport rep{kind, {}, false};
    auto& cs = rep.conditions;
    auto torsion_box = [&](const GradedElement& N) {
        return big_bracket(N, big_bracket(N, mu)) - big_bracket(endo_square(N), mu);
    };
    auto flat_side = [&](const GradedElement& omega, const GradedElement& N) {
        Matrix r = flat_condition_residual(omega, N);
        if (!r.is_zero())
            throw Error(ErrorCode::SideConditionFails,
                        "omega-flat o N - N* o omega-flat = " + matrix_string(r, omega.context()->space()));
    };
    switch (kind) {
    case CompositeKind::Poisson: {
        const auto& pi = need(data.pi, "pi");
        require_bivector(pi);
        cs.push_back(make_condition("{{pi,mu},pi} = 0", poisson_residual(A, pi)));
        break;
    }
    case CompositeKind::Complementary: {
        const auto& pi = need(data.pi, "pi");
        const auto& omega = need(data.omega, "omega");
        require_bivector(pi);
        require_form2(omega);
        cs.push_back(make_condition("{{pi,mu},pi} = 0", poisson_residual(A, pi)));
        cs.push_back(make_condition("{{omega,{pi,mu}},omega} = 0",
                                    big_bracket(big_bracket(omega, big_bracket(pi, mu)), omega)));
        break;
    }
    case CompositeKind::PN: {
        const auto& pi = need(data.pi, "pi");
        const auto& N = need(data.N, "N");
        Matrix skew = skew_condition_residual(pi, N);
        if (!skew.is_zero())
            throw Error(ErrorCode::SideConditionFails,
                        "N pi# - pi# N* = " + matrix_string(skew, pi.context()->space()));
        cs.push_back(make_condition("{{pi,mu},pi} = 0", poisson_residual(A, pi)));
        cs.push_back(make_condition("{{pi,mu},N} + {{N,mu},pi} = 0",
                                    big_bracket(big_bracket(pi, mu), N) + big_bracket(big_bracket(N, mu), pi)));
        cs.push_back(make_condition("{N,{N,mu}} - {N^2,mu} = 0", torsion_box(N)));
        break;
    }
    case CompositeKind::POmega: {
        const auto& pi = need(data.pi, "pi");
        const auto& omega = need(data.omega, "omega");
        require_bivector(pi);
        require_form2(omega);
        cs.push_back(make_condition("{{pi,mu},pi} = 0", poisson_residual(A, pi)));
        cs.push_back(make_condition("{mu,omega} = 0", big_bracket(mu, omega)));
        cs.push_back(make_condition("{{{pi,omega},mu},omega} = 0",
                                    big_bracket(big_bracket(big_bracket(pi, omega), mu), omega)));
        break;
    }
    case CompositeKind::OmegaN: {
        const auto& omega = need(data.omega, "omega");
        const auto& N = need(data.N, "N");
        flat_side(omega, N);
        cs.push_back(make_condition("{mu,omega} = 0", big_bracket(mu, omega)));
        cs.push_back(make_condition("{N,{N,mu}} - {N^2,mu} = 0", torsion_box(N)));
        cs.push_back(make_condition("{mu,{N,omega}} = 0", big_bracket(mu, big_bracket(N, omega))));
        break;
    }
    case CompositeKind::HitchinPair: {
        const auto& omega = need(data.omega, "omega");
        const auto& N = need(data.N, "N");
        flat_side(omega, N);
        Condition nd{"omega nondegenerate", false, ""};
        ScalarExpr det = form2_or_zero(omega).determinant();
        nd.holds = !det.is_zero();
        nd.residual = "det = " + to_string(det, omega.context()->space());
        cs.push_back(nd);
        cs.push_back(make_condition("{mu,omega} = 0", big_bracket(mu, omega)));
        cs.push_back(make_condition("{mu,{N,omega}} = 0", big_bracket(mu, big_bracket(N, omega))));
        break;
    }
    case CompositeKind::CompatiblePair: {
        const auto& pi = need(data.pi, "pi");
        const auto& pi1 = need(data.pi1, "pi1");
        require_bivector(pi);
        require_bivector(pi1);
        cs.push_back(make_condition("{{pi,mu},pi} = 0", poisson_residual(A, pi)));
        cs.push_back(make_condition("{{pi1,mu},pi1} = 0", poisson_residual(A, pi1)));
        cs.push_back(make_condition("{{pi,mu},pi1} = 0", big_bracket(big_bracket(pi, mu), pi1)));
        break;
    }
    }
    rep.verdict = true;
    for (const auto& c : cs) rep.verdict = rep.verdict && c.holds;
    return rep;
}

TildeStructure tilde_structure(const AlgebroidStructure& A, const GradedElement& pi, const GradedElement& omega) {
    require_bivector(pi);
    require_form2(omega);
    const ContextPtr& ctx = A.context();
    const GradedElement& mu = A.mu;
    GradedElement N = big_bracket(pi, omega);
    TildeStructure t{big_bracket(big_bracket(pi, mu), omega), big_bracket(N, mu),
                     big_bracket(pi, big_bracket(mu, omega)), GradedElement(ctx), {}, {}};
    t.self_bracket = big_bracket(t.mu_tilde, t.mu_tilde);
    GradedElement dw = big_bracket(mu, omega);
    const int r = ctx->r();
    auto br = [&](const GradedElement& X, const GradedElement& Y) { return big_bracket(big_bracket(X, mu), Y); };
    auto apN = [&](const GradedElement& X) { return big_bracket(X, N); };
    t.bracket_table.assign(r, std::vector<GradedElement>(r, GradedElement(ctx)));
    t.formula_table = t.bracket_table;
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) {
            GradedElement X = GradedElement::theta(ctx, a), Y = GradedElement::theta(ctx, b);
            t.bracket_table[a][b] = big_bracket(big_bracket(X, t.mu_tilde), Y);
            GradedElement deformed = br(apN(X), Y) + br(X, apN(Y)) - apN(br(X, Y));
            GradedElement contracted = big_bracket(X, big_bracket(Y, dw));
            t.formula_table[a][b] = deformed - big_bracket(contracted, pi);
        }
    return t;
}

TwistResult twist_form(const AlgebroidStructure& A, const GradedElement& omega, const GradedElement& N) {
    require_form2(omega);
    require_endo(N);
    GradedElement sigma = invert_two_form(omega);
    GradedElement lambda = -(omega + big_bracket(N, big_bracket(N, omega)) * ScalarExpr(Rational(1, 4)));
    GradedElement res = nijenhuis_torsion(A, N) - big_bracket(sigma, big_bracket(A.mu, lambda));
    return {lambda, res};
}

RecursionReport recursion_operator(const AlgebroidStructure& A, const GradedElement& pi, const GradedElement& pi1) {
    require_bivector(pi);
    require_bivector(pi1);
    GradedElement omega = invert_bivector(pi);
    GradedElement r0 = poisson_residual(A, pi);
    if (!r0.is_zero()) throw ResidualError(ErrorCode::NotPoisson, "pi is not Poisson", r0);
    GradedElement r1 = poisson_residual(A, pi1);
    if (!r1.is_zero()) throw ResidualError(ErrorCode::NotPoisson, "pi1 is not Poisson", r1);
    const GradedElement& mu = A.mu;
    GradedElement N = big_bracket(pi1, omega);
    GradedElement piN = pi_N(pi, N);
    auto C = [&](const GradedElement& p) {
        return big_bracket(p, big_bracket(N, mu)) + big_bracket(N, big_bracket(p, mu));
    };
    return {N,
            nijenhuis_torsion(A, N),
            C(pi),
            C(pi1),
            big_bracket(big_bracket(mu, pi), N) + big_bracket(big_bracket(mu, N), pi),
            big_bracket(big_bracket(N, mu), omega),
            big_bracket(big_bracket(mu, piN), N) + big_bracket(big_bracket(mu, N), piN)};
}

GradedElement modular_cocycle(const AlgebroidStructure& A, const GradedElement& N) {
    require_endo(N);
    GradedElement T = nijenhuis_torsion(A, N);
    if (!T.is_zero()) throw ResidualError(ErrorCode::TorsionNonzero, "N is not Nijenhuis", T);
    GradedElement tr = GradedElement::scalar(A.context(), endo_or_zero(N).trace());
    return big_bracket(A.mu, tr);
}

} // namespace gbx
