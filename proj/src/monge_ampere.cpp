#include "gbx/monge_ampere.hpp"

#include <bit>
#include <map>
#include <mutex>

namespace gbx {

namespace {

const ScalarExpr kHalf{Rational(1, 2)};

std::uint32_t full_form_word(const GradedContext& ctx) { return ((1u << ctx.r()) - 1u) << ctx.r(); }

// Ratio of two top forms, or nullopt when the denominator vanishes.
std::optional<ScalarExpr> top_ratio(const GradedElement& num, const GradedElement& den) {
    const std::uint32_t w = full_form_word(*num.context());
    ScalarExpr d = den.coefficient(w);
    if (d.is_zero()) return std::nullopt;
    return num.coefficient(w) * d.inverse();
}

GradedElement xi_named(const ContextPtr& ctx, const std::string& name) {
    int a = ctx->fiber_index("d" + name);
    if (a < 0) throw Error(ErrorCode::UnknownCoordinate, name);
    return GradedElement::xi(ctx, a);
}

GradedElement wedge_all(std::initializer_list<GradedElement> fs) {
    auto it = fs.begin();
    GradedElement r = *it++;
    for (; it != fs.end(); ++it) r = wedge(r, *it);
    return r;
}


bool depends_on(const ScalarExpr& f, const ScalarSpace& sp, int idx) { return !diff(f, sp, idx).is_zero(); }

StructureReport guarded_check(const AlgebroidStructure& A, CompositeKind kind, const StructureData& data) {
    try {
        return check_structure(A, kind, data);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::SideConditionFails) throw;
        return {kind, {{"algebraic side condition", false, e.what()}}, false};
    }
}

std::optional<Rational> sample_value(const ScalarExpr& a, const ScalarSpace& sp,
                                     const std::optional<SamplePoint>& sample) {
    if (a.is_constant()) return a.constant_value();
    if (!sample) return std::nullopt;
    try {
        return eval(a, sp, *sample);
    } catch (const Error&) {
        return std::nullopt;
    }
}

GeneralizedVerdict verdict_for(std::string name, bool applicable, std::string note, const GradedElement& S,
                               const DoubleEndo& N) {
    GeneralizedVerdict v{std::move(name), applicable, std::move(note), std::nullopt, false};
    try {
        v.report = classify_generalized(S, N);
        v.torsion_free = courant_torsion(S, N).is_zero();
    } catch (const Error& e) {
        v.note += (v.note.empty() ? "" : "; ") + std::string(e.what());
    }
    return v;
}

} // namespace

GradedElement canonical_symplectic(const ContextPtr& ctx) {
    const int m = ctx->n() / 2;
    GradedElement O(ctx);
    for (int i = 0; i < m; ++i) O += wedge(GradedElement::xi(ctx, m + i), GradedElement::xi(ctx, i));
    return O;
}

MAStructure build_ma(const GradedElement& omega, std::optional<SamplePoint> sample) {
    const ContextPtr& ctx = omega.context();
    const int m = ctx->n() / 2;
    if (!ctx->is_tangent() || ctx->n() % 2 != 0 || (m != 2 && m != 3))
        throw Error(ErrorCode::WrongDegree, "Monge-Ampere structures need T*M with dim M = 2 or 3");
    if (!omega.is_zero() && !is_k_form(omega, m))
        throw Error(ErrorCode::WrongDegree, "expected a " + std::to_string(m) + "-form, got " + to_string(omega));
    MAStructure S{ctx, m, canonical_symplectic(ctx), GradedElement(ctx), omega, GradedElement(ctx), std::move(sample)};
    S.pi_Omega = invert_two_form(S.Omega);
    S.effectivity = wedge(omega, S.Omega);
    return S;
}

GradedElement restrict_to_graph(const GradedElement& form, const std::vector<std::pair<int, ScalarExpr>>& graph) {
    const ContextPtr& ctx = form.context();
    const ScalarSpace& sp = ctx->space();
    if (!form.is_zero() && !form.is_form()) throw Error(ErrorCode::NotAForm, to_string(form));
    const int r = ctx->r();
    std::map<int, GradedElement> diffs;
    for (const auto& [i, f] : graph) {
        for (const auto& [j, g] : graph) {
            (void)g;
            if (depends_on(f, sp, j))
                throw Error(ErrorCode::NotABaseFunction,
                            to_string(f, sp) + " depends on " + ctx->base()[j]);
        }
        GradedElement df(ctx);
        for (int j = 0; j < r; ++j) {
            ScalarExpr c = diff(f, sp, j);
            if (!c.is_zero()) df += GradedElement::xi(ctx, j) * c;
        }
        diffs.emplace(i, df);
    }
    GradedElement out(ctx);
    for (const auto& [k, c] : form.terms()) {
        ScalarExpr coeff = c;
        for (const auto& [i, f] : graph) coeff = substitute(coeff, sp, i, f);
        GradedElement t = GradedElement::scalar(ctx, coeff);
        for (int a = 0; a < r; ++a) {
            if (!(k.word & (1u << (r + a)))) continue;
            auto it = diffs.find(a);
            t = wedge(t, it != diffs.end() ? it->second : GradedElement::xi(ctx, a));
        }
        out += t;
    }
    return out;
}

GradedElement ma_operator_apply(const MAStructure& S, const ScalarExpr& f) {
    const ScalarSpace& sp = S.ctx->space();
    for (int i = 0; i < S.n; ++i)
        if (depends_on(f, sp, S.n + i))
            throw Error(ErrorCode::NotABaseFunction, to_string(f, sp) + " depends on " + S.ctx->base()[S.n + i]);
    std::vector<std::pair<int, ScalarExpr>> graph;
    for (int i = 0; i < S.n; ++i) graph.emplace_back(S.n + i, diff(f, sp, i));
    return restrict_to_graph(S.omega, graph);
}

int decided_sign(const ScalarExpr& a, const ScalarSpace& sp, const std::optional<SamplePoint>& sample) {
    if (a.is_zero()) return 0;
    if (int s = chart_sign(a, sp)) return s;
    auto v = sample_value(a, sp, sample);
    if (!v || *v == 0) return 0;
    return *v > 0 ? 1 : -1;
}

// ------------------------------------------------------------------ 2-D

MA2Report analyze_2d(const MAStructure& S) {
    if (S.n != 2) throw Error(ErrorCode::WrongDegree, "analyze_2d needs dim M = 2");
    const ContextPtr& ctx = S.ctx;
    const ScalarSpace& sp = ctx->space();
    const AlgebroidStructure mu = standard_structure(ctx);
    const GradedElement id = GradedElement::identity(ctx);
    MA2Report R(ctx);
    R.A = endo_from(S.pi_Omega, S.omega);
    R.pf = *top_ratio(wedge(S.omega, S.omega), wedge(S.Omega, S.Omega));
    R.pf_residual = endo_square(R.A) + id * R.pf;
    R.pf_sign = decided_sign(R.pf, sp, S.sample);
    R.type = R.pf_sign > 0 ? "elliptic" : R.pf_sign < 0 ? "hyperbolic" : "degenerate-locus";
    const Matrix MA = R.A.is_zero() ? Matrix(4, 4) : endo_matrix(R.A);
    R.trace_A = MA.trace();
    R.unimodular = R.trace_A.is_zero();
    R.d_omega = differential_apply(mu, S.omega);

    // beta ^ Omega = -d omega; wedge with Omega is injective on 1-forms here.
    {
        Matrix L(4, 4);
        std::vector<std::uint32_t> words;
        for (int a = 0; a < 4; ++a) words.push_back(full_form_word(*ctx) & ~(1u << (4 + a)));
        for (int a = 0; a < 4; ++a) {
            GradedElement w = wedge(GradedElement::xi(ctx, a), S.Omega);
            for (int k = 0; k < 4; ++k) L(k, a) = w.coefficient(words[k]);
        }
        std::vector<ScalarExpr> rhs(4);
        for (int k = 0; k < 4; ++k) rhs[k] = -R.d_omega.coefficient(words[k]);
        auto b = L.solve(rhs);
        if (b) {
            GradedElement beta = form1_from(ctx, *b);
            R.divergence_beta = beta;
            R.divergence_type = differential_apply(mu, beta).is_zero();
        }
    }

    if (R.pf_sign != 0) R.sqrt_abs_pf = sqrt_abs_monomial(R.pf, sp);
    if (R.sqrt_abs_pf) {
        const ScalarExpr inv = R.sqrt_abs_pf->inverse();
        R.omega_tilde = S.omega * inv;
        R.d_omega_tilde = differential_apply(mu, *R.omega_tilde);
        R.integrable = R.d_omega_tilde->is_zero();
        try {
            R.pi_omega_tilde = invert_two_form(*R.omega_tilde);
        } catch (const Error&) {
        }
        R.J = R.A * inv;
        R.J_square_residual = endo_square(*R.J) + id * ScalarExpr(R.pf_sign);
        R.J_torsion = nijenhuis_torsion(mu, *R.J);
    }

    StructureData omegaA;
    omegaA.omega = S.Omega;
    omegaA.N = R.A;
    R.composites.push_back(guarded_check(mu, CompositeKind::HitchinPair, omegaA));
    if (R.J && R.omega_tilde) {
        StructureData pn;
        pn.pi = S.pi_Omega;
        pn.N = *R.J;
        R.composites.push_back(guarded_check(mu, CompositeKind::PN, pn));
        if (R.pi_omega_tilde) {
            pn.pi = *R.pi_omega_tilde;
            R.composites.push_back(guarded_check(mu, CompositeKind::PN, pn));
        }
        StructureData po;
        po.pi = S.pi_Omega;
        po.omega = *R.omega_tilde;
        R.composites.push_back(guarded_check(mu, CompositeKind::POmega, po));
        StructureData on;
        on.omega = *R.omega_tilde;
        on.N = *R.J;
        R.composites.push_back(guarded_check(mu, CompositeKind::OmegaN, on));
    }

    // Generalized structures on the double, all with S = mu.
    const Matrix P = bivector_matrix(S.pi_Omega), W = form2_matrix(S.Omega);
    const Matrix sharp = -P, I4 = Matrix::identity(4);
    {
        Matrix bl = -(W * (I4 + MA * MA));
        auto N = DoubleEndo::from_blocks(ctx, MA, sharp, bl, -MA.transpose());
        const bool app = R.pf_sign != 0 && R.divergence_type;
        R.generalized.push_back(verdict_for("calJ", app, app ? "" : "needs a nondegenerate structure of divergence type",
                                            mu.S, N));
    }
    if (R.J) {
        const Matrix MJ = endo_matrix(*R.J);
        auto N = DoubleEndo::from_element(S.pi_Omega + *R.J);
        const bool app = R.integrable && R.pf_sign > 0;
        R.generalized.push_back(
            verdict_for("bbJ", app, app ? "" : "needs an elliptic structure with closed normalized form", mu.S, N));
        auto Np = DoubleEndo::from_blocks(ctx, MJ, sharp, -(W * ScalarExpr(2)), -MJ.transpose());
        const bool appp = R.integrable && R.pf_sign < 0;
        R.generalized.push_back(verdict_for("bbJprime", appp,
                                            appp ? "" : "needs a hyperbolic structure with closed normalized form",
                                            mu.S, Np));
    }
    return R;
}

// ------------------------------------------------------------------ 3-D

Matrix hitchin_endomorphism(const MAStructure& S) {
    const ContextPtr& ctx = S.ctx;
    const int r = ctx->r();
    GradedElement vol = wedge(S.Omega, wedge(S.Omega, S.Omega)) * ScalarExpr(Rational(-1, 6));
    const std::uint32_t full = full_form_word(*ctx);
    Matrix H(r, r);
    for (int a = 0; a < r; ++a) {
        GradedElement five = wedge(big_bracket(GradedElement::theta(ctx, a), S.omega), S.omega);
        for (int b = 0; b < r; ++b) {
            const std::uint32_t w = full & ~(1u << (r + b));
            ScalarExpr s = big_bracket(GradedElement::theta(ctx, b), vol).coefficient(w);
            H(b, a) = five.coefficient(w) * s.inverse();
        }
    }
    return H;
}

ScalarExpr modified_pfaffian(const MAStructure& S, const GradedElement& tau) {
    GradedElement O3 = wedge(S.Omega, wedge(S.Omega, S.Omega));
    return *top_ratio(wedge(tau, wedge(tau, S.Omega)), O3) * ScalarExpr(-3);
}

namespace {

struct Core3 {
    Matrix H, q;
    ScalarExpr lambda;
    int sign = 0;
    std::optional<Inertia> inertia;
};

Core3 core3(const MAStructure& S) {
    const ScalarSpace& sp = S.ctx->space();
    Core3 c;
    c.H = hitchin_endomorphism(S);
    c.lambda = (c.H * c.H).trace() * ScalarExpr(Rational(1, 6));
    c.q = c.H.transpose() * form2_matrix(S.Omega);
    c.sign = decided_sign(c.lambda, sp, S.sample);
    const int r = S.ctx->r();
    std::vector<std::vector<Rational>> qv(r, std::vector<Rational>(r));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            auto v = sample_value(c.q(i, j), sp, S.sample);
            if (!v) return c;
            qv[i][j] = *v;
        }
    c.inertia = inertia(qv);
    return c;
}

struct OrbitSignature {
    std::string name;
    int sign;
    Inertia inertia;
};

const std::vector<OrbitSignature>& normal_form_signatures() {
    static std::vector<OrbitSignature> table;
    static std::once_flag once;
    std::call_once(once, [] {
        for (const char* name : {"hess", "sl", "pssl"}) {
            Core3 c = core3(build_ma(ma_instance(name)));
            table.push_back({name, c.sign, *c.inertia});
        }
    });
    return table;
}

} // namespace

MA3Report analyze_3d(const MAStructure& S) {
    if (S.n != 3) throw Error(ErrorCode::WrongDegree, "analyze_3d needs dim M = 3");
    if (!S.effective())
        throw ResidualError(ErrorCode::EffectivityRequired, "omega ^ Omega does not vanish", S.effectivity);
    const ContextPtr& ctx = S.ctx;
    Core3 c = core3(S);
    MA3Report R{wedge(S.Omega, wedge(S.Omega, S.Omega)) * ScalarExpr(Rational(-1, 6)), c.H,
                endo_from_matrix(ctx, c.H), c.lambda, c.H * c.H - Matrix::identity(6) * c.lambda, c.q, c.sign,
                c.inertia, "undecided", {}, false};
    if (c.lambda.is_zero()) R.orbit = "degenerate";
    else if (c.sign != 0 && c.inertia) {
        // Normal forms sharing the invariants are all listed, joined by '|'.
        std::string hits;
        for (const auto& o : normal_form_signatures())
            if (o.sign == c.sign && o.inertia == *c.inertia) hits += (hits.empty() ? "" : "|") + o.name;
        R.orbit = hits.empty() ? "unmatched" : hits;
    }
    R.pf_matches_q = true;
    for (int a = 0; a < ctx->r(); ++a) {
        R.pf_frame.push_back(modified_pfaffian(S, big_bracket(GradedElement::theta(ctx, a), S.omega)));
        R.pf_matches_q = R.pf_matches_q && R.pf_frame.back() == c.q(a, a);
    }
    return R;
}

Generalized3D generalized_structure_3d(const MAStructure& S) {
    if (S.n != 3) throw Error(ErrorCode::WrongDegree, "generalized_structure_3d needs dim M = 3");
    const ContextPtr& ctx = S.ctx;
    const AlgebroidStructure A = standard_structure(ctx);
    GradedElement dw = differential_apply(A, S.omega);
    if (!dw.is_zero()) throw ResidualError(ErrorCode::NotClosed, "omega is not closed", dw);
    MA3Report rep = analyze_3d(S);
    auto lv = rep.lambda.constant_value();
    std::optional<ScalarExpr> root;
    if (lv && *lv != 0) root = sqrt_abs_monomial(rep.lambda, ctx->space());
    if (!root)
        throw Error(ErrorCode::PfaffianNotUnit, "the Hitchin Pfaffian " + to_string(rep.lambda, ctx->space()) +
                                                    " cannot be normalized to 1 or -1");
    const ScalarExpr scale = root->inverse();
    const GradedElement H = rep.H_endo * scale;
    const GradedElement& pi = S.pi_Omega;
    const GradedElement& mu = A.mu;
    const GradedElement& w = S.omega;
    auto ad = [&](const GradedElement& u) { return big_bracket(pi, u); };
    const GradedElement H2 = endo_square(H);
    Generalized3D G{DoubleEndo::from_element(pi + H), mu + w, GradedElement(ctx), scale, H, std::nullopt,
                    std::nullopt, "", {}};
    G.S_self = big_bracket(G.S, G.S);
    G.square = G.J.square_multiple();
    try {
        G.classification = classify_generalized(G.S, G.J);
    } catch (const Error& e) {
        G.note = e.what();
    }
    G.residuals.emplace_back("ad_pi^2 mu", ad(ad(mu)));
    G.residuals.emplace_back("{ad_pi mu, H} - ad_pi {H, mu} - ad_pi^2 omega",
                             big_bracket(ad(mu), H) - ad(big_bracket(H, mu)) - ad(ad(w)));
    G.residuals.emplace_back("{{H,mu},H} + {ad_pi omega, H} - ad_pi {H, omega} + {H^2, mu}",
                             big_bracket(big_bracket(H, mu), H) + big_bracket(ad(w), H) - ad(big_bracket(H, w)) +
                                 big_bracket(H2, mu));
    G.residuals.emplace_back("{{H,omega},H} + {H^2, omega}",
                             big_bracket(big_bracket(H, w), H) + big_bracket(H2, w));
    return G;
}

// ------------------------------------------------------------------ Jacobi

JacobiSystem make_jacobi(const GradedElement& omega1, const GradedElement& omega2) {
    require_same_context(omega1, omega2);
    const ContextPtr& ctx = omega1.context();
    if (!ctx->is_tangent() || ctx->n() != 4)
        throw Error(ErrorCode::WrongDegree, "Jacobi systems live on the tangent bundle of a 4-dimensional space");
    for (const auto* w : {&omega1, &omega2})
        if (!w->is_zero() && !is_form2(*w)) throw Error(ErrorCode::WrongDegree, "expected 2-forms");
    return {ctx, omega1, omega2};
}

JacobiReport jacobi_analyze(const JacobiSystem& J) {
    const ContextPtr& ctx = J.ctx;
    const ScalarSpace& sp = ctx->space();
    const AlgebroidStructure mu = standard_structure(ctx);
    JacobiReport R(ctx);
    R.wedge12 = wedge(J.omega1, J.omega2);
    R.epsilon = top_ratio(wedge(J.omega1, J.omega1), wedge(J.omega2, J.omega2));
    if (!R.epsilon || R.epsilon->is_zero()) throw Error(ErrorCode::DegenerateForm, "a form of the system is degenerate");
    R.nondegenerate = R.wedge12.is_zero() && (R.epsilon->is_constant() || is_unit_on_chart(*R.epsilon, sp));
    const Matrix W1 = form2_matrix(J.omega1), W2 = form2_matrix(J.omega2);
    auto W1i = W1.inverse();
    if (!W1i) throw Error(ErrorCode::DegenerateForm, "omega1 is degenerate");
    R.A = *W1i * W2;
    R.A_square_residual = R.A * R.A - Matrix::identity(4) * *R.epsilon;
    try {
        R.pi1 = invert_two_form(J.omega1);
        R.pi2 = invert_two_form(J.omega2);
    } catch (const Error& e) {
        throw Error(ErrorCode::DegenerateForm, e.what());
    }
    GradedElement s11 = schouten_bracket(mu, R.pi1, R.pi1), s22 = schouten_bracket(mu, R.pi2, R.pi2);
    R.bihamilt_self = s11 - s22;
    R.bihamilt_mixed = schouten_bracket(mu, R.pi1, R.pi2);
    R.hitchin_pair = R.bihamilt_self.is_zero() && R.bihamilt_mixed.is_zero();
    auto ev = R.epsilon->constant_value();
    if (ev && (*ev == Rational(1) || *ev == Rational(-1)) && R.hitchin_pair && s11.is_zero()) {
        StructureData d;
        d.pi = R.pi1;
        d.N = big_bracket(R.pi2, J.omega1);
        R.pn = guarded_check(mu, CompositeKind::PN, d);
    }
    return R;
}

std::pair<GradedElement, GradedElement> jacobi_operator_apply(const JacobiSystem& J, const ScalarExpr& u,
                                                              const ScalarExpr& v) {
    std::vector<std::pair<int, ScalarExpr>> graph{{2, u}, {3, v}};
    return {restrict_to_graph(J.omega1, graph), restrict_to_graph(J.omega2, graph)};
}

// ------------------------------------------------------------------ instances

std::vector<std::string> ma_instance_names() { return {"laplace", "wave", "von_karman", "hess", "sl", "pssl"}; }

GradedElement ma_instance(const std::string& name, ContextPtr ctx) {
    const bool three = name == "hess" || name == "sl" || name == "pssl";
    if (!ctx) {
        if (three) ctx = GradedContext::cotangent({"q1", "q2", "q3"});
        else if (name == "von_karman") ctx = GradedContext::cotangent({"q1", "q2"}, {{"p1", 1}});
        else ctx = GradedContext::cotangent({"q1", "q2"});
    }
    auto d = [&](const char* s) { return xi_named(ctx, s); };
    if (name == "laplace") return wedge(d("p1"), d("q2")) - wedge(d("p2"), d("q1"));
    if (name == "wave") return wedge(d("p1"), d("q2")) + wedge(d("p2"), d("q1"));
    if (name == "von_karman") {
        ScalarExpr p1 = ScalarExpr::variable(ctx->space(), ctx->base_index("p1"));
        return wedge(d("p1"), d("q2")) * p1 - wedge(d("p2"), d("q1"));
    }
    const GradedElement ppp = wedge_all({d("p1"), d("p2"), d("p3")});
    if (name == "hess") return ppp - wedge_all({d("q1"), d("q2"), d("q3")});
    if (name == "sl")
        return ppp - wedge_all({d("p1"), d("q2"), d("q3")}) - wedge_all({d("q1"), d("p2"), d("q3")}) -
               wedge_all({d("q1"), d("q2"), d("p3")});
    if (name == "pssl")
        return ppp - wedge_all({d("p1"), d("q2"), d("q3")}) - wedge_all({d("p2"), d("q1"), d("q3")}) -
               wedge_all({d("p3"), d("q1"), d("q2")});
    throw Error(ErrorCode::UnboundName, "unknown Monge-Ampere instance '" + name + "'");
}

JacobiSystem cauchy_riemann(ContextPtr ctx) {
    if (!ctx) ctx = GradedContext::tangent({"x", "y", "u", "v"});
    auto d = [&](const char* s) { return xi_named(ctx, s); };
    return make_jacobi(wedge(d("u"), d("y")) - wedge(d("x"), d("v")), wedge(d("x"), d("u")) + wedge(d("v"), d("y")));
}

} // namespace gbx
