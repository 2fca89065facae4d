#include "gbx/report.hpp"

namespace gbx {

using nlohmann::json;

namespace {

std::string sign_string(int s) { return s > 0 ? "+" : s < 0 ? "-" : "?"; }

template <class T, class F>
json optional_json(const std::optional<T>& v, F f) {
    return v ? f(*v) : json(nullptr);
}

json condition_list(const std::vector<Condition>& cs) {
    json out = json::array();
    for (const auto& c : cs) out.push_back({{"name", c.name}, {"holds", c.holds}, {"residual", c.residual}});
    return out;
}

json verdict_json(const GeneralizedVerdict& v) {
    return {{"name", v.name},
            {"applicable", v.applicable},
            {"note", v.note},
            {"classification", optional_json(v.report, [](const GeneralizedReport& r) { return to_json(r); })},
            {"torsion_free", v.torsion_free}};
}

} // namespace

json to_json(const GradedElement& u) { return to_string(u); }

json to_json(const ScalarExpr& a, const ScalarSpace& sp) { return to_string(a, sp); }

json to_json(const Matrix& m, const ScalarSpace& sp) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(to_string(m(i, j), sp));
        rows.push_back(std::move(row));
    }
    return rows;
}

json to_json(const Inertia& i) { return {{"positive", i.positive}, {"negative", i.negative}, {"zero", i.zero}}; }

json to_json(const StructureReport& r) {
    return {{"kind", std::string(to_string(r.kind))}, {"conditions", condition_list(r.conditions)},
            {"verdict", r.verdict ? "pass" : "fail"}};
}

json to_json(const GeneralizedReport& r) {
    const ScalarSpace& sp = r.twisted.context()->space();
    return {{"kind", std::string(to_string(r.kind))},
            {"square", to_string(r.square, sp)},
            {"twisted", to_json(r.twisted)},
            {"twisted_equals_S", r.equals_S},
            {"twisted_equals_minus_S", r.equals_minus_S},
            {"twisted_zero", r.equals_zero}};
}

json to_json(const MA2Report& r, const MAStructure& S) {
    const ScalarSpace& sp = S.ctx->space();
    auto el = [](const GradedElement& u) { return to_json(u); };
    json composites = json::array();
    for (const auto& c : r.composites) composites.push_back(to_json(c));
    json generalized = json::array();
    for (const auto& g : r.generalized) generalized.push_back(verdict_json(g));
    return {{"dim", 2},
            {"omega", to_json(S.omega)},
            {"effective", S.effective()},
            {"A", to_json(r.A)},
            {"pfaffian", to_json(r.pf, sp)},
            {"pfaffian_residual", to_json(r.pf_residual)},
            {"pfaffian_sign", sign_string(r.pf_sign)},
            {"type", r.type},
            {"sqrt_abs_pfaffian", optional_json(r.sqrt_abs_pf, [&](const ScalarExpr& a) { return to_json(a, sp); })},
            {"omega_tilde", optional_json(r.omega_tilde, el)},
            {"d_omega_tilde", optional_json(r.d_omega_tilde, el)},
            {"pi_omega_tilde", optional_json(r.pi_omega_tilde, el)},
            {"J", optional_json(r.J, el)},
            {"J_square_residual", optional_json(r.J_square_residual, el)},
            {"J_torsion", optional_json(r.J_torsion, el)},
            {"integrable", r.integrable},
            {"trace_A", to_json(r.trace_A, sp)},
            {"unimodular", r.unimodular},
            {"d_omega", to_json(r.d_omega)},
            {"divergence_beta", optional_json(r.divergence_beta, el)},
            {"divergence_type", r.divergence_type},
            {"composites", composites},
            {"generalized", generalized}};
}

json to_json(const Generalized3D& g, const MAStructure& S) {
    const ScalarSpace& sp = S.ctx->space();
    json residuals = json::object();
    for (const auto& [name, res] : g.residuals) residuals[name] = to_json(res);
    return {{"J", to_json(g.J.matrix(), sp)},
            {"S", to_json(g.S)},
            {"S_self_bracket", to_json(g.S_self)},
            {"scale", to_json(g.scale, sp)},
            {"H", to_json(g.H)},
            {"square", optional_json(g.square, [&](const ScalarExpr& a) { return to_json(a, sp); })},
            {"classification", optional_json(g.classification, [](const GeneralizedReport& r) { return to_json(r); })},
            {"note", g.note},
            {"residuals", residuals}};
}

json to_json(const MA3Report& r, const MAStructure& S) {
    const ScalarSpace& sp = S.ctx->space();
    json pf = json::array();
    for (const auto& p : r.pf_frame) pf.push_back(to_json(p, sp));
    return {{"dim", 3},
            {"omega", to_json(S.omega)},
            {"effective", S.effective()},
            {"vol", to_json(r.vol)},
            {"H", to_json(r.H, sp)},
            {"lambda", to_json(r.lambda, sp)},
            {"lambda_sign", r.lambda.is_zero() ? "0" : sign_string(r.lambda_sign)},
            {"H_square_is_lambda_id", r.H_square_residual.is_zero()},
            {"q", to_json(r.q, sp)},
            {"q_inertia", optional_json(r.q_inertia, [](const Inertia& i) { return to_json(i); })},
            {"orbit", r.orbit},
            {"pfaffian_frame", pf},
            {"pf_matches_q", r.pf_matches_q}};
}

json to_json(const JacobiReport& r, const JacobiSystem& J) {
    const ScalarSpace& sp = J.ctx->space();
    return {{"omega1", to_json(J.omega1)},
            {"omega2", to_json(J.omega2)},
            {"wedge12", to_json(r.wedge12)},
            {"epsilon", optional_json(r.epsilon, [&](const ScalarExpr& a) { return to_json(a, sp); })},
            {"nondegenerate", r.nondegenerate},
            {"A", to_json(r.A, sp)},
            {"A_square_residual", to_json(r.A_square_residual, sp)},
            {"A_square_is_epsilon_id", r.A_square_residual.is_zero()},
            {"pi1", to_json(r.pi1)},
            {"pi2", to_json(r.pi2)},
            {"bihamiltonian_self", to_json(r.bihamilt_self)},
            {"bihamiltonian_mixed", to_json(r.bihamilt_mixed)},
            {"hitchin_pair", r.hitchin_pair},
            {"pn", optional_json(r.pn, [](const StructureReport& s) { return to_json(s); })}};
}

json error_json(const std::exception& e) {
    json j = {{"message", e.what()}};
    if (const auto* g = dynamic_cast<const Error*>(&e)) {
        j["code"] = std::string(to_string(g->code()));
        if (const auto* s = dynamic_cast<const SyntaxError*>(g)) {
            j["line"] = s->line();
            j["col"] = s->col();
        }
        if (const auto* r = dynamic_cast<const ResidualError*>(g)) j["residual"] = to_json(r->residual());
    } else {
        j["code"] = "Internal";
    }
    return j;
}

json document_json(const std::vector<json>& reports, bool ok) {
    return {{"schema_version", kReportSchemaVersion}, {"ok", ok}, {"reports", reports}};
}

std::string serialize(const json& j) { return j.dump(2) + "\n"; }

} // namespace gbx
