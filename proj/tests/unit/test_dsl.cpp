#include <doctest.h>

#include <fstream>
#include <sstream>

#include "gbx/dsl.hpp"
#include "gbx/report.hpp"
#include "support.hpp"

using namespace gbx;
using gbx::testing::Rng;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ErrorCode code_of(std::string_view text) {
    try {
        parse_dsl(text);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("document parsed without error");
    return ErrorCode::Unsupported;
}

const char* kHeader = "context cotangent(q1,q2) chart(p1>0);\n";

} // namespace

TEST_SUITE("cli-io") {

TEST_CASE("binding kinds are enforced") {
    CHECK(code_of(std::string(kHeader) + "let x : form2 = dp1;\n") == ErrorCode::TypeError);
    CHECK(code_of(std::string(kHeader) + "let x : endo = dp1^dq1;\n") == ErrorCode::TypeError);
    // Unknown kinds are rejected by the grammar.
    CHECK(code_of(std::string(kHeader) + "let x : banana = dp1;\n") == ErrorCode::SyntaxError);
    CHECK_NOTHROW(parse_dsl(std::string(kHeader) + "let x : form1 = dp1;\n"));
}

TEST_CASE("unbound names") {
    // Commands are evaluated at run time, so the error becomes a report.
    RunResult r = run_document(parse_dsl(std::string(kHeader) + "print(foo);\n"));
    CHECK_FALSE(r.ok);
    REQUIRE(r.reports.size() == 1);
    CHECK(r.reports[0]["status"] == "error");
    CHECK(r.reports[0]["error"]["code"] == "UnboundName");
    CHECK(code_of(std::string(kHeader) + "let a : form1 = b;\nlet b : form1 = dq1;\n") == ErrorCode::UnboundName);
}

TEST_CASE("syntax errors carry a position") {
    try {
        parse_dsl(std::string(kHeader) + "let x : form1 = dp1 +* dq1;\n");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line() == 2);
        CHECK(e.col() > 1);
        nlohmann::json j = error_json(e);
        CHECK(j["code"] == "SyntaxError");
        CHECK(j["line"] == 2);
        CHECK(j["col"] == e.col());
    }
    try {
        parse_dsl("context cotangent(q1,q2)\nprint(dp1);\n");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line() >= 1);
    }
}

TEST_CASE("bracket of the standard structure with itself") {
    auto ctx = GradedContext::cotangent({"q1", "q2"});
    CHECK(parse_element(ctx, "bb(mu, mu)").is_zero());
    CHECK(parse_element(ctx, "mu") == standard_mu(ctx));
}

TEST_CASE("printer and parser are inverse") {
    Rng rng(90);
    std::vector<ContextPtr> contexts = {
        GradedContext::tangent({"x", "y", "z"}),
        GradedContext::cotangent({"q1", "q2"}),
        GradedContext::cotangent({"q1", "q2"}, {{"p1", 1}, {"q2", -1}}),
    };
    for (const auto& ctx : contexts) {
        const ScalarSpace& sp = ctx->space();
        for (int k = 0; k < 30; ++k) {
            GradedElement u = gbx::testing::random_homogeneous(
                rng, ctx, gbx::testing::random_bidegree(rng, ctx, -1, 2), 3, 2);
            u = u * ScalarExpr(Rational(rng.small(), 3 + rng.uniform(0, 4)));
            for (int v = 0; v < sp.size(); ++v) {
                if (sp.signs[v] == 0 || !rng.coin()) continue;
                // Chart-bearing coefficients: |v|^(1/2) and 1/v.
                auto root = sqrt_abs_monomial(ScalarExpr::variable(sp, v), sp);
                REQUIRE(root);
                u = u * *root + u * ScalarExpr::variable(sp, v).inverse();
            }
            const std::string text = to_string(u);
            CAPTURE(text);
            CHECK(parse_element(ctx, text) == u);
        }
    }
}

TEST_CASE("reports serialize deterministically") {
    const std::string text = read_file(std::string(GBX_FIXTURE_DIR) + "/sl.gbx");
    const std::string a = serialize(document_json(run_document(parse_dsl(text)).reports, true));
    const std::string b = serialize(document_json(run_document(parse_dsl(text)).reports, true));
    CHECK(a == b);
    CHECK(a.back() == '\n');
}

TEST_CASE("fixtures match their golden reports") {
    for (std::string name : {"von_karman", "sl"}) {
        CAPTURE(name);
        const std::string text = read_file(std::string(GBX_FIXTURE_DIR) + "/" + name + ".gbx");
        RunResult r = run_document(parse_dsl(text));
        CHECK(r.ok);
        CHECK(serialize(document_json(r.reports, r.ok)) == read_file(std::string(GBX_GOLDEN_DIR) + "/" + name + ".json"));
    }
}

TEST_CASE("expected verdicts") {
    const std::string base = std::string(kHeader) +
                             "let omega : form2 = p1*dp1^dq2 - dp2^dq1;\n"
                             "let J : endo = bb(pi_Omega, omega) / sqrtabs(p1);\n"
                             "let w : form2 = omega / sqrtabs(p1);\n";
    RunResult expected = run_document(parse_dsl(base + "check OmegaN(w, J) expect fail;\n"));
    REQUIRE(expected.reports.size() == 1);
    CHECK(expected.reports[0]["verdict"] == "fail");
    CHECK(expected.reports[0]["matches"] == true);
    CHECK(expected.ok);

    RunResult mismatch = run_document(parse_dsl(base + "check OmegaN(w, J);\n"));
    REQUIRE(mismatch.reports.size() == 1);
    CHECK(mismatch.reports[0]["verdict"] == "fail");
    CHECK(mismatch.reports[0]["matches"] == false);
    CHECK_FALSE(mismatch.ok);
}

TEST_CASE("chart and sample arguments") {
    auto chart = parse_chart("p1>0, q2<0");
    REQUIRE(chart.size() == 2);
    auto ctx = GradedContext::cotangent({"q1", "q2"}, chart);
    SamplePoint s = parse_sample(ctx, "p1=1, q1=-1/2");
    REQUIRE(s.size() == 4);
    CHECK(s[0] == Rational(-1, 2));
    CHECK(s[2] == Rational(1));
    CHECK_FALSE(s[1]);
    CHECK_THROWS_AS(parse_chart("p1>>0"), Error);
}

} // TEST_SUITE
