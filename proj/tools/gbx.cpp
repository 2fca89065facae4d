// gbx: run .gbx documents and the Monge-Ampere / Jacobi analyses from the
// command line.  Exit status 0 when every check matches its expectation,
// 1 when a check or command does not, 2 for unreadable input.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gbx/dsl.hpp"
#include "gbx/report.hpp"

namespace {

using gbx::Document;
using nlohmann::json;

bool color() {
    const char* c = std::getenv("GBX_COLOR");
    return c && *c && std::string(c) != "0";
}

std::string paint(const std::string& s, bool good) {
    if (!color()) return s;
    return (good ? "\033[32m" : "\033[31m") + s + "\033[0m";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_human(const gbx::RunResult& r, bool checks_only) {
    for (const auto& rep : r.reports) {
        const int line = rep["line"].get<int>();
        const std::string text = rep["text"].get<std::string>();
        if (rep.contains("verdict")) {
            const bool ok = rep["matches"].get<bool>();
            std::cout << paint(ok ? "OK  " : "BAD ", ok) << "line " << line << ": " << text << " -> "
                      << rep["verdict"].get<std::string>() << " (expected " << rep["expected"].get<std::string>()
                      << ")\n";
            if (rep.contains("error")) std::cerr << "  " << rep["error"]["message"].get<std::string>() << "\n";
            continue;
        }
        if (checks_only) continue;
        const bool ok = rep["status"] == "ok";
        std::cout << paint(ok ? "OK  " : "BAD ", ok) << "line " << line << ": " << text << "\n";
        if (!ok) std::cerr << "  " << rep["error"]["message"].get<std::string>() << "\n";
        else if (rep.contains("value")) std::cout << "  " << rep["value"].get<std::string>() << "\n";
        else std::cout << rep["result"].dump(2) << "\n";
    }
}

int run_text(const std::string& text, bool as_json, bool checks_only) {
    Document doc;
    try {
        doc = gbx::parse_dsl(text);
    } catch (const std::exception& e) {
        if (as_json) std::cout << gbx::serialize({{"schema_version", gbx::kReportSchemaVersion}, {"error", gbx::error_json(e)}});
        else std::cerr << e.what() << "\n";
        return 2;
    }
    gbx::RunResult r = gbx::run_document(doc);
    if (as_json) std::cout << gbx::serialize(gbx::document_json(r.reports, r.ok));
    else print_human(r, checks_only);
    return r.ok ? 0 : 1;
}

std::string cotangent_header(int dim, const std::string& chart, const std::string& sample) {
    std::string q;
    for (int i = 1; i <= dim; ++i) q += (i > 1 ? "," : "") + std::string("q") + std::to_string(i);
    std::string h = "context cotangent(" + q + ")";
    if (!chart.empty()) h += " chart(" + chart + ")";
    h += ";\n";
    if (!sample.empty()) h += "sample(" + sample + ");\n";
    return h;
}

// The named instance printed in the context the header declares, so the
// generated document goes through the same parser as a file would.
std::string instance_text(const std::string& name, int dim, const std::string& chart) {
    gbx::ContextPtr ctx = gbx::parse_dsl(cotangent_header(dim, chart, "")).ctx;
    return gbx::to_string(gbx::ma_instance(name, ctx));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gbx: exact big-bracket and Monge-Ampere computations"};
    app.require_subcommand(1);

    bool as_json = false;
    std::string file;
    auto* run = app.add_subcommand("run", "run every command of a .gbx document");
    run->add_option("file", file, "document")->required();
    run->add_flag("--json", as_json, "emit the JSON report document");
    auto* check = app.add_subcommand("check", "run a document and report only its checks");
    check->add_option("file", file, "document")->required();
    check->add_flag("--json", as_json, "emit the JSON report document");

    int dim = 2;
    std::string form, instance, chart, sample, function;
    auto* ma = app.add_subcommand("ma", "Monge-Ampere structures on T*M");
    ma->require_subcommand(1);
    auto add_form_options = [&](CLI::App* c) {
        c->add_option("--dim", dim, "dimension of M")->check(CLI::IsMember({2, 3}));
        auto* f = c->add_option("--form", form, "effective form in the document language");
        auto* i = c->add_option("--instance", instance, "named form")->check(CLI::IsMember(gbx::ma_instance_names()));
        f->excludes(i);
        c->add_option("--chart", chart, "sign chart, e.g. p1>0");
        c->add_option("--sample-point", sample, "exact sample point, e.g. p1=1");
        c->add_flag("--json", as_json, "emit JSON (the default output is JSON as well)");
    };
    auto* ma_analyze = ma->add_subcommand("analyze", "invariants, classification and composite checks");
    add_form_options(ma_analyze);
    auto* ma_apply = ma->add_subcommand("apply", "the Monge-Ampere operator on a function of q");
    add_form_options(ma_apply);
    ma_apply->add_option("--function", function, "function of q")->required();

    std::string form2, u = "0", v = "0";
    auto* jac = app.add_subcommand("jacobi", "Jacobi systems on M x R^2 with coordinates x, y, u, v");
    jac->require_subcommand(1);
    auto add_pair_options = [&](CLI::App* c) {
        c->add_option("--form1", form, "first 2-form");
        c->add_option("--form2", form2, "second 2-form");
        c->add_flag("--json", as_json, "emit JSON (the default output is JSON as well)");
    };
    auto* jac_analyze = jac->add_subcommand("analyze", "type, bi-Hamiltonian and Hitchin pair checks");
    add_pair_options(jac_analyze);
    auto* jac_apply = jac->add_subcommand("apply", "the pair of operators on (u(x,y), v(x,y))");
    add_pair_options(jac_apply);
    jac_apply->add_option("--u", u, "first unknown");
    jac_apply->add_option("--v", v, "second unknown");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run || *check) return run_text(read_file(file), as_json, check->parsed());
        if (*ma) {
            if (instance == "von_karman" && chart.empty()) chart = "p1>0";
            if (!instance.empty()) {
                dim = instance == "hess" || instance == "sl" || instance == "pssl" ? 3 : 2;
                form = instance_text(instance, dim, chart);
            }
            if (form.empty()) throw CLI::RequiredError("--form or --instance");
            std::string doc = cotangent_header(dim, chart, sample) + "let omega : form" + std::to_string(dim) +
                              " = " + form + ";\n";
            doc += ma_apply->parsed() ? "ma apply(omega, " + function + ");\n" : "ma analyze(omega);\n";
            return run_text(doc, true, false);
        }
        if (*jac) {
            if (form.empty() != form2.empty()) throw CLI::RequiredError("both --form1 and --form2");
            if (form.empty()) {
                gbx::JacobiSystem cr = gbx::cauchy_riemann();
                form = gbx::to_string(cr.omega1);
                form2 = gbx::to_string(cr.omega2);
            }
            std::string doc = "context tangent(x,y,u,v);\nlet w1 : form2 = " + form + ";\nlet w2 : form2 = " + form2 +
                              ";\n";
            doc += jac_apply->parsed() ? "jacobi apply(w1, w2, " + u + ", " + v + ");\n" : "jacobi analyze(w1, w2);\n";
            return run_text(doc, true, false);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    return 2;
}
