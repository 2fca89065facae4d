// The .gbx document language: a context declaration, typed bindings and a
// list of commands whose results are JSON reports.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gbx/monge_ampere.hpp"

namespace gbx {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct SourcePos {
    int line = 1, col = 1;
};

struct Binding {
    std::string name;
    std::string kind;  // as written after ':'
    GradedElement value;
    SourcePos pos;
};

enum class CommandType { Check, Print, MaAnalyze, MaApply, JacobiAnalyze, JacobiApply };

struct Command {
    CommandType type;
    std::string name;   // check kind, empty otherwise
    std::vector<ExprPtr> args;
    bool expect_pass = true;
    SourcePos pos;
    std::string text;   // the command as written, trimmed
};

struct Document {
    ContextPtr ctx;
    std::optional<SamplePoint> sample;
    std::vector<Binding> bindings;
    std::vector<Command> commands;

    const Binding* find(const std::string& name) const;
};

// Parses and evaluates every binding.  SyntaxError with a source position,
// TypeError when a binding does not have its declared kind, UnboundName
// for names used before they are bound.  Errors raised while evaluating a
// binding propagate unchanged.
Document parse_dsl(std::string_view text);

// One expression against a context, with optional bindings in scope.  This
// is the inverse of to_string on elements.
GradedElement parse_element(const ContextPtr& ctx, std::string_view text, const Document* scope = nullptr);

// Kinds accepted after ':' in a binding.
bool kind_matches(const std::string& kind, const GradedElement& u);
bool is_known_kind(const std::string& kind);

struct RunResult {
    std::vector<nlohmann::json> reports;
    bool ok = true;  // every check produced its expected verdict and nothing errored
};
// Runs every command in order.  Module errors become error reports.
RunResult run_document(const Document& doc);
nlohmann::json run_command(const Document& doc, const Command& cmd);

// "p1>0, q2<0" and "p1=1, q1=-1/2" as used by the command line.
std::vector<GradedContext::ChartEntry> parse_chart(std::string_view text);
SamplePoint parse_sample(const ContextPtr& ctx, std::string_view text);

} // namespace gbx
