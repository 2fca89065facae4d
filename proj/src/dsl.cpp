#include "gbx/dsl.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <functional>

#include "gbx/report.hpp"

namespace gbx {

using nlohmann::json;

struct Expr {
    enum class Op { Number, Name, Theta, Momentum, Neg, Add, Sub, Wedge, Div, Pow, Call };
    Op op;
    SourcePos pos;
    Rational number;  // Number literal, or the exponent of Pow
    std::string name;
    std::vector<ExprPtr> args;
};

const Binding* Document::find(const std::string& name) const {
    for (const auto& b : bindings)
        if (b.name == name) return &b;
    return nullptr;
}

namespace {

// ---------------------------------------------------------------- lexer

enum class Tok { Ident, Number, Punct, End };

struct Token {
    Tok type;
    std::string text;
    SourcePos pos;
    std::size_t offset;
};

std::vector<Token> lex(std::string_view s) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t k) {
        for (std::size_t j = 0; j < k; ++j, ++i) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#' || (c == '/' && i + 1 < s.size() && s[i + 1] == '/')) {
            while (i < s.size() && s[i] != '\n') advance(1);
            continue;
        }
        SourcePos pos{line, col};
        std::size_t start = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), pos, start});
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back({Tok::Number, std::string(s.substr(i, j - i)), pos, start});
            advance(j - i);
        } else if (std::string_view("()[],;:+-*/^@=<>").find(c) != std::string_view::npos) {
            out.push_back({Tok::Punct, std::string(1, c), pos, start});
            advance(1);
        } else {
            throw SyntaxError(line, col, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Tok::End, "", {line, col}, s.size()});
    return out;
}

// ---------------------------------------------------------------- parser

class Parser {
public:
    Parser(std::string_view src) : src_(src), toks_(lex(src)) {}

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at_end() const { return peek().type == Tok::End; }
    bool is(const char* p, std::size_t k = 0) const {
        return peek(k).type == Tok::Punct && peek(k).text == p;
    }
    bool is_word(const char* w, std::size_t k = 0) const {
        return peek(k).type == Tok::Ident && peek(k).text == w;
    }
    const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const {
        throw SyntaxError(t.pos.line, t.pos.col, msg);
    }
    void expect(const char* p) {
        if (!is(p)) fail(peek(), std::string("expected '") + p + "'" + got());
        take();
    }
    std::string got() const {
        return peek().type == Tok::End ? ", got end of input" : ", got '" + peek().text + "'";
    }
    std::string ident(const char* what) {
        if (peek().type != Tok::Ident) fail(peek(), std::string("expected ") + what + got());
        return take().text;
    }
    std::string_view text_between(std::size_t from, std::size_t to) const { return src_.substr(from, to - from); }
    std::size_t offset() const { return peek().offset; }
    std::size_t index() const { return pos_; }
    std::size_t end_offset_of_prev() const {
        const Token& t = toks_[pos_ - 1];
        return t.offset + t.text.size();
    }

    // expr := term (('+' | '-') term)*
    ExprPtr expr() {
        ExprPtr l = term();
        while (is("+") || is("-")) {
            const Token& t = take();
            ExprPtr r = term();
            l = node(t.text == "+" ? Expr::Op::Add : Expr::Op::Sub, t.pos, {l, r});
        }
        return l;
    }

    // term := unary (('*' | '^' | '/') unary)*; '^' followed by an exponent
    // is consumed as a power inside factor().
    ExprPtr term() {
        ExprPtr l = unary();
        while (is("*") || is("^") || is("/")) {
            const Token& t = take();
            ExprPtr r = unary();
            l = node(t.text == "/" ? Expr::Op::Div : Expr::Op::Wedge, t.pos, {l, r});
        }
        return l;
    }

    ExprPtr unary() {
        if (is("-")) {
            const Token& t = take();
            return node(Expr::Op::Neg, t.pos, {unary()});
        }
        if (is("+")) {
            take();
            return unary();
        }
        return factor();
    }

    // An exponent is an integer or a parenthesized signed rational.
    bool exponent_ahead() const {
        if (!is("^")) return false;
        if (peek(1).type == Tok::Number) return true;
        if (!is("(", 1)) return false;
        std::size_t k = 2;
        if (is("-", k)) ++k;
        if (peek(k).type != Tok::Number) return false;
        ++k;
        if (is("/", k)) {
            if (peek(k + 1).type != Tok::Number) return false;
            k += 2;
        }
        return is(")", k);
    }

    Rational exponent() {
        expect("^");
        if (peek().type == Tok::Number) return Rational(take().text);
        expect("(");
        bool neg = false;
        if (is("-")) {
            take();
            neg = true;
        }
        Rational e(take().text);
        if (is("/")) {
            take();
            const Token& d = take();
            Rational den(d.text);
            if (den == 0) fail(d, "zero denominator in exponent");
            e /= den;
        }
        expect(")");
        return neg ? Rational(-e) : e;
    }

    ExprPtr factor() {
        ExprPtr b = primary();
        while (exponent_ahead()) {
            SourcePos p = peek().pos;
            Expr e{Expr::Op::Pow, p, exponent(), "", {b}};
            b = std::make_shared<const Expr>(std::move(e));
        }
        return b;
    }

    ExprPtr primary() {
        const Token& t = peek();
        if (t.type == Tok::Number) {
            take();
            Expr e{Expr::Op::Number, t.pos, Rational(t.text), "", {}};
            return std::make_shared<const Expr>(std::move(e));
        }
        if (is("(")) {
            take();
            ExprPtr e = expr();
            expect(")");
            return e;
        }
        if (is("@")) {
            take();
            Expr e{Expr::Op::Theta, t.pos, 0, ident("a direction name after '@'"), {}};
            return std::make_shared<const Expr>(std::move(e));
        }
        if (t.type == Tok::Ident) {
            take();
            if (t.text == "P" && is("[")) {
                take();
                std::string coord = ident("a base coordinate");
                expect("]");
                Expr e{Expr::Op::Momentum, t.pos, 0, coord, {}};
                return std::make_shared<const Expr>(std::move(e));
            }
            if (is("(")) {
                take();
                Expr e{Expr::Op::Call, t.pos, 0, t.text, args_until_close()};
                return std::make_shared<const Expr>(std::move(e));
            }
            Expr e{Expr::Op::Name, t.pos, 0, t.text, {}};
            return std::make_shared<const Expr>(std::move(e));
        }
        fail(t, "expected an expression" + got());
    }

    // After '(' has been consumed.
    std::vector<ExprPtr> args_until_close() {
        std::vector<ExprPtr> args;
        if (is(")")) {
            take();
            return args;
        }
        for (;;) {
            args.push_back(expr());
            if (is(")")) break;
            expect(",");
        }
        take();
        return args;
    }

    std::vector<std::string> name_list() {
        expect("(");
        std::vector<std::string> names;
        if (!is(")")) {
            for (;;) {
                names.push_back(ident("a name"));
                if (is(")")) break;
                expect(",");
            }
        }
        take();
        return names;
    }

    Rational signed_rational() {
        bool neg = false;
        if (is("-")) {
            take();
            neg = true;
        }
        if (peek().type != Tok::Number) fail(peek(), "expected a number" + got());
        Rational v(take().text);
        if (is("/")) {
            take();
            if (peek().type != Tok::Number) fail(peek(), "expected a denominator" + got());
            const Token& d = take();
            Rational den(d.text);
            if (den == 0) fail(d, "zero denominator");
            v /= den;
        }
        return neg ? Rational(-v) : v;
    }

private:
    static ExprPtr node(Expr::Op op, SourcePos pos, std::vector<ExprPtr> args) {
        Expr e{op, pos, 0, "", std::move(args)};
        return std::make_shared<const Expr>(std::move(e));
    }

    std::string_view src_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- kinds

int uniform_word_size(const GradedElement& u, bool* p_free) {
    int k = -1;
    *p_free = u.is_p_free();
    for (const auto& [key, c] : u.terms()) {
        int w = std::popcount(key.word);
        if (k >= 0 && w != k) return -1;
        k = w;
    }
    return k;
}

std::string describe(const GradedElement& u) {
    if (u.is_zero()) return "0";
    if (u.is_scalar()) return "a scalar";
    bool p_free = false;
    const int k = uniform_word_size(u, &p_free);
    if (u.is_form()) return k >= 0 ? "a " + std::to_string(k) + "-form" : "an inhomogeneous form";
    if (u.is_multivector()) return k >= 0 ? "a " + std::to_string(k) + "-vector" : "an inhomogeneous multivector";
    if (is_endo(u)) return "a (1,1)-tensor";
    if (auto b = u.bidegree())
        return "an element of shifted bidegree (" + std::to_string(b->p) + "," + std::to_string(b->q) + ")";
    return "an inhomogeneous element";
}

int trailing_int(const std::string& kind, const std::string& stem) {
    if (kind.size() <= stem.size() || kind.compare(0, stem.size(), stem) != 0) return -1;
    int k = 0;
    for (std::size_t i = stem.size(); i < kind.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(kind[i]))) return -1;
        k = k * 10 + (kind[i] - '0');
    }
    return k;
}

// ---------------------------------------------------------------- evaluation

class Evaluator {
public:
    Evaluator(ContextPtr ctx, const Document* scope) : ctx_(std::move(ctx)), scope_(scope) {}

    GradedElement eval(const Expr& e) const {
        using Op = Expr::Op;
        switch (e.op) {
        case Op::Number: return GradedElement::scalar(ctx_, ScalarExpr(e.number));
        case Op::Name: return name(e);
        case Op::Theta: {
            int a = ctx_->fiber_index(e.name);
            if (a < 0 && ctx_->is_tangent()) a = ctx_->fiber_index("d" + e.name);
            if (a < 0) throw at(e, ErrorCode::UnboundName, "no direction '@" + e.name + "'");
            return GradedElement::theta(ctx_, a);
        }
        case Op::Momentum: {
            int i = ctx_->base_index(e.name);
            if (i < 0) throw at(e, ErrorCode::UnboundName, "no base coordinate '" + e.name + "'");
            return GradedElement::momentum(ctx_, i);
        }
        case Op::Neg: return -eval(*e.args[0]);
        case Op::Add: return eval(*e.args[0]) + eval(*e.args[1]);
        case Op::Sub: return eval(*e.args[0]) - eval(*e.args[1]);
        case Op::Wedge: return wedge(eval(*e.args[0]), eval(*e.args[1]));
        case Op::Div: {
            GradedElement l = eval(*e.args[0]);
            ScalarExpr r = scalar_arg(*e.args[1], "divisor");
            if (r.is_zero()) throw at(e, ErrorCode::DivisionByZero, "division by zero");
            return l * r.inverse();
        }
        case Op::Pow: return power(e);
        case Op::Call: return call(e);
        }
        throw at(e, ErrorCode::Unsupported, "unknown expression");
    }

    ScalarExpr scalar_arg(const Expr& e, const char* what) const {
        GradedElement u = eval(e);
        if (u.is_zero()) return ScalarExpr(0);
        if (!u.is_scalar()) throw at(e, ErrorCode::TypeError, std::string(what) + " must be a scalar, got " + describe(u));
        return u.coefficient(TermKey{0, std::vector<std::uint8_t>(ctx_->n(), 0)});
    }

    AlgebroidStructure structure(const std::vector<ExprPtr>& args, std::size_t at_index) const {
        if (args.size() > at_index) return validate_structure(eval(*args[at_index]));
        return standard_structure(ctx_);
    }

private:
    static Error at(const Expr& e, ErrorCode code, const std::string& msg) {
        return Error(code, std::to_string(e.pos.line) + ":" + std::to_string(e.pos.col) + ": " + msg);
    }

    GradedElement name(const Expr& e) const {
        if (scope_)
            if (const Binding* b = scope_->find(e.name)) return b->value;
        if (int i = ctx_->base_index(e.name); i >= 0) return GradedElement::coordinate(ctx_, i);
        if (int i = ctx_->param_index(e.name); i >= 0)
            return GradedElement::scalar(ctx_, ScalarExpr::variable(ctx_->space(), i));
        if (int a = ctx_->fiber_index(e.name); a >= 0) return GradedElement::xi(ctx_, a);
        if (e.name == "mu") return standard_mu(ctx_);
        if (e.name == "Id") return GradedElement::identity(ctx_);
        if (e.name == "Omega") return canonical_symplectic(ctx_);
        if (e.name == "pi_Omega") return invert_two_form(canonical_symplectic(ctx_));
        throw at(e, ErrorCode::UnboundName, "unbound name '" + e.name + "'");
    }

    GradedElement power(const Expr& e) const {
        GradedElement b = eval(*e.args[0]);
        const Rational& k = e.number;
        if (k.get_den() == 1 && !b.is_scalar() && !b.is_zero()) {
            if (k < 0) throw at(e, ErrorCode::TypeError, "negative power of " + describe(b));
            if (!k.get_num().fits_slong_p()) throw at(e, ErrorCode::Unsupported, "exponent too large");
            GradedElement r = GradedElement::scalar(ctx_, ScalarExpr(1));
            for (long i = 0; i < k.get_num().get_si(); ++i) r = wedge(r, b);
            return r;
        }
        ScalarExpr s = scalar_arg(*e.args[0], "base of a power");
        if (k.get_den() == 1) {
            if (!k.get_num().fits_slong_p()) throw at(e, ErrorCode::Unsupported, "exponent too large");
            return GradedElement::scalar(ctx_, s.pow(k.get_num().get_si()));
        }
        if (!s.is_monomial())
            throw at(e, ErrorCode::TypeError, "fractional powers apply to single monomials only");
        const PolyTerm& t = s.num().lead();
        if (!k.get_num().fits_slong_p() || !k.get_den().fits_slong_p())
            throw at(e, ErrorCode::Unsupported, "exponent too large");
        const Exponent ex(k.get_num().get_si(), k.get_den().get_si());
        const ScalarSpace& sp = ctx_->space();
        for (const auto& [i, p] : t.mono.entries()) {
            const bool charted = !sp.signs.empty() && sp.signs[i] != 0;
            if (!charted && (p * ex).denominator() != 1)
                throw at(e, ErrorCode::NegativeBaseFractionalPower,
                         "fractional power of '" + sp.names[i] + "', which has no declared sign");
        }
        return GradedElement::scalar(ctx_, ScalarExpr(Poly(rational_pow(t.coef, ex), t.mono.pow(ex))));
    }

    void arity(const Expr& e, std::size_t lo, std::size_t hi) const {
        if (e.args.size() < lo || e.args.size() > hi)
            throw at(e, ErrorCode::TypeError,
                     e.name + "() takes " + std::to_string(lo) + (hi > lo ? " to " + std::to_string(hi) : "") +
                         " arguments, got " + std::to_string(e.args.size()));
    }

    GradedElement call(const Expr& e) const {
        const std::string& f = e.name;
        const auto& a = e.args;
        if (f == "abs") {
            arity(e, 1, 1);
            const Expr& x = *a[0];
            const int i = x.op == Expr::Op::Name ? ctx_->space().index_of(x.name) : -1;
            if (i < 0) throw at(e, ErrorCode::TypeError, "abs() takes a coordinate name");
            const ScalarSpace& sp = ctx_->space();
            if (sp.signs.empty() || sp.signs[i] == 0)
                throw at(e, ErrorCode::ChartViolation, "abs(" + x.name + ") needs a declared sign for " + x.name);
            return GradedElement::scalar(ctx_, ScalarExpr(Poly(Rational(1), Monomial::var(i))));
        }
        if (f == "d") {
            arity(e, 1, 2);
            return differential_apply(structure(a, 1), eval(*a[0]));
        }
        if (f == "bb") {
            arity(e, 2, 2);
            return big_bracket(eval(*a[0]), eval(*a[1]));
        }
        if (f == "sch") {
            arity(e, 2, 3);
            return schouten_bracket(structure(a, 2), eval(*a[0]), eval(*a[1]));
        }
        if (f == "inv") {
            arity(e, 1, 1);
            GradedElement u = eval(*a[0]);
            if (is_k_form(u, 2)) return invert_two_form(u);
            if (is_k_vector(u, 2)) return invert_bivector(u);
            throw at(e, ErrorCode::TypeError, "inv() takes a 2-form or a bivector, got " + describe(u));
        }
        if (f == "compose") {
            arity(e, 2, 2);
            return endo_compose(eval(*a[0]), eval(*a[1]));
        }
        if (f == "torsion") {
            arity(e, 1, 2);
            return nijenhuis_torsion(structure(a, 1), eval(*a[0]));
        }
        if (f == "deform") {
            arity(e, 1, 2);
            return deform(structure(a, 1), eval(*a[0]));
        }
        if (f == "sharp") {
            arity(e, 2, 2);
            return sharp_apply(eval(*a[0]), eval(*a[1]));
        }
        if (f == "flat") {
            arity(e, 2, 2);
            return flat_apply(eval(*a[0]), eval(*a[1]));
        }
        if (f == "sqrtabs") {
            arity(e, 1, 1);
            ScalarExpr s = scalar_arg(*a[0], "argument of sqrtabs()");
            auto r = sqrt_abs_monomial(s, ctx_->space());
            if (!r) throw at(e, ErrorCode::NonRationalValue, "no exact square root of |" + to_string(s, ctx_->space()) + "|");
            return GradedElement::scalar(ctx_, *r);
        }
        throw at(e, ErrorCode::UnboundName, "unknown function '" + f + "'");
    }

    ContextPtr ctx_;
    const Document* scope_;
};

// ---------------------------------------------------------------- statements

const std::vector<std::string> kBuiltins = {"mu", "Id", "Omega", "pi_Omega"};

std::vector<GradedContext::ChartEntry> chart_entries(Parser& p) {
    p.expect("(");
    std::vector<GradedContext::ChartEntry> chart;
    if (!p.is(")")) {
        for (;;) {
            std::string c = p.ident("a coordinate");
            int sign = 0;
            if (p.is(">")) sign = 1;
            else if (p.is("<")) sign = -1;
            else p.fail(p.peek(), "expected '>' or '<'" + p.got());
            p.take();
            if (p.peek().type != Tok::Number || p.peek().text != "0") p.fail(p.peek(), "chart bounds are '>0' or '<0'");
            p.take();
            chart.push_back({c, sign});
            if (p.is(")")) break;
            p.expect(",");
        }
    }
    p.take();
    return chart;
}

ContextPtr context_statement(Parser& p) {
    const Token& start = p.peek();
    std::string shape = p.ident("cotangent, tangent or base");
    std::vector<std::string> first = p.name_list(), fiber;
    if (shape == "base") {
        if (!p.is_word("fiber")) p.fail(p.peek(), "expected fiber(...)" + p.got());
        p.take();
        fiber = p.name_list();
    } else if (shape != "cotangent" && shape != "tangent") {
        p.fail(start, "unknown context shape '" + shape + "'");
    }
    std::vector<GradedContext::ChartEntry> chart;
    std::vector<std::string> params;
    while (p.is_word("chart") || p.is_word("param")) {
        if (p.take().text == "chart") chart = chart_entries(p);
        else params = p.name_list();
    }
    p.expect(";");
    try {
        if (shape == "cotangent") return GradedContext::cotangent(first, chart, params);
        if (shape == "tangent") return GradedContext::tangent(first, chart, params);
        return GradedContext::make(first, fiber, chart, params);
    } catch (const Error& e) {
        throw SyntaxError(start.pos.line, start.pos.col, e.what());
    }
}

std::optional<CommandType> command_head(Parser& p, std::string* name) {
    if (p.is_word("check")) {
        p.take();
        *name = p.ident("a check kind");
        return CommandType::Check;
    }
    if (p.is_word("print") && p.is("(", 1)) {
        p.take();
        return CommandType::Print;
    }
    for (const char* group : {"ma", "jacobi"}) {
        if (!p.is_word(group)) continue;
        const bool ma = std::string(group) == "ma";
        p.take();
        std::string verb = p.ident("analyze or apply");
        if (verb == "analyze") return ma ? CommandType::MaAnalyze : CommandType::JacobiAnalyze;
        if (verb == "apply") return ma ? CommandType::MaApply : CommandType::JacobiApply;
        p.fail(p.peek(), "expected analyze or apply after '" + std::string(group) + "'");
    }
    return std::nullopt;
}

std::size_t command_arity(CommandType t) {
    switch (t) {
    case CommandType::Print:
    case CommandType::MaAnalyze: return 1;
    case CommandType::MaApply:
    case CommandType::JacobiAnalyze: return 2;
    case CommandType::JacobiApply: return 4;
    case CommandType::Check: return 0;
    }
    return 0;
}

std::string_view command_name(CommandType t) {
    switch (t) {
    case CommandType::Check: return "check";
    case CommandType::Print: return "print";
    case CommandType::MaAnalyze: return "ma analyze";
    case CommandType::MaApply: return "ma apply";
    case CommandType::JacobiAnalyze: return "jacobi analyze";
    case CommandType::JacobiApply: return "jacobi apply";
    }
    return "?";
}

// ---------------------------------------------------------------- checks

Condition condition(const std::string& name, const GradedElement& residual) {
    return {name, residual.is_zero(), to_string(residual)};
}

json conditions_json(const std::vector<Condition>& cs) {
    StructureReport r{CompositeKind::Poisson, cs, true};
    return to_json(r)["conditions"];
}

struct CheckOutcome {
    bool pass = false;
    json detail = json::object();
};

CheckOutcome run_check(const Document& doc, const Command& cmd) {
    Evaluator ev(doc.ctx, &doc);
    const auto& a = cmd.args;
    auto need = [&](std::size_t lo, std::size_t hi) {
        if (a.size() < lo || a.size() > hi)
            throw Error(ErrorCode::TypeError, "check " + cmd.name + " takes " + std::to_string(lo) +
                                                  (hi > lo ? " to " + std::to_string(hi) : "") + " arguments");
    };
    auto arg = [&](std::size_t i) { return ev.eval(*a[i]); };
    CheckOutcome out;
    auto all_hold = [&](const std::vector<Condition>& cs) {
        out.pass = std::all_of(cs.begin(), cs.end(), [](const Condition& c) { return c.holds; });
        out.detail["conditions"] = conditions_json(cs);
    };

    if (auto kind = composite_kind_from(cmd.name)) {
        StructureData data;
        switch (*kind) {
        case CompositeKind::Poisson: need(1, 2); data.pi = arg(0); break;
        case CompositeKind::Complementary:
        case CompositeKind::POmega: need(2, 3); data.pi = arg(0); data.omega = arg(1); break;
        case CompositeKind::PN: need(2, 3); data.pi = arg(0); data.N = arg(1); break;
        case CompositeKind::OmegaN:
        case CompositeKind::HitchinPair: need(2, 3); data.omega = arg(0); data.N = arg(1); break;
        case CompositeKind::CompatiblePair: need(2, 3); data.pi = arg(0); data.pi1 = arg(1); break;
        }
        const std::size_t s_at = *kind == CompositeKind::Poisson ? 1 : 2;
        StructureReport r = check_structure(ev.structure(a, s_at), *kind, data);
        out.pass = r.verdict;
        out.detail["conditions"] = conditions_json(r.conditions);
        return out;
    }
    if (cmd.name == "Structure") {
        need(1, 1);
        AlgebroidStructure A = decompose_structure(arg(0));
        all_hold({condition("{S,S} = 0", A.residual)});
        out.detail["structure_kind"] = std::string(to_string(A.kind));
        return out;
    }
    if (cmd.name == "Nijenhuis") {
        need(1, 2);
        all_hold({condition("T N = 0", nijenhuis_torsion(ev.structure(a, 1), arg(0)))});
        return out;
    }
    if (cmd.name == "Closed") {
        need(1, 2);
        all_hold({condition("d u = 0", differential_apply(ev.structure(a, 1), arg(0)))});
        return out;
    }
    if (cmd.name == "Effective") {
        need(1, 1);
        GradedElement w = arg(0);
        all_hold({condition("omega ^ Omega = 0", wedge(w, canonical_symplectic(doc.ctx)))});
        return out;
    }
    if (cmd.name == "Generalized") {
        need(1, 2);
        GradedElement S = a.size() > 1 ? arg(1) : standard_mu(doc.ctx);
        GeneralizedReport r = classify_generalized(S, DoubleEndo::from_element(arg(0)));
        out.pass = r.kind != GeneralizedKind::None;
        out.detail["classification"] = to_json(r);
        return out;
    }
    throw Error(ErrorCode::UnboundName, "unknown check kind '" + cmd.name + "'");
}

} // namespace

// ---------------------------------------------------------------- public API

bool is_known_kind(const std::string& kind) {
    static const std::vector<std::string> fixed = {"scalar", "form",      "vector",    "bivector",
                                                   "multivector", "endo", "structure", "element"};
    if (std::find(fixed.begin(), fixed.end(), kind) != fixed.end()) return true;
    return trailing_int(kind, "form") >= 0 || trailing_int(kind, "multivector") >= 0;
}

bool kind_matches(const std::string& kind, const GradedElement& u) {
    if (u.is_zero() || kind == "element") return true;
    if (kind == "scalar") return u.is_scalar();
    if (kind == "form") return u.is_form();
    if (kind == "vector") return is_k_vector(u, 1);
    if (kind == "bivector") return is_k_vector(u, 2);
    if (kind == "multivector") return u.is_multivector();
    if (kind == "endo") return is_endo(u);
    if (kind == "structure")
        return std::all_of(u.terms().begin(), u.terms().end(),
                           [](const auto& t) { return term_degree(t.first) == 3; });
    if (int k = trailing_int(kind, "form"); k >= 0) return is_k_form(u, k);
    if (int k = trailing_int(kind, "multivector"); k >= 0) return is_k_vector(u, k);
    return false;
}

GradedElement parse_element(const ContextPtr& ctx, std::string_view text, const Document* scope) {
    Parser p(text);
    ExprPtr e = p.expr();
    if (!p.at_end()) p.fail(p.peek(), "unexpected '" + p.peek().text + "' after the expression");
    return Evaluator(ctx, scope).eval(*e);
}

Document parse_dsl(std::string_view text) {
    Parser p(text);
    Document doc;
    auto require_context = [&](const Token& t) {
        if (!doc.ctx) p.fail(t, "a context declaration must come first");
    };
    while (!p.at_end()) {
        const Token start = p.peek();
        if (p.is_word("context")) {
            if (doc.ctx) p.fail(start, "the context is already declared");
            p.take();
            doc.ctx = context_statement(p);
            continue;
        }
        require_context(start);
        if (p.is_word("sample") && p.is("(", 1)) {
            p.take();
            p.take();
            SamplePoint pt(doc.ctx->space().size());
            if (!p.is(")")) {
                for (;;) {
                    const Token& nt = p.peek();
                    std::string n = p.ident("a coordinate");
                    int i = doc.ctx->space().index_of(n);
                    if (i < 0) throw SyntaxError(nt.pos.line, nt.pos.col, "unknown coordinate '" + n + "'");
                    p.expect("=");
                    pt[i] = p.signed_rational();
                    if (p.is(")")) break;
                    p.expect(",");
                }
            }
            p.take();
            p.expect(";");
            doc.sample = std::move(pt);
            continue;
        }
        if (p.is_word("let")) {
            p.take();
            const Token& nt = p.peek();
            std::string name = p.ident("a binding name");
            const ContextPtr& ctx = doc.ctx;
            const bool reserved = ctx->space().index_of(name) >= 0 || ctx->fiber_index(name) >= 0 ||
                                  std::find(kBuiltins.begin(), kBuiltins.end(), name) != kBuiltins.end() ||
                                  doc.find(name);
            if (reserved) p.fail(nt, "name '" + name + "' is already in use");
            p.expect(":");
            const Token& kt = p.peek();
            std::string kind = p.ident("a kind");
            if (!is_known_kind(kind)) p.fail(kt, "unknown kind '" + kind + "'");
            p.expect("=");
            ExprPtr e = p.expr();
            p.expect(";");
            GradedElement v = Evaluator(ctx, &doc).eval(*e);
            if (!kind_matches(kind, v))
                throw Error(ErrorCode::TypeError, std::to_string(nt.pos.line) + ":" + std::to_string(nt.pos.col) +
                                                      ": '" + name + "' is declared " + kind + " but is " +
                                                      describe(v));
            doc.bindings.push_back({name, kind, std::move(v), nt.pos});
            continue;
        }
        std::string check_name;
        auto type = command_head(p, &check_name);
        if (!type) p.fail(start, "expected a statement" + p.got());
        p.expect("(");
        Command cmd{*type, check_name, p.args_until_close(), true, start.pos, ""};
        if (*type != CommandType::Check && cmd.args.size() != command_arity(*type))
            p.fail(start, std::string(command_name(*type)) + " takes " + std::to_string(command_arity(*type)) +
                              " arguments");
        if (*type == CommandType::Check && p.is_word("expect")) {
            p.take();
            const Token& vt = p.peek();
            std::string v = p.ident("pass or fail");
            if (v != "pass" && v != "fail") p.fail(vt, "expected pass or fail");
            cmd.expect_pass = v == "pass";
        }
        cmd.text = std::string(p.text_between(start.offset, p.end_offset_of_prev()));
        p.expect(";");
        doc.commands.push_back(std::move(cmd));
    }
    if (!doc.ctx) throw SyntaxError(1, 1, "empty document: a context declaration is required");
    return doc;
}

json run_command(const Document& doc, const Command& cmd) {
    json r = {{"command", std::string(command_name(cmd.type))}, {"line", cmd.pos.line}, {"text", cmd.text}};
    Evaluator ev(doc.ctx, &doc);
    if (cmd.type == CommandType::Check) {
        r["kind"] = cmd.name;
        r["expected"] = cmd.expect_pass ? "pass" : "fail";
        std::string verdict;
        try {
            CheckOutcome o = run_check(doc, cmd);
            verdict = o.pass ? "pass" : "fail";
            r.update(o.detail);
        } catch (const Error& e) {
            // A failing algebraic precondition is a failed check, anything
            // else leaves the verdict undecided.
            const bool failed_side = e.code() == ErrorCode::SideConditionFails ||
                                     e.code() == ErrorCode::SkewConditionFails;
            verdict = failed_side ? "fail" : "error";
            r["error"] = error_json(e);
        } catch (const std::exception& e) {
            verdict = "error";
            r["error"] = error_json(e);
        }
        r["verdict"] = verdict;
        r["matches"] = verdict == (cmd.expect_pass ? "pass" : "fail");
        return r;
    }
    try {
        const auto& a = cmd.args;
        switch (cmd.type) {
        case CommandType::Print: r["value"] = to_json(ev.eval(*a[0])); break;
        case CommandType::MaAnalyze: {
            MAStructure S = build_ma(ev.eval(*a[0]), doc.sample);
            if (S.n == 2) {
                r["result"] = to_json(analyze_2d(S), S);
            } else {
                json j = to_json(analyze_3d(S), S);
                try {
                    j["generalized"] = to_json(generalized_structure_3d(S), S);
                } catch (const std::exception& e) {
                    j["generalized"] = {{"error", error_json(e)}};
                }
                r["result"] = j;
            }
            break;
        }
        case CommandType::MaApply: {
            MAStructure S = build_ma(ev.eval(*a[0]), doc.sample);
            ScalarExpr f = ev.scalar_arg(*a[1], "function");
            r["result"] = {{"function", to_json(f, doc.ctx->space())}, {"value", to_json(ma_operator_apply(S, f))}};
            break;
        }
        case CommandType::JacobiAnalyze: {
            JacobiSystem J = make_jacobi(ev.eval(*a[0]), ev.eval(*a[1]));
            r["result"] = to_json(jacobi_analyze(J), J);
            break;
        }
        case CommandType::JacobiApply: {
            JacobiSystem J = make_jacobi(ev.eval(*a[0]), ev.eval(*a[1]));
            auto [first, second] =
                jacobi_operator_apply(J, ev.scalar_arg(*a[2], "u"), ev.scalar_arg(*a[3], "v"));
            r["result"] = {{"first", to_json(first)}, {"second", to_json(second)}};
            break;
        }
        case CommandType::Check: break;
        }
        r["status"] = "ok";
    } catch (const std::exception& e) {
        r["status"] = "error";
        r["error"] = error_json(e);
    }
    return r;
}

RunResult run_document(const Document& doc) {
    RunResult out;
    for (const auto& cmd : doc.commands) {
        json r = run_command(doc, cmd);
        if (r.contains("matches")) out.ok = out.ok && r["matches"].get<bool>();
        else out.ok = out.ok && r["status"] == "ok";
        out.reports.push_back(std::move(r));
    }
    return out;
}

std::vector<GradedContext::ChartEntry> parse_chart(std::string_view text) {
    std::string wrapped = "(" + std::string(text) + ")";
    Parser p(wrapped);
    auto chart = chart_entries(p);
    if (!p.at_end()) p.fail(p.peek(), "unexpected '" + p.peek().text + "' in chart");
    return chart;
}

SamplePoint parse_sample(const ContextPtr& ctx, std::string_view text) {
    Parser p(text);
    SamplePoint pt(ctx->space().size());
    while (!p.at_end()) {
        const Token& nt = p.peek();
        std::string n = p.ident("a coordinate");
        int i = ctx->space().index_of(n);
        if (i < 0) throw SyntaxError(nt.pos.line, nt.pos.col, "unknown coordinate '" + n + "'");
        p.expect("=");
        pt[i] = p.signed_rational();
        if (!p.at_end()) p.expect(",");
    }
    return pt;
}

} // namespace gbx
