#include "tml2/parser.hpp"

#include "lexer.hpp"

#include <algorithm>
#include <array>

namespace tml2 {

namespace {

using detail::Token;
using detail::TokenKind;

// Thrown after a diagnostic has been recorded; unwinds to the top-level
// declaration loop, which resynchronizes.
struct SyntaxError {};

std::string describe(const Token& tok) {
    switch (tok.kind) {
    case TokenKind::End: return "end of input";
    case TokenKind::String: return "string literal";
    case TokenKind::Identifier: return "identifier '" + tok.text + "'";
    default: return "'" + tok.text + "'";
    }
}

class Parser {
public:
    Parser(std::vector<Token> tokens, std::string file, std::vector<Diagnostic>& diags)
        : toks_(std::move(tokens)), file_(std::move(file)), diags_(diags) {}

    Model parse_model() {
        Model model;
        model.source_name = file_;
        while (!at_end()) {
            try {
                if (peek().is_keyword("thing")) {
                    model.things.push_back(parse_thing());
                } else if (peek().is_keyword("configuration")) {
                    model.configurations.push_back(parse_configuration());
                } else {
                    fail("expected 'thing' or 'configuration', found " + describe(peek()));
                }
            } catch (const SyntaxError&) {
                synchronize();
            }
        }
        return model;
    }

private:
    // -- token plumbing -----------------------------------------------------

    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }

    bool at_end() const { return peek().kind == TokenKind::End; }

    const Token& advance() {
        const Token& tok = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return tok;
    }

    [[noreturn]] void fail(const std::string& message, const char* code = "P001") {
        fail_at(toks_[pos_].pos, message, code);
    }

    [[noreturn]] void fail_at(SourcePos at, const std::string& message, const char* code = "P001") {
        diags_.push_back({Severity::Error, code, message, file_, at.line, at.column});
        throw SyntaxError{};
    }

    void synchronize() {
        if (!at_end()) advance();
        while (!at_end() && !peek().is_keyword("thing") && !peek().is_keyword("configuration")) advance();
    }

    const Token& expect_symbol(std::string_view sym) {
        if (!peek().is_symbol(sym)) fail("expected '" + std::string(sym) + "', found " + describe(peek()));
        return advance();
    }

    const Token& expect_keyword(std::string_view kw) {
        if (!peek().is_keyword(kw)) fail("expected '" + std::string(kw) + "', found " + describe(peek()));
        return advance();
    }

    NameRef expect_ident(std::string_view what = "identifier") {
        if (peek().kind != TokenKind::Identifier) {
            const Token& tok = peek();
            if (tok.kind == TokenKind::Keyword)
                fail("expected " + std::string(what) + ", found reserved word '" + tok.text + "'");
            fail("expected " + std::string(what) + ", found " + describe(tok));
        }
        const Token& tok = advance();
        return {tok.text, tok.pos};
    }

    bool accept_symbol(std::string_view sym) {
        if (!peek().is_symbol(sym)) return false;
        advance();
        return true;
    }

    bool accept_keyword(std::string_view kw) {
        if (!peek().is_keyword(kw)) return false;
        advance();
        return true;
    }

    std::vector<NameRef> parse_ident_list() {
        std::vector<NameRef> names{expect_ident()};
        while (accept_symbol(",")) names.push_back(expect_ident());
        return names;
    }

    ValueType parse_type() {
        static constexpr std::array<std::pair<std::string_view, ValueType>, 4> kTypes{{
            {"Int", ValueType::Int},
            {"Real", ValueType::Real},
            {"Bool", ValueType::Bool},
            {"String", ValueType::String},
        }};
        for (const auto& [spelling, type] : kTypes) {
            if (accept_keyword(spelling)) return type;
        }
        fail("expected a type (Int, Real, Bool or String), found " + describe(peek()));
    }

    // -- declarations -------------------------------------------------------

    Thing parse_thing() {
        Thing thing;
        thing.pos = expect_keyword("thing").pos;
        thing.name = expect_ident("thing name").name;
        expect_symbol("{");
        while (!peek().is_symbol("}")) {
            const Token& tok = peek();
            if (tok.is_keyword("property")) {
                thing.properties.push_back(parse_property());
            } else if (tok.is_keyword("message")) {
                thing.messages.push_back(parse_message());
            } else if (tok.is_keyword("provided") || tok.is_keyword("required")) {
                thing.ports.push_back(parse_port());
            } else if (tok.is_keyword("statechart")) {
                if (thing.statechart) fail("thing '" + thing.name + "' already has a statechart");
                thing.statechart = parse_statechart();
            } else if (tok.is_keyword("data_analytics")) {
                thing.analytics.push_back(parse_analytics());
            } else {
                fail("expected a thing member or '}', found " + describe(tok));
            }
        }
        advance();
        return thing;
    }

    Property parse_property() {
        Property prop;
        prop.pos = expect_keyword("property").pos;
        prop.name = expect_ident("property name").name;
        expect_symbol(":");
        prop.type = parse_type();
        if (accept_symbol("=")) prop.initial = parse_expression();
        return prop;
    }

    Message parse_message() {
        Message msg;
        msg.pos = expect_keyword("message").pos;
        msg.name = expect_ident("message name").name;
        expect_symbol("(");
        if (!peek().is_symbol(")")) {
            do {
                Parameter param;
                auto name = expect_ident("parameter name");
                param.name = std::move(name.name);
                param.pos = name.pos;
                expect_symbol(":");
                param.type = parse_type();
                msg.params.push_back(std::move(param));
            } while (accept_symbol(","));
        }
        expect_symbol(")");
        return msg;
    }

    Port parse_port() {
        Port port;
        const Token& dir = advance();
        port.pos = dir.pos;
        port.direction = dir.is_keyword("provided") ? PortDirection::Provided : PortDirection::Required;
        expect_keyword("port");
        port.name = expect_ident("port name").name;
        expect_symbol("{");
        if (accept_keyword("sends")) port.sends = parse_ident_list();
        if (accept_keyword("receives")) port.receives = parse_ident_list();
        expect_symbol("}");
        return port;
    }

    StateChart parse_statechart() {
        StateChart chart;
        chart.pos = expect_keyword("statechart").pos;
        expect_keyword("init");
        chart.initial = expect_ident("initial state name");
        expect_symbol("{");
        while (!accept_symbol("}")) {
            if (!peek().is_keyword("state")) fail("expected 'state' or '}', found " + describe(peek()));
            chart.states.push_back(parse_state());
        }
        return chart;
    }

    State parse_state() {
        State state;
        state.pos = expect_keyword("state").pos;
        state.name = expect_ident("state name").name;
        expect_symbol("{");
        if (accept_keyword("entry")) state.entry = parse_block();
        if (accept_keyword("exit")) state.exit = parse_block();
        while (!accept_symbol("}")) {
            if (!peek().is_keyword("transition")) fail("expected 'transition' or '}', found " + describe(peek()));
            state.transitions.push_back(parse_transition());
        }
        return state;
    }

    Transition parse_transition() {
        Transition tr;
        tr.pos = expect_keyword("transition").pos;
        if (accept_keyword("event")) {
            Trigger trigger;
            trigger.port = expect_ident("port name");
            expect_symbol("?");
            trigger.message = expect_ident("message name");
            tr.trigger = std::move(trigger);
        }
        if (accept_keyword("guard")) tr.guard = parse_expression();
        if (accept_symbol("->")) {
            tr.target = expect_ident("target state name");
        } else if (!accept_keyword("internal")) {
            fail("expected '->' or 'internal', found " + describe(peek()));
        }
        if (accept_keyword("action")) tr.action = parse_block();
        return tr;
    }

    Literal parse_literal() {
        const Token& tok = peek();
        if (tok.is_symbol("-")) {
            advance();
            const Token& num = peek();
            if (num.kind == TokenKind::Int) return -advance().int_value;
            if (num.kind == TokenKind::Real) return -advance().real_value;
            fail("expected a number after '-', found " + describe(num));
        }
        switch (tok.kind) {
        case TokenKind::Int: return advance().int_value;
        case TokenKind::Real: return advance().real_value;
        case TokenKind::String: return advance().text;
        default: break;
        }
        if (accept_keyword("true")) return true;
        if (accept_keyword("false")) return false;
        fail("expected a literal, found " + describe(tok));
    }

    DataAnalyticsBlock parse_analytics() {
        DataAnalyticsBlock da;
        da.pos = expect_keyword("data_analytics").pos;
        da.name = expect_ident("data analytics block name").name;
        expect_symbol("{");
        bool seen_features = false, seen_label = false, seen_dataset = false, seen_algorithm = false,
             seen_prediction = false;
        auto once = [&](bool& seen, const Token& field) {
            if (seen) fail_at(field.pos, "duplicate '" + field.text + "' field in data_analytics '" + da.name + "'");
            seen = true;
        };
        while (!peek().is_symbol("}")) {
            const Token& field = peek();
            if (field.is_keyword("features")) {
                once(seen_features, advance());
                expect_symbol(":");
                da.features = parse_ident_list();
            } else if (field.is_keyword("label")) {
                once(seen_label, advance());
                expect_symbol(":");
                da.label = expect_ident("label property");
            } else if (field.is_keyword("dataset")) {
                once(seen_dataset, advance());
                expect_symbol(":");
                if (peek().kind != TokenKind::String) fail("expected dataset path string, found " + describe(peek()));
                da.dataset = advance().text;
            } else if (field.is_keyword("algorithm")) {
                once(seen_algorithm, advance());
                expect_symbol(":");
                da.algorithm.kind = expect_ident("algorithm name");
                if (accept_symbol("(")) {
                    do {
                        Hyperparameter hp;
                        auto name = expect_ident("hyperparameter name");
                        hp.name = std::move(name.name);
                        hp.pos = name.pos;
                        expect_symbol("=");
                        hp.value = parse_literal();
                        da.algorithm.hyperparameters.push_back(std::move(hp));
                    } while (accept_symbol(","));
                    expect_symbol(")");
                }
            } else if (field.is_keyword("prediction")) {
                once(seen_prediction, advance());
                expect_symbol(":");
                da.prediction = expect_ident("prediction property");
            } else {
                fail("expected a data_analytics field or '}', found " + describe(field));
            }
        }
        const std::array<std::pair<bool, const char*>, 5> required{{
            {seen_features, "features"},
            {seen_label, "label"},
            {seen_dataset, "dataset"},
            {seen_algorithm, "algorithm"},
            {seen_prediction, "prediction"},
        }};
        for (const auto& [seen, name] : required) {
            if (!seen) fail("data_analytics '" + da.name + "' is missing the '" + name + "' field");
        }
        advance();
        return da;
    }

    Configuration parse_configuration() {
        Configuration config;
        config.pos = expect_keyword("configuration").pos;
        config.name = expect_ident("configuration name").name;
        expect_symbol("{");
        while (!accept_symbol("}")) {
            if (peek().is_keyword("instance")) {
                Instance inst;
                inst.pos = advance().pos;
                inst.name = expect_ident("instance name").name;
                expect_symbol(":");
                inst.thing = expect_ident("thing name");
                config.instances.push_back(std::move(inst));
            } else if (peek().is_keyword("connector")) {
                Connector conn;
                conn.pos = advance().pos;
                conn.from = parse_endpoint();
                expect_symbol("=>");
                conn.to = parse_endpoint();
                config.connectors.push_back(std::move(conn));
            } else {
                fail("expected 'instance', 'connector' or '}', found " + describe(peek()));
            }
        }
        return config;
    }

    Endpoint parse_endpoint() {
        Endpoint ep;
        ep.instance = expect_ident("instance name");
        expect_symbol(".");
        ep.port = expect_ident("port name");
        return ep;
    }

    // -- statements ---------------------------------------------------------

    Block parse_block() {
        expect_symbol("{");
        Block block;
        while (!accept_symbol("}")) block.push_back(parse_statement());
        return block;
    }

    Statement parse_statement() {
        Statement st;
        const Token& tok = peek();
        st.pos = tok.pos;
        if (tok.kind == TokenKind::Identifier) {
            if (peek(1).is_symbol("=")) {
                st.kind = Statement::Kind::Assign;
                st.name = advance().text;
                advance();
                st.exprs.push_back(parse_expression());
                expect_symbol(";");
            } else if (peek(1).is_symbol("!")) {
                st.kind = Statement::Kind::Send;
                st.name = advance().text;
                advance();
                st.message = expect_ident("message name").name;
                expect_symbol("(");
                if (!peek().is_symbol(")")) {
                    do st.exprs.push_back(parse_expression());
                    while (accept_symbol(","));
                }
                expect_symbol(")");
                expect_symbol(";");
            } else {
                fail("unknown statement keyword '" + tok.text + "'", "P004");
            }
            return st;
        }
        if (accept_keyword("var")) {
            st.kind = Statement::Kind::VarDecl;
            st.name = expect_ident("variable name").name;
            expect_symbol(":");
            st.type = parse_type();
            expect_symbol("=");
            st.exprs.push_back(parse_expression());
            expect_symbol(";");
        } else if (accept_keyword("if")) {
            st.kind = Statement::Kind::If;
            expect_symbol("(");
            st.exprs.push_back(parse_expression());
            expect_symbol(")");
            st.body = parse_block();
            if (accept_keyword("else")) {
                st.has_else = true;
                st.else_body = parse_block();
            }
        } else if (accept_keyword("while")) {
            st.kind = Statement::Kind::While;
            expect_symbol("(");
            st.exprs.push_back(parse_expression());
            expect_symbol(")");
            st.body = parse_block();
        } else if (accept_keyword("print")) {
            st.kind = Statement::Kind::Print;
            expect_symbol("(");
            st.exprs.push_back(parse_expression());
            expect_symbol(")");
            expect_symbol(";");
        } else if (tok.is_keyword("da_preprocess") || tok.is_keyword("da_train") || tok.is_keyword("da_predict") ||
                   tok.is_keyword("da_save")) {
            const std::string keyword = advance().text;
            st.kind = keyword == "da_preprocess" ? Statement::Kind::DaPreprocess
                      : keyword == "da_train"    ? Statement::Kind::DaTrain
                      : keyword == "da_predict"  ? Statement::Kind::DaPredict
                                                 : Statement::Kind::DaSave;
            expect_symbol("(");
            st.name = expect_ident("data analytics block name").name;
            if (st.kind == Statement::Kind::DaSave) {
                expect_symbol(",");
                if (peek().kind != TokenKind::String) fail("expected output path string, found " + describe(peek()));
                st.path = advance().text;
            }
            expect_symbol(")");
            expect_symbol(";");
        } else {
            fail("expected a statement, found " + describe(tok));
        }
        return st;
    }

    // -- expressions --------------------------------------------------------

    static std::optional<BinaryOp> binary_op_of(const Token& tok) {
        static constexpr std::array<std::pair<std::string_view, BinaryOp>, 13> kOps{{
            {"or", BinaryOp::Or},
            {"and", BinaryOp::And},
            {"==", BinaryOp::Eq},
            {"!=", BinaryOp::Ne},
            {"<", BinaryOp::Lt},
            {"<=", BinaryOp::Le},
            {">", BinaryOp::Gt},
            {">=", BinaryOp::Ge},
            {"+", BinaryOp::Add},
            {"-", BinaryOp::Sub},
            {"*", BinaryOp::Mul},
            {"/", BinaryOp::Div},
            {"%", BinaryOp::Mod},
        }};
        if (tok.kind != TokenKind::Symbol && tok.kind != TokenKind::Keyword) return std::nullopt;
        for (const auto& [spelling, op] : kOps) {
            if (tok.text == spelling) return op;
        }
        return std::nullopt;
    }

    Expression parse_expression(int min_precedence = 1) {
        Expression lhs = parse_unary();
        while (true) {
            auto op = binary_op_of(peek());
            if (!op || precedence(*op) < min_precedence) return lhs;
            advance();
            Expression rhs = parse_expression(precedence(*op) + 1);
            const SourcePos at = lhs.pos;
            lhs = Expression::make_binary(*op, std::move(lhs), std::move(rhs), at);
        }
    }

    Expression parse_unary() {
        const Token& tok = peek();
        if (tok.is_symbol("-")) {
            advance();
            return Expression::make_unary(UnaryOp::Neg, parse_unary(), tok.pos);
        }
        if (tok.is_keyword("not")) {
            advance();
            return Expression::make_unary(UnaryOp::Not, parse_unary(), tok.pos);
        }
        return parse_primary();
    }

    Expression parse_primary() {
        const Token& tok = peek();
        switch (tok.kind) {
        case TokenKind::Int: return Expression::make_literal(advance().int_value, tok.pos);
        case TokenKind::Real: return Expression::make_literal(advance().real_value, tok.pos);
        case TokenKind::String: return Expression::make_literal(advance().text, tok.pos);
        case TokenKind::Identifier: return Expression::make_name(advance().text, tok.pos);
        default: break;
        }
        if (accept_keyword("true")) return Expression::make_literal(true, tok.pos);
        if (accept_keyword("false")) return Expression::make_literal(false, tok.pos);
        if (accept_keyword("Now")) {
            expect_symbol("(");
            expect_symbol(")");
            return Expression::make_now(tok.pos);
        }
        if (accept_symbol("(")) {
            Expression inner = parse_expression();
            expect_symbol(")");
            return inner;
        }
        fail("expected an expression, found " + describe(tok));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::string file_;
    std::vector<Diagnostic>& diags_;
};

}  // namespace

ParseResult parse(std::string_view source, std::string_view source_name) {
    ParseResult result;
    const std::string file(source_name);
    auto tokens = detail::tokenize(source, file, result.diagnostics);
    Model model = Parser(std::move(tokens), file, result.diagnostics).parse_model();
    if (!has_errors(result.diagnostics)) result.model = std::move(model);
    return result;
}

}  // namespace tml2
