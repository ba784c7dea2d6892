#include "tml2/parser.hpp"

#include <charconv>
#include <sstream>

namespace tml2 {

namespace {

std::string render_real(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    std::string text(buf, end);
    // Real literals always carry a decimal point.
    const auto exp = text.find('e');
    const auto mantissa_end = exp == std::string::npos ? text.size() : exp;
    if (text.find('.') == std::string::npos) text.insert(mantissa_end, ".0");
    return text;
}

std::string render_string(const std::string& value) {
    std::string out = "\"";
    for (char c : value) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c; break;
        }
    }
    out += '"';
    return out;
}

std::string join(const std::vector<NameRef>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ", ";
        out += names[i].name;
    }
    return out;
}

std::string render_expression(const Expression& e);

// Operands bind at least as tightly as their parent; right operands of a
// left-associative operator need parentheses at equal precedence.
std::string render_operand(const Expression& operand, int parent_precedence, bool right_side) {
    std::string text = render_expression(operand);
    if (operand.kind == Expression::Kind::Binary) {
        const int p = precedence(operand.binary_op);
        if (p < parent_precedence || (right_side && p == parent_precedence)) return "(" + text + ")";
    }
    return text;
}

std::string render_expression(const Expression& e) {
    switch (e.kind) {
    case Expression::Kind::Literal: return render_literal(e.literal);
    case Expression::Kind::Name: return e.name;
    case Expression::Kind::Now: return "Now()";
    case Expression::Kind::Unary: {
        const Expression& operand = e.operands.front();
        std::string inner = render_expression(operand);
        if (operand.kind == Expression::Kind::Binary) inner = "(" + inner + ")";
        if (e.unary_op == UnaryOp::Not) return "not " + inner;
        // Keep `- -x` from lexing as a different token sequence.
        if (operand.kind == Expression::Kind::Unary && operand.unary_op == UnaryOp::Neg) return "-(" + inner + ")";
        return "-" + inner;
    }
    case Expression::Kind::Binary: {
        const int p = precedence(e.binary_op);
        return render_operand(e.operands[0], p, false) + " " + std::string(to_string(e.binary_op)) + " " +
               render_operand(e.operands[1], p, true);
    }
    }
    return {};
}

class Printer {
public:
    std::string run(const Model& model) {
        bool first = true;
        for (const auto& thing : model.things) {
            if (!first) out_ << '\n';
            first = false;
            print_thing(thing);
        }
        for (const auto& config : model.configurations) {
            if (!first) out_ << '\n';
            first = false;
            print_configuration(config);
        }
        return out_.str();
    }

private:
    std::ostream& line(int depth) {
        for (int i = 0; i < depth; ++i) out_ << "    ";
        return out_;
    }

    void print_thing(const Thing& thing) {
        line(0) << "thing " << thing.name << " {\n";
        for (const auto& prop : thing.properties) {
            line(1) << "property " << prop.name << ": " << to_string(prop.type);
            if (prop.initial) out_ << " = " << render_expression(*prop.initial);
            out_ << '\n';
        }
        for (const auto& msg : thing.messages) {
            line(1) << "message " << msg.name << "(";
            for (std::size_t i = 0; i < msg.params.size(); ++i) {
                if (i) out_ << ", ";
                out_ << msg.params[i].name << ": " << to_string(msg.params[i].type);
            }
            out_ << ")\n";
        }
        for (const auto& port : thing.ports) {
            line(1) << (port.direction == PortDirection::Provided ? "provided" : "required") << " port " << port.name
                    << " {\n";
            if (!port.sends.empty()) line(2) << "sends " << join(port.sends) << '\n';
            if (!port.receives.empty()) line(2) << "receives " << join(port.receives) << '\n';
            line(1) << "}\n";
        }
        if (thing.statechart) print_statechart(*thing.statechart);
        for (const auto& da : thing.analytics) print_analytics(da);
        line(0) << "}\n";
    }

    void print_statechart(const StateChart& chart) {
        line(1) << "statechart init " << chart.initial.name << " {\n";
        for (const auto& state : chart.states) {
            line(2) << "state " << state.name << " {\n";
            if (state.entry) {
                line(3) << "entry ";
                print_block(*state.entry, 3);
                out_ << '\n';
            }
            if (state.exit) {
                line(3) << "exit ";
                print_block(*state.exit, 3);
                out_ << '\n';
            }
            for (const auto& tr : state.transitions) {
                line(3) << "transition";
                if (tr.trigger) out_ << " event " << tr.trigger->port.name << "?" << tr.trigger->message.name;
                if (tr.guard) out_ << " guard " << render_expression(*tr.guard);
                if (tr.target) {
                    out_ << " -> " << tr.target->name;
                } else {
                    out_ << " internal";
                }
                if (tr.action) {
                    out_ << " action ";
                    print_block(*tr.action, 3);
                }
                out_ << '\n';
            }
            line(2) << "}\n";
        }
        line(1) << "}\n";
    }

    void print_analytics(const DataAnalyticsBlock& da) {
        line(1) << "data_analytics " << da.name << " {\n";
        line(2) << "features: " << join(da.features) << '\n';
        line(2) << "label: " << da.label.name << '\n';
        line(2) << "dataset: " << render_string(da.dataset) << '\n';
        line(2) << "algorithm: " << da.algorithm.kind.name;
        if (!da.algorithm.hyperparameters.empty()) {
            out_ << "(";
            for (std::size_t i = 0; i < da.algorithm.hyperparameters.size(); ++i) {
                const auto& hp = da.algorithm.hyperparameters[i];
                if (i) out_ << ", ";
                out_ << hp.name << " = " << render_literal(hp.value);
            }
            out_ << ")";
        }
        out_ << '\n';
        line(2) << "prediction: " << da.prediction.name << '\n';
        line(1) << "}\n";
    }

    void print_configuration(const Configuration& config) {
        line(0) << "configuration " << config.name << " {\n";
        for (const auto& inst : config.instances) line(1) << "instance " << inst.name << ": " << inst.thing.name << '\n';
        for (const auto& conn : config.connectors) {
            line(1) << "connector " << conn.from.instance.name << "." << conn.from.port.name << " => "
                    << conn.to.instance.name << "." << conn.to.port.name << '\n';
        }
        line(0) << "}\n";
    }

    // Opening brace continues the current line; closing brace sits at `depth`.
    void print_block(const Block& block, int depth) {
        out_ << "{\n";
        for (const auto& st : block) print_statement(st, depth + 1);
        line(depth) << "}";
    }

    void print_statement(const Statement& st, int depth) {
        using Kind = Statement::Kind;
        switch (st.kind) {
        case Kind::VarDecl:
            line(depth) << "var " << st.name << ": " << to_string(st.type) << " = " << render_expression(st.exprs[0])
                        << ";\n";
            break;
        case Kind::Assign: line(depth) << st.name << " = " << render_expression(st.exprs[0]) << ";\n"; break;
        case Kind::Send:
            line(depth) << st.name << "!" << st.message << "(";
            for (std::size_t i = 0; i < st.exprs.size(); ++i) {
                if (i) out_ << ", ";
                out_ << render_expression(st.exprs[i]);
            }
            out_ << ");\n";
            break;
        case Kind::If:
            line(depth) << "if (" << render_expression(st.exprs[0]) << ") ";
            print_block(st.body, depth);
            if (st.has_else) {
                out_ << " else ";
                print_block(st.else_body, depth);
            }
            out_ << '\n';
            break;
        case Kind::While:
            line(depth) << "while (" << render_expression(st.exprs[0]) << ") ";
            print_block(st.body, depth);
            out_ << '\n';
            break;
        case Kind::Print: line(depth) << "print(" << render_expression(st.exprs[0]) << ");\n"; break;
        case Kind::DaPreprocess: line(depth) << "da_preprocess(" << st.name << ");\n"; break;
        case Kind::DaTrain: line(depth) << "da_train(" << st.name << ");\n"; break;
        case Kind::DaPredict: line(depth) << "da_predict(" << st.name << ");\n"; break;
        case Kind::DaSave: line(depth) << "da_save(" << st.name << ", " << render_string(st.path) << ");\n"; break;
        }
    }

    std::ostringstream out_;
};

}  // namespace

std::string render_literal(const Literal& literal) {
    switch (literal.index()) {
    case 0: return std::to_string(std::get<std::int64_t>(literal));
    case 1: return render_real(std::get<double>(literal));
    case 2: return std::get<bool>(literal) ? "true" : "false";
    default: return render_string(std::get<std::string>(literal));
    }
}

std::string pretty_print(const Model& model) { return Printer().run(model); }

}  // namespace tml2
