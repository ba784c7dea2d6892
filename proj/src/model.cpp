#include "tml2/model.hpp"

#include <algorithm>

namespace tml2 {

namespace {

template <typename T>
const T* find_named(const std::vector<T>& items, std::string_view name) noexcept {
    auto it = std::find_if(items.begin(), items.end(), [&](const T& item) { return item.name == name; });
    return it == items.end() ? nullptr : &*it;
}

bool contains_name(const std::vector<NameRef>& names, std::string_view name) noexcept {
    return std::any_of(names.begin(), names.end(), [&](const NameRef& n) { return n.name == name; });
}

}  // namespace

std::string_view to_string(ValueType type) noexcept {
    switch (type) {
    case ValueType::Int: return "Int";
    case ValueType::Real: return "Real";
    case ValueType::Bool: return "Bool";
    case ValueType::String: return "String";
    }
    return "?";
}

bool is_numeric(ValueType type) noexcept { return type == ValueType::Int || type == ValueType::Real; }

ValueType literal_type(const Literal& literal) noexcept {
    switch (literal.index()) {
    case 0: return ValueType::Int;
    case 1: return ValueType::Real;
    case 2: return ValueType::Bool;
    default: return ValueType::String;
    }
}

std::string_view to_string(UnaryOp op) noexcept { return op == UnaryOp::Neg ? "-" : "not"; }

std::string_view to_string(BinaryOp op) noexcept {
    switch (op) {
    case BinaryOp::Or: return "or";
    case BinaryOp::And: return "and";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    }
    return "?";
}

int precedence(BinaryOp op) noexcept {
    switch (op) {
    case BinaryOp::Or: return 1;
    case BinaryOp::And: return 2;
    case BinaryOp::Eq:
    case BinaryOp::Ne:
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 3;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 4;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return 5;
    }
    return 0;
}

Expression Expression::make_literal(Literal value, SourcePos pos) {
    Expression e;
    e.kind = Kind::Literal;
    e.literal = std::move(value);
    e.pos = pos;
    return e;
}

Expression Expression::make_name(std::string name, SourcePos pos) {
    Expression e;
    e.kind = Kind::Name;
    e.name = std::move(name);
    e.pos = pos;
    return e;
}

Expression Expression::make_unary(UnaryOp op, Expression operand, SourcePos pos) {
    Expression e;
    e.kind = Kind::Unary;
    e.unary_op = op;
    e.operands.push_back(std::move(operand));
    e.pos = pos;
    return e;
}

Expression Expression::make_binary(BinaryOp op, Expression lhs, Expression rhs, SourcePos pos) {
    Expression e;
    e.kind = Kind::Binary;
    e.binary_op = op;
    e.operands.push_back(std::move(lhs));
    e.operands.push_back(std::move(rhs));
    e.pos = pos;
    return e;
}

Expression Expression::make_now(SourcePos pos) {
    Expression e;
    e.kind = Kind::Now;
    e.pos = pos;
    return e;
}

const State* StateChart::find_state(std::string_view name) const noexcept { return find_named(states, name); }

int StateChart::state_index(std::string_view name) const noexcept {
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

bool Port::can_send(std::string_view message) const noexcept { return contains_name(sends, message); }
bool Port::can_receive(std::string_view message) const noexcept { return contains_name(receives, message); }

const Property* Thing::find_property(std::string_view name) const noexcept { return find_named(properties, name); }
const Message* Thing::find_message(std::string_view name) const noexcept { return find_named(messages, name); }
const Port* Thing::find_port(std::string_view name) const noexcept { return find_named(ports, name); }
const DataAnalyticsBlock* Thing::find_analytics(std::string_view name) const noexcept {
    return find_named(analytics, name);
}

const Instance* Configuration::find_instance(std::string_view name) const noexcept {
    return find_named(instances, name);
}

const Thing* Model::find_thing(std::string_view name) const noexcept { return find_named(things, name); }
const Configuration* Model::find_configuration(std::string_view name) const noexcept {
    return find_named(configurations, name);
}

bool equals_structural(const Model& a, const Model& b) {
    return a.things == b.things && a.configurations == b.configurations;
}

}  // namespace tml2
