#include "tml2/interpreter.hpp"

#include <cmath>
#include <limits>

namespace tml2 {

namespace {

constexpr std::int64_t kIntMin = std::numeric_limits<std::int64_t>::min();

std::int64_t wrap(std::uint64_t bits) { return static_cast<std::int64_t>(bits); }

std::int64_t int_arith(BinaryOp op, std::int64_t a, std::int64_t b) {
    const auto ua = static_cast<std::uint64_t>(a);
    const auto ub = static_cast<std::uint64_t>(b);
    switch (op) {
    case BinaryOp::Add: return wrap(ua + ub);
    case BinaryOp::Sub: return wrap(ua - ub);
    case BinaryOp::Mul: return wrap(ua * ub);
    case BinaryOp::Div:
        if (b == 0) throw Error("E-DIV", "integer division by zero");
        if (a == kIntMin && b == -1) return kIntMin;
        return a / b;
    case BinaryOp::Mod:
        if (b == 0) throw Error("E-DIV", "integer modulo by zero");
        if (b == -1) return 0;
        return a % b;
    default: break;
    }
    throw Error("E-TYPE", "not an arithmetic operator");
}

double real_arith(BinaryOp op, double a, double b) {
    switch (op) {
    case BinaryOp::Add: return a + b;
    case BinaryOp::Sub: return a - b;
    case BinaryOp::Mul: return a * b;
    case BinaryOp::Div:
        if (b == 0.0) throw Error("E-DIV", "real division by zero");
        return a / b;
    case BinaryOp::Mod:
        if (b == 0.0) throw Error("E-DIV", "real modulo by zero");
        return std::fmod(a, b);
    default: break;
    }
    throw Error("E-TYPE", "not an arithmetic operator");
}

double as_real(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    return std::get<double>(v);
}

bool is_number(const Value& v) { return v.index() <= 1; }

template <typename Cmp>
bool compare(const Value& a, const Value& b, Cmp cmp) {
    const auto* ia = std::get_if<std::int64_t>(&a);
    const auto* ib = std::get_if<std::int64_t>(&b);
    if (ia && ib) return cmp(*ia, *ib);
    return cmp(as_real(a), as_real(b));
}

bool equal(const Value& a, const Value& b) {
    if (is_number(a) && is_number(b)) return compare(a, b, std::equal_to<>{});
    return a == b;
}

class Evaluator {
public:
    Evaluator(const NameLookup& lookup, std::int64_t now) : lookup_(lookup), now_(now) {}

    Value operator()(const Expression& e) const {
        switch (e.kind) {
        case Expression::Kind::Literal: return e.literal;
        case Expression::Kind::Now: return now_;
        case Expression::Kind::Name: {
            const Value* v = lookup_(e.name);
            if (!v) throw Error("E-NAME", "unbound name '" + e.name + "'");
            return *v;
        }
        case Expression::Kind::Unary: {
            Value v = (*this)(e.operands[0]);
            if (e.unary_op == UnaryOp::Not) return !std::get<bool>(v);
            if (const auto* i = std::get_if<std::int64_t>(&v)) return wrap(0 - static_cast<std::uint64_t>(*i));
            return -std::get<double>(v);
        }
        case Expression::Kind::Binary: return binary(e);
        }
        throw Error("E-TYPE", "malformed expression");
    }

private:
    Value binary(const Expression& e) const {
        const BinaryOp op = e.binary_op;
        Value lhs = (*this)(e.operands[0]);
        if (op == BinaryOp::And) return std::get<bool>(lhs) && std::get<bool>((*this)(e.operands[1]));
        if (op == BinaryOp::Or) return std::get<bool>(lhs) || std::get<bool>((*this)(e.operands[1]));
        Value rhs = (*this)(e.operands[1]);
        switch (op) {
        case BinaryOp::Eq: return equal(lhs, rhs);
        case BinaryOp::Ne: return !equal(lhs, rhs);
        case BinaryOp::Lt: return compare(lhs, rhs, std::less<>{});
        case BinaryOp::Le: return compare(lhs, rhs, std::less_equal<>{});
        case BinaryOp::Gt: return compare(lhs, rhs, std::greater<>{});
        case BinaryOp::Ge: return compare(lhs, rhs, std::greater_equal<>{});
        default: break;
        }
        if (op == BinaryOp::Add) {
            if (const auto* s = std::get_if<std::string>(&lhs)) return *s + std::get<std::string>(rhs);
        }
        const auto* ia = std::get_if<std::int64_t>(&lhs);
        const auto* ib = std::get_if<std::int64_t>(&rhs);
        if (ia && ib) return int_arith(op, *ia, *ib);
        return real_arith(op, as_real(lhs), as_real(rhs));
    }

    const NameLookup& lookup_;
    std::int64_t now_;
};

}  // namespace

Value eval(const Expression& expr, const NameLookup& lookup, std::int64_t now) {
    try {
        return Evaluator(lookup, now)(expr);
    } catch (const std::bad_variant_access&) {
        throw Error("E-TYPE", "operand has the wrong type (model not validated?)");
    }
}

Value eval(const Expression& expr, const std::map<std::string, Value, std::less<>>& env, std::int64_t now) {
    const NameLookup lookup = [&env](std::string_view name) -> const Value* {
        auto it = env.find(name);
        return it == env.end() ? nullptr : &it->second;
    };
    return eval(expr, lookup, now);
}

nlohmann::ordered_json to_json(const Value& value) {
    return std::visit([](const auto& v) { return nlohmann::ordered_json(v); }, value);
}

}  // namespace tml2
