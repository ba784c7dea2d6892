#pragma once

// Abstract syntax of the modeling language. Every node is a plain value type;
// once the parser hands out a Model nothing mutates it.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tml2 {

/// Line/column of a node in its source file (both 1-based).
///
/// Positions never take part in equality, so the defaulted `operator==` of
/// every AST node compares structure only.
struct SourcePos {
    int line = 1;
    int column = 1;

    friend constexpr bool operator==(const SourcePos&, const SourcePos&) noexcept { return true; }
};

/// An identifier together with where it was written.
struct NameRef {
    std::string name;
    SourcePos pos;

    bool operator==(const NameRef&) const = default;
};

enum class ValueType { Int, Real, Bool, String };

std::string_view to_string(ValueType type) noexcept;
bool is_numeric(ValueType type) noexcept;

using Literal = std::variant<std::int64_t, double, bool, std::string>;

ValueType literal_type(const Literal& literal) noexcept;

enum class UnaryOp { Neg, Not };
enum class BinaryOp { Or, And, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul, Div, Mod };

std::string_view to_string(UnaryOp op) noexcept;
std::string_view to_string(BinaryOp op) noexcept;

/// Binding strength, loosest = 1 (`or`) up to 5 (`* / %`).
int precedence(BinaryOp op) noexcept;

struct Expression {
    enum class Kind { Literal, Name, Unary, Binary, Now };

    Kind kind = Kind::Literal;
    Literal literal;               // Kind::Literal
    std::string name;              // Kind::Name
    UnaryOp unary_op = UnaryOp::Neg;
    BinaryOp binary_op = BinaryOp::Add;
    std::vector<Expression> operands;  // 1 for Unary, 2 for Binary
    SourcePos pos;

    static Expression make_literal(Literal value, SourcePos pos = {});
    static Expression make_name(std::string name, SourcePos pos = {});
    static Expression make_unary(UnaryOp op, Expression operand, SourcePos pos = {});
    static Expression make_binary(BinaryOp op, Expression lhs, Expression rhs, SourcePos pos = {});
    static Expression make_now(SourcePos pos = {});

    bool operator==(const Expression&) const = default;
};

struct Statement {
    enum class Kind {
        VarDecl,
        Assign,
        Send,
        If,
        While,
        Print,
        DaPreprocess,
        DaTrain,
        DaPredict,
        DaSave,
    };

    Kind kind = Kind::Print;
    /// Variable, assignment target, port of a send, or DA block name.
    std::string name;
    std::string message;            // Send
    ValueType type = ValueType::Int;  // VarDecl
    /// VarDecl/Assign: {value}; If/While: {condition}; Print: {value}; Send: arguments.
    std::vector<Expression> exprs;
    std::vector<Statement> body;       // If (then branch), While
    std::vector<Statement> else_body;  // If
    bool has_else = false;
    std::string path;  // DaSave
    SourcePos pos;

    bool operator==(const Statement&) const = default;
};

using Block = std::vector<Statement>;

struct Trigger {
    NameRef port;
    NameRef message;

    bool operator==(const Trigger&) const = default;
};

struct Transition {
    std::optional<Trigger> trigger;  // absent: eventless
    std::optional<Expression> guard;
    std::optional<NameRef> target;  // absent: internal transition
    std::optional<Block> action;
    SourcePos pos;

    bool is_internal() const noexcept { return !target.has_value(); }
    bool is_eventless() const noexcept { return !trigger.has_value(); }
    bool operator==(const Transition&) const = default;
};

struct State {
    std::string name;
    std::optional<Block> entry;
    std::optional<Block> exit;
    std::vector<Transition> transitions;
    SourcePos pos;

    bool operator==(const State&) const = default;
};

struct StateChart {
    NameRef initial;
    std::vector<State> states;
    SourcePos pos;

    const State* find_state(std::string_view name) const noexcept;
    int state_index(std::string_view name) const noexcept;
    bool operator==(const StateChart&) const = default;
};

struct Property {
    std::string name;
    ValueType type = ValueType::Int;
    std::optional<Expression> initial;
    SourcePos pos;

    bool operator==(const Property&) const = default;
};

struct Parameter {
    std::string name;
    ValueType type = ValueType::Int;
    SourcePos pos;

    bool operator==(const Parameter&) const = default;
};

struct Message {
    std::string name;
    std::vector<Parameter> params;
    SourcePos pos;

    bool operator==(const Message&) const = default;
};

enum class PortDirection { Provided, Required };

struct Port {
    std::string name;
    PortDirection direction = PortDirection::Provided;
    std::vector<NameRef> sends;
    std::vector<NameRef> receives;
    SourcePos pos;

    bool can_send(std::string_view message) const noexcept;
    bool can_receive(std::string_view message) const noexcept;
    bool operator==(const Port&) const = default;
};

struct Hyperparameter {
    std::string name;
    Literal value;
    SourcePos pos;

    bool operator==(const Hyperparameter&) const = default;
};

/// Algorithm as written: the kind is kept as text so an unknown name is a
/// validation finding rather than a parse failure.
struct AlgorithmSpec {
    NameRef kind;
    std::vector<Hyperparameter> hyperparameters;

    bool operator==(const AlgorithmSpec&) const = default;
};

struct DataAnalyticsBlock {
    std::string name;
    std::vector<NameRef> features;
    NameRef label;
    std::string dataset;
    AlgorithmSpec algorithm;
    NameRef prediction;
    SourcePos pos;

    bool operator==(const DataAnalyticsBlock&) const = default;
};

struct Thing {
    std::string name;
    std::vector<Property> properties;
    std::vector<Message> messages;
    std::vector<Port> ports;
    std::optional<StateChart> statechart;
    std::vector<DataAnalyticsBlock> analytics;
    SourcePos pos;

    const Property* find_property(std::string_view name) const noexcept;
    const Message* find_message(std::string_view name) const noexcept;
    const Port* find_port(std::string_view name) const noexcept;
    const DataAnalyticsBlock* find_analytics(std::string_view name) const noexcept;
    bool operator==(const Thing&) const = default;
};

struct Instance {
    std::string name;
    NameRef thing;
    SourcePos pos;

    bool operator==(const Instance&) const = default;
};

struct Endpoint {
    NameRef instance;
    NameRef port;

    bool operator==(const Endpoint&) const = default;
};

struct Connector {
    Endpoint from;
    Endpoint to;
    SourcePos pos;

    bool operator==(const Connector&) const = default;
};

struct Configuration {
    std::string name;
    std::vector<Instance> instances;
    std::vector<Connector> connectors;
    SourcePos pos;

    const Instance* find_instance(std::string_view name) const noexcept;
    bool operator==(const Configuration&) const = default;
};

struct Model {
    std::vector<Thing> things;
    std::vector<Configuration> configurations;
    std::string source_name;

    const Thing* find_thing(std::string_view name) const noexcept;
    const Configuration* find_configuration(std::string_view name) const noexcept;
};

/// True iff both models have the same declarations, names, orders and
/// literals. Source positions and the source name are ignored.
bool equals_structural(const Model& a, const Model& b);

}  // namespace tml2
