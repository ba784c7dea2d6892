#include "tml2/validator.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace tml2 {

namespace {

using Binding = std::pair<std::string, ValueType>;

bool assignable(ValueType target, ValueType value) {
    return target == value || (target == ValueType::Real && value == ValueType::Int);
}

std::string squote(std::string_view s) { return "'" + std::string(s) + "'"; }

// Name scope inside one action block, guard or initializer.
struct Scope {
    const Thing* thing = nullptr;
    const std::vector<Parameter>* params = nullptr;
    std::vector<std::vector<Binding>> locals;
    // Property initializers only see properties declared before them.
    std::size_t visible_properties = static_cast<std::size_t>(-1);

    std::optional<ValueType> lookup(const std::string& name) const {
        for (auto frame = locals.rbegin(); frame != locals.rend(); ++frame) {
            for (const auto& [n, t] : *frame) {
                if (n == name) return t;
            }
        }
        if (params) {
            for (const auto& p : *params) {
                if (p.name == name) return p.type;
            }
        }
        const auto limit = std::min(visible_properties, thing->properties.size());
        for (std::size_t i = 0; i < limit; ++i) {
            if (thing->properties[i].name == name) return thing->properties[i].type;
        }
        return std::nullopt;
    }

    bool is_param(const std::string& name) const {
        for (auto frame = locals.rbegin(); frame != locals.rend(); ++frame) {
            for (const auto& [n, t] : *frame) {
                if (n == name) return false;
            }
        }
        if (!params) return false;
        return std::any_of(params->begin(), params->end(), [&](const Parameter& p) { return p.name == name; });
    }

    bool local_declared(const std::string& name) const {
        for (const auto& frame : locals) {
            for (const auto& [n, t] : frame) {
                if (n == name) return true;
            }
        }
        return false;
    }
};

class Validator {
public:
    explicit Validator(const Model& model) : model_(model) {}

    ValidationReport run() {
        check_unique(model_.things, "thing");
        check_unique(model_.configurations, "configuration");
        for (const auto& thing : model_.things) check_thing(thing);
        for (const auto& config : model_.configurations) check_configuration(config);

        ValidationReport report;
        report.diagnostics = std::move(diags_);
        std::stable_sort(report.diagnostics.begin(), report.diagnostics.end(), [](const auto& a, const auto& b) {
            return std::tie(a.file, a.line, a.column) < std::tie(b.file, b.line, b.column);
        });
        report.ok = !has_errors(report.diagnostics);
        return report;
    }

private:
    void report(Severity severity, const char* code, SourcePos pos, std::string message) {
        diags_.push_back({severity, code, std::move(message), model_.source_name, pos.line, pos.column});
    }
    void error(const char* code, SourcePos pos, std::string message) {
        report(Severity::Error, code, pos, std::move(message));
    }
    void warning(const char* code, SourcePos pos, std::string message) {
        report(Severity::Warning, code, pos, std::move(message));
    }

    template <typename T>
    void check_unique(const std::vector<T>& items, std::string_view what) {
        std::set<std::string> seen;
        for (const auto& item : items) {
            if (!seen.insert(item.name).second) error("V001", item.pos, "duplicate " + std::string(what) + " " + squote(item.name));
        }
    }

    void check_unique_refs(const std::vector<NameRef>& names, std::string_view what) {
        std::set<std::string> seen;
        for (const auto& n : names) {
            if (!seen.insert(n.name).second) error("V001", n.pos, "duplicate " + std::string(what) + " " + squote(n.name));
        }
    }

    // -- things -------------------------------------------------------------

    void check_thing(const Thing& thing) {
        thing_ = &thing;
        used_analytics_.clear();
        check_unique(thing.properties, "property");
        check_unique(thing.messages, "message");
        check_unique(thing.ports, "port");
        check_unique(thing.analytics, "data_analytics block");

        for (std::size_t i = 0; i < thing.properties.size(); ++i) {
            const auto& prop = thing.properties[i];
            if (!prop.initial) continue;
            Scope scope{&thing, nullptr, {}};
            scope.visible_properties = i;
            auto type = type_of(*prop.initial, scope);
            if (type && !assignable(prop.type, *type)) {
                error("V006", prop.initial->pos,
                      "initializer of property " + squote(prop.name) + " has type " + std::string(to_string(*type)) +
                          ", expected " + std::string(to_string(prop.type)));
            }
        }

        for (const auto& msg : thing.messages) check_unique(msg.params, "parameter");

        std::set<std::string> referenced_messages;
        for (const auto& port : thing.ports) {
            check_unique_refs(port.sends, "message in 'sends' of port " + squote(port.name) + ":");
            check_unique_refs(port.receives, "message in 'receives' of port " + squote(port.name) + ":");
            for (const auto* list : {&port.sends, &port.receives}) {
                for (const auto& ref : *list) {
                    referenced_messages.insert(ref.name);
                    if (!thing.find_message(ref.name)) {
                        error("V002", ref.pos,
                              "port " + squote(port.name) + " names undeclared message " + squote(ref.name));
                    }
                }
            }
        }
        for (const auto& msg : thing.messages) {
            if (!referenced_messages.count(msg.name))
                warning("V102", msg.pos, "message " + squote(msg.name) + " is not used by any port");
        }

        for (const auto& da : thing.analytics) check_analytics(da);
        if (thing.statechart) check_statechart(*thing.statechart);

        for (const auto& da : thing.analytics) {
            if (!used_analytics_.count(da.name))
                warning("V103", da.pos, "data_analytics block " + squote(da.name) + " is never used by a da_* action");
        }
    }

    void check_statechart(const StateChart& chart) {
        check_unique(chart.states, "state");
        const bool has_initial = chart.find_state(chart.initial.name) != nullptr;
        if (!has_initial)
            error("V003", chart.initial.pos, "initial state " + squote(chart.initial.name) + " is not defined");

        std::set<std::string> has_inbound;
        for (const auto& state : chart.states) {
            if (state.entry) check_block(*state.entry, nullptr);
            if (state.exit) check_block(*state.exit, nullptr);
            for (const auto& tr : state.transitions) {
                if (tr.target) {
                    if (!chart.find_state(tr.target->name)) {
                        error("V004", tr.target->pos, "transition target state " + squote(tr.target->name) + " is not defined");
                    } else if (tr.target->name != state.name) {
                        has_inbound.insert(tr.target->name);
                    }
                }
                check_transition(tr);
            }
        }
        // Without an initial state there is nothing to measure reachability from.
        for (const auto& state : chart.states) {
            if (has_initial && state.name != chart.initial.name && !has_inbound.count(state.name))
                warning("V101", state.pos, "state " + squote(state.name) + " is unreachable");
        }
    }

    void check_transition(const Transition& tr) {
        const std::vector<Parameter>* params = nullptr;
        if (tr.trigger) {
            const Port* port = thing_->find_port(tr.trigger->port.name);
            if (!port) {
                error("V005", tr.trigger->port.pos, "trigger references unknown port " + squote(tr.trigger->port.name));
            } else if (!port->can_receive(tr.trigger->message.name)) {
                error("V005", tr.trigger->message.pos,
                      "port " + squote(port->name) + " does not receive message " + squote(tr.trigger->message.name));
            } else if (const Message* msg = thing_->find_message(tr.trigger->message.name)) {
                params = &msg->params;
            }
        }
        if (tr.guard) {
            Scope scope{thing_, params, {}};
            auto type = type_of(*tr.guard, scope);
            if (type && *type != ValueType::Bool)
                error("V006", tr.guard->pos, "guard has type " + std::string(to_string(*type)) + ", expected Bool");
        }
        if (tr.action) check_block(*tr.action, params);
    }

    void check_block(const Block& block, const std::vector<Parameter>* params) {
        Scope scope{thing_, params, {}};
        check_statements(block, scope);
    }

    void check_statements(const Block& block, Scope& scope) {
        scope.locals.emplace_back();
        for (const auto& st : block) check_statement(st, scope);
        scope.locals.pop_back();
    }

    void expect_condition(const Expression& cond, Scope& scope, std::string_view what) {
        auto type = type_of(cond, scope);
        if (type && *type != ValueType::Bool) {
            error("V006", cond.pos,
                  std::string(what) + " condition has type " + std::string(to_string(*type)) + ", expected Bool");
        }
    }

    void check_statement(const Statement& st, Scope& scope) {
        using Kind = Statement::Kind;
        switch (st.kind) {
        case Kind::VarDecl: {
            auto type = type_of(st.exprs[0], scope);
            if (type && !assignable(st.type, *type)) {
                error("V006", st.exprs[0].pos,
                      "initializer of variable " + squote(st.name) + " has type " + std::string(to_string(*type)) +
                          ", expected " + std::string(to_string(st.type)));
            }
            if (scope.local_declared(st.name)) {
                error("V001", st.pos, "duplicate variable " + squote(st.name));
            } else {
                scope.locals.back().emplace_back(st.name, st.type);
            }
            break;
        }
        case Kind::Assign: {
            auto value = type_of(st.exprs[0], scope);
            if (scope.is_param(st.name)) {
                error("V007", st.pos, "cannot assign to trigger parameter " + squote(st.name));
                break;
            }
            auto target = scope.lookup(st.name);
            if (!target) {
                error("V007", st.pos, "assignment to undeclared property or variable " + squote(st.name));
            } else if (value && !assignable(*target, *value)) {
                error("V006", st.exprs[0].pos,
                      "cannot assign " + std::string(to_string(*value)) + " to " + squote(st.name) + " of type " +
                          std::string(to_string(*target)));
            }
            break;
        }
        case Kind::Send: check_send(st, scope); break;
        case Kind::If:
            expect_condition(st.exprs[0], scope, "if");
            check_statements(st.body, scope);
            if (st.has_else) check_statements(st.else_body, scope);
            break;
        case Kind::While:
            expect_condition(st.exprs[0], scope, "while");
            check_statements(st.body, scope);
            break;
        case Kind::Print: type_of(st.exprs[0], scope); break;
        case Kind::DaPreprocess:
        case Kind::DaTrain:
        case Kind::DaPredict:
        case Kind::DaSave:
            if (thing_->analytics.empty()) {
                error("V014", st.pos, "da_* action in thing " + squote(thing_->name) + " which has no data_analytics block");
            } else if (!thing_->find_analytics(st.name)) {
                error("V014", st.pos, "undeclared data_analytics block " + squote(st.name));
            } else {
                used_analytics_.insert(st.name);
            }
            break;
        }
    }

    void check_send(const Statement& st, Scope& scope) {
        std::vector<std::optional<ValueType>> arg_types;
        for (const auto& arg : st.exprs) arg_types.push_back(type_of(arg, scope));

        const Port* port = thing_->find_port(st.name);
        if (!port) {
            error("V006", st.pos, "send on unknown port " + squote(st.name));
            return;
        }
        if (!port->can_send(st.message)) {
            error("V006", st.pos, "port " + squote(port->name) + " does not send message " + squote(st.message));
            return;
        }
        const Message* msg = thing_->find_message(st.message);
        if (!msg) return;  // already V002 on the port
        if (msg->params.size() != st.exprs.size()) {
            error("V006", st.pos,
                  "message " + squote(msg->name) + " takes " + std::to_string(msg->params.size()) + " argument(s), " +
                      std::to_string(st.exprs.size()) + " given");
            return;
        }
        for (std::size_t i = 0; i < st.exprs.size(); ++i) {
            if (arg_types[i] && !assignable(msg->params[i].type, *arg_types[i])) {
                error("V006", st.exprs[i].pos,
                      "argument " + squote(msg->params[i].name) + " of " + squote(msg->name) + " has type " +
                          std::string(to_string(*arg_types[i])) + ", expected " +
                          std::string(to_string(msg->params[i].type)));
            }
        }
    }

    // Static type of `e`, or nullopt after reporting a V006.
    std::optional<ValueType> type_of(const Expression& e, const Scope& scope) {
        switch (e.kind) {
        case Expression::Kind::Literal: return literal_type(e.literal);
        case Expression::Kind::Now: return ValueType::Int;
        case Expression::Kind::Name: {
            auto type = scope.lookup(e.name);
            if (!type) error("V006", e.pos, "unknown name " + squote(e.name));
            return type;
        }
        case Expression::Kind::Unary: {
            auto operand = type_of(e.operands[0], scope);
            if (!operand) return std::nullopt;
            if (e.unary_op == UnaryOp::Not) {
                if (*operand == ValueType::Bool) return ValueType::Bool;
                error("V006", e.pos, "operator 'not' expects Bool, found " + std::string(to_string(*operand)));
                return std::nullopt;
            }
            if (is_numeric(*operand)) return operand;
            error("V006", e.pos, "unary '-' expects a number, found " + std::string(to_string(*operand)));
            return std::nullopt;
        }
        case Expression::Kind::Binary: {
            auto lhs = type_of(e.operands[0], scope);
            auto rhs = type_of(e.operands[1], scope);
            if (!lhs || !rhs) return std::nullopt;
            auto result = binary_result(e.binary_op, *lhs, *rhs);
            if (!result) {
                error("V006", e.pos,
                      "operator '" + std::string(to_string(e.binary_op)) + "' cannot combine " +
                          std::string(to_string(*lhs)) + " and " + std::string(to_string(*rhs)));
            }
            return result;
        }
        }
        return std::nullopt;
    }

    static std::optional<ValueType> binary_result(BinaryOp op, ValueType lhs, ValueType rhs) {
        const bool numeric = is_numeric(lhs) && is_numeric(rhs);
        const ValueType promoted = (lhs == ValueType::Real || rhs == ValueType::Real) ? ValueType::Real : ValueType::Int;
        switch (op) {
        case BinaryOp::Or:
        case BinaryOp::And:
            if (lhs == ValueType::Bool && rhs == ValueType::Bool) return ValueType::Bool;
            return std::nullopt;
        case BinaryOp::Eq:
        case BinaryOp::Ne:
            if (numeric || lhs == rhs) return ValueType::Bool;
            return std::nullopt;
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge:
            if (numeric) return ValueType::Bool;
            return std::nullopt;
        case BinaryOp::Add:
            if (lhs == ValueType::String && rhs == ValueType::String) return ValueType::String;
            [[fallthrough]];
        case BinaryOp::Sub:
        case BinaryOp::Mul:
        case BinaryOp::Div:
        case BinaryOp::Mod:
            if (numeric) return promoted;
            return std::nullopt;
        }
        return std::nullopt;
    }

    // -- data analytics -----------------------------------------------------

    void check_analytics(const DataAnalyticsBlock& da) {
        check_unique_refs(da.features, "feature");

        auto resolve = [&](const NameRef& ref, std::string_view role) -> const Property* {
            const Property* prop = thing_->find_property(ref.name);
            if (!prop) {
                error("V008", ref.pos,
                      std::string(role) + " " + squote(ref.name) + " of data_analytics " + squote(da.name) +
                          " is not a declared property");
            }
            return prop;
        };

        for (const auto& feature : da.features) {
            const Property* prop = resolve(feature, "feature");
            if (prop && !is_numeric(prop->type)) {
                error("V009", feature.pos,
                      "feature " + squote(feature.name) + " has type " + std::string(to_string(prop->type)) +
                          ", expected Int or Real");
            }
        }
        auto in_features = [&](const std::string& name) {
            return std::any_of(da.features.begin(), da.features.end(), [&](const NameRef& f) { return f.name == name; });
        };

        const Property* label = resolve(da.label, "label");
        if (label && !is_numeric(label->type)) {
            error("V009", da.label.pos,
                  "label " + squote(da.label.name) + " has type " + std::string(to_string(label->type)) +
                      ", expected Int or Real");
        }
        if (in_features(da.label.name)) error("V009", da.label.pos, "label " + squote(da.label.name) + " is also a feature");

        const Property* prediction = resolve(da.prediction, "prediction");
        if (in_features(da.prediction.name)) {
            error("V009", da.prediction.pos, "prediction " + squote(da.prediction.name) + " is also a feature");
        }

        const auto resolution = resolve_algorithm(da.algorithm);
        for (const auto& problem : resolution.problems) error("V010", problem.pos, problem.message);
        if (auto kind = ml::algorithm_kind_from_string(da.algorithm.kind.name); kind && prediction) {
            const ValueType expected = ml::is_classifier(*kind) ? ValueType::Int : ValueType::Real;
            if (prediction->type != expected) {
                error("V009", da.prediction.pos,
                      "prediction " + squote(da.prediction.name) + " of a " + std::string(ml::to_string(*kind)) +
                          " must have type " + std::string(to_string(expected)) + ", found " +
                          std::string(to_string(prediction->type)));
            }
        }
    }

    // -- configurations -----------------------------------------------------

    void check_configuration(const Configuration& config) {
        check_unique(config.instances, "instance");
        for (const auto& inst : config.instances) {
            if (!model_.find_thing(inst.thing.name))
                error("V011", inst.thing.pos, "instance " + squote(inst.name) + " references undeclared thing " + squote(inst.thing.name));
        }
        for (const auto& conn : config.connectors) {
            const Port* from = resolve_endpoint(config, conn.from);
            const Port* to = resolve_endpoint(config, conn.to);
            if (!from || !to) continue;
            const std::string label = conn.from.instance.name + "." + conn.from.port.name + " => " +
                                      conn.to.instance.name + "." + conn.to.port.name;
            if (from->direction == to->direction) {
                error("V013", conn.pos,
                      "connector " + label + " joins two " +
                          (from->direction == PortDirection::Required ? "required" : "provided") + " ports");
            }
            for (const auto& [sender, receiver, sender_name] :
                 {std::tuple{from, to, conn.from.instance.name}, std::tuple{to, from, conn.to.instance.name}}) {
                for (const auto& msg : sender->sends) {
                    if (!receiver->can_receive(msg.name)) {
                        error("V013", conn.pos,
                              "connector " + label + ": message " + squote(msg.name) + " sent by " + squote(sender_name) +
                                  " is not received by the peer port");
                    }
                }
            }
        }
    }

    const Port* resolve_endpoint(const Configuration& config, const Endpoint& ep) {
        const Instance* inst = config.find_instance(ep.instance.name);
        if (!inst) {
            error("V012", ep.instance.pos, "connector references unknown instance " + squote(ep.instance.name));
            return nullptr;
        }
        const Thing* thing = model_.find_thing(inst->thing.name);
        if (!thing) return nullptr;  // V011 already
        const Port* port = thing->find_port(ep.port.name);
        if (!port) {
            error("V012", ep.port.pos,
                  "thing " + squote(thing->name) + " of instance " + squote(inst->name) + " has no port " +
                      squote(ep.port.name));
        }
        return port;
    }

    const Model& model_;
    const Thing* thing_ = nullptr;
    std::set<std::string> used_analytics_;
    std::vector<Diagnostic> diags_;
};

}  // namespace

AlgorithmResolution resolve_algorithm(const AlgorithmSpec& spec) {
    AlgorithmResolution result;
    auto kind = ml::algorithm_kind_from_string(spec.kind.name);
    if (!kind) {
        result.problems.push_back({spec.kind.pos, "unknown algorithm " + squote(spec.kind.name) +
                                                      " (expected LinearRegression, LogisticRegression, GaussianNB or KNN)"});
        return result;
    }
    ml::AlgorithmConfig config;
    config.kind = *kind;

    std::set<std::string> seen;
    for (const auto& hp : spec.hyperparameters) {
        auto problem = [&](std::string message) { result.problems.push_back({hp.pos, std::move(message)}); };
        if (!seen.insert(hp.name).second) {
            problem("hyperparameter " + squote(hp.name) + " given twice");
            continue;
        }
        const auto* as_int = std::get_if<std::int64_t>(&hp.value);
        const auto* as_real = std::get_if<double>(&hp.value);
        auto real_value = [&]() -> std::optional<double> {
            if (as_real) return *as_real;
            if (as_int) return static_cast<double>(*as_int);
            problem("hyperparameter " + squote(hp.name) + " must be a number");
            return std::nullopt;
        };
        auto int_value = [&]() -> std::optional<std::int64_t> {
            if (as_int) return *as_int;
            problem("hyperparameter " + squote(hp.name) + " must be an Int");
            return std::nullopt;
        };

        const std::string& name = hp.name;
        if (*kind == ml::AlgorithmKind::LinearRegression && name == "lambda") {
            if (auto v = real_value()) {
                if (*v < 0.0) problem("lambda must be >= 0");
                config.lambda = *v;
            }
        } else if (*kind == ml::AlgorithmKind::LogisticRegression && name == "lr") {
            if (auto v = real_value()) {
                if (*v <= 0.0) problem("lr must be > 0");
                config.lr = *v;
            }
        } else if (*kind == ml::AlgorithmKind::LogisticRegression && name == "epochs") {
            if (auto v = int_value()) {
                if (*v < 1) problem("epochs must be >= 1");
                config.epochs = *v;
            }
        } else if (*kind == ml::AlgorithmKind::GaussianNB && name == "var_smoothing") {
            if (auto v = real_value()) {
                if (*v <= 0.0) problem("var_smoothing must be > 0");
                config.var_smoothing = *v;
            }
        } else if (*kind == ml::AlgorithmKind::KNN && name == "k") {
            if (auto v = int_value()) {
                if (*v < 1) problem("k must be >= 1");
                config.k = *v;
            }
        } else {
            problem("unknown hyperparameter " + squote(name) + " for " + std::string(ml::to_string(*kind)));
        }
    }
    if (result.problems.empty()) result.config = config;
    return result;
}

ValidationReport validate(const Model& model) { return Validator(model).run(); }

}  // namespace tml2
