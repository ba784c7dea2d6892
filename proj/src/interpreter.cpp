#include "tml2/interpreter.hpp"

#include "tml2/validator.hpp"

#include <algorithm>
#include <stdexcept>

namespace tml2 {

namespace {

using nlohmann::ordered_json;

Value default_value(ValueType type) {
    switch (type) {
    case ValueType::Int: return std::int64_t{0};
    case ValueType::Real: return 0.0;
    case ValueType::Bool: return false;
    case ValueType::String: return std::string{};
    }
    return std::int64_t{0};
}

// Int values stored into Real slots are widened; everything else is stored
// as evaluated (the validator guarantees the types line up).
Value coerce(ValueType type, Value value) {
    if (type == ValueType::Real) {
        if (const auto* i = std::get_if<std::int64_t>(&value)) return static_cast<double>(*i);
    }
    return value;
}

ordered_json args_json(const std::vector<Value>& args) {
    ordered_json out = ordered_json::array();
    for (const auto& v : args) out.push_back(to_json(v));
    return out;
}

struct Local {
    std::string name;
    ValueType type;
    Value value;
};

struct Route {
    std::size_t instance;
    std::string port;
};

struct Runtime {
    const Thing* thing = nullptr;
    InstanceState state;
    int state_index = -1;
};

class Simulator {
public:
    Simulator(const Model& model, const Configuration& config, std::filesystem::path base_dir)
        : model_(model), config_(config), base_dir_(std::move(base_dir)) {}

    SimulationResult run(std::int64_t max_steps) {
        SimulationResult result;
        try {
            initialize();
            for (std::int64_t s = 1; s <= max_steps; ++s) {
                step_ = s;
                if (quiescent()) break;
                for (std::size_t i = 0; i < instances_.size(); ++i) {
                    dispatch_one(i);
                    chase_eventless(i);
                }
                result.steps_executed = s;
            }
        } catch (const Error& e) {
            result.error = e;
        }
        for (auto& rt : instances_) result.instances.push_back(std::move(rt.state));
        result.trace = std::move(trace_);
        return result;
    }

private:
    // -- setup --------------------------------------------------------------

    void initialize() {
        step_ = 0;
        for (const auto& inst : config_.instances) {
            Runtime rt;
            rt.thing = model_.find_thing(inst.thing.name);
            if (!rt.thing) throw Error("E-NAME", "instance '" + inst.name + "' references unknown thing");
            rt.state.name = inst.name;
            rt.state.thing = rt.thing->name;
            for (const auto& da : rt.thing->analytics) rt.state.analytics.emplace(da.name, AnalyticsState{});
            instances_.push_back(std::move(rt));
        }
        for (const auto& conn : config_.connectors) {
            const auto from = index_of(conn.from.instance.name);
            const auto to = index_of(conn.to.instance.name);
            routes_[{from, conn.from.port.name}].push_back({to, conn.to.port.name});
            routes_[{to, conn.to.port.name}].push_back({from, conn.from.port.name});
        }
        for (std::size_t i = 0; i < instances_.size(); ++i) {
            current_ = i;
            auto& rt = instances_[i];
            for (const auto& prop : rt.thing->properties) {
                Value v = prop.initial ? coerce(prop.type, evaluate(*prop.initial)) : default_value(prop.type);
                rt.state.properties.emplace_back(prop.name, std::move(v));
            }
        }
        for (std::size_t i = 0; i < instances_.size(); ++i) {
            current_ = i;
            auto& rt = instances_[i];
            if (!rt.thing->statechart) continue;
            const StateChart& chart = *rt.thing->statechart;
            enter(chart.state_index(chart.initial.name));
            chase_eventless(i);
        }
    }

    std::size_t index_of(const std::string& instance) const {
        for (std::size_t i = 0; i < instances_.size(); ++i) {
            if (instances_[i].state.name == instance) return i;
        }
        throw Error("E-NAME", "connector references unknown instance '" + instance + "'");
    }

    // -- scheduling ---------------------------------------------------------

    bool quiescent() {
        for (std::size_t i = 0; i < instances_.size(); ++i) {
            if (!instances_[i].state.mailbox.empty()) return false;
            current_ = i;
            if (find_eventless(i)) return false;
        }
        return true;
    }

    void dispatch_one(std::size_t i) {
        current_ = i;
        auto& rt = instances_[i];
        auto& mailbox = rt.state.mailbox;
        // Envelopes become visible on the receiver's first turn after the send step.
        if (mailbox.empty() || mailbox.front().enqueued_at >= step_) return;
        EventEnvelope env = std::move(mailbox.front());
        mailbox.pop_front();
        emit(TraceKind::Dispatch, {{"port", env.port}, {"message", env.message}, {"args", args_json(env.args)}});

        auto discard = [&](const char* reason) {
            emit(TraceKind::Discard, {{"reason", reason}, {"port", env.port}, {"message", env.message}});
        };
        if (!rt.thing->statechart) {
            discard("no-statechart");
            return;
        }
        const Message* msg = rt.thing->find_message(env.message);
        std::vector<Local> params;
        if (msg) {
            for (std::size_t k = 0; k < msg->params.size() && k < env.args.size(); ++k)
                params.push_back({msg->params[k].name, msg->params[k].type, env.args[k]});
        }
        const State& state = rt.thing->statechart->states[static_cast<std::size_t>(rt.state_index)];
        for (const auto& tr : state.transitions) {
            if (!tr.trigger || tr.trigger->port.name != env.port || tr.trigger->message.name != env.message) continue;
            params_ = &params;
            const bool enabled = !tr.guard || std::get<bool>(evaluate(*tr.guard));
            params_ = nullptr;
            if (!enabled) continue;
            emit(TraceKind::Transition, {{"from", state.name},
                                         {"to", tr.target ? tr.target->name : state.name},
                                         {"port", env.port},
                                         {"message", env.message},
                                         {"internal", tr.is_internal()}});
            fire(tr, &params);
            return;
        }
        discard("no-transition");
    }

    const Transition* find_eventless(std::size_t i) {
        const auto& rt = instances_[i];
        if (!rt.thing->statechart) return nullptr;
        const State& state = rt.thing->statechart->states[static_cast<std::size_t>(rt.state_index)];
        for (const auto& tr : state.transitions) {
            if (!tr.is_eventless()) continue;
            if (!tr.guard || std::get<bool>(evaluate(*tr.guard))) return &tr;
        }
        return nullptr;
    }

    void chase_eventless(std::size_t i) {
        current_ = i;
        int chain = 0;
        while (const Transition* tr = find_eventless(i)) {
            if (++chain > kMaxEventlessChain) {
                throw Error("E-LIVELOCK", "instance '" + instances_[i].state.name + "': eventless chain length " +
                                              std::to_string(chain) + " exceeds " +
                                              std::to_string(kMaxEventlessChain));
            }
            const auto& rt = instances_[i];
            const std::string from = rt.state.state;
            emit(TraceKind::EventlessTransition,
                 {{"from", from}, {"to", tr->target ? tr->target->name : from}, {"internal", tr->is_internal()}});
            fire(*tr, nullptr);
        }
    }

    // External: exit, action, state change, entry. Internal: action only.
    void fire(const Transition& tr, std::vector<Local>* params) {
        auto& rt = instances_[current_];
        const StateChart& chart = *rt.thing->statechart;
        if (tr.is_internal()) {
            if (tr.action) run_block(*tr.action, params);
            return;
        }
        const State& from = chart.states[static_cast<std::size_t>(rt.state_index)];
        if (from.exit) run_block(*from.exit, nullptr);
        if (tr.action) run_block(*tr.action, params);
        enter(chart.state_index(tr.target->name));
    }

    void enter(int index) {
        auto& rt = instances_[current_];
        rt.state_index = index;
        const State& state = rt.thing->statechart->states[static_cast<std::size_t>(index)];
        rt.state.state = state.name;
        if (state.entry) run_block(*state.entry, nullptr);
    }

    // -- action language ----------------------------------------------------

    Value* find_local(std::string_view name) {
        for (auto frame = frames_.rbegin(); frame != frames_.rend(); ++frame) {
            for (auto it = frame->rbegin(); it != frame->rend(); ++it) {
                if (it->name == name) return &it->value;
            }
        }
        return nullptr;
    }

    const Value* lookup(std::string_view name) {
        if (Value* v = find_local(name)) return v;
        if (params_) {
            for (const auto& p : *params_) {
                if (p.name == name) return &p.value;
            }
        }
        for (const auto& [n, v] : instances_[current_].state.properties) {
            if (n == name) return &v;
        }
        return nullptr;
    }

    Value evaluate(const Expression& e) {
        const NameLookup resolve = [this](std::string_view name) { return lookup(name); };
        return eval(e, resolve, step_);
    }

    void run_block(const Block& block, std::vector<Local>* params) {
        auto* saved_params = params_;
        auto saved_frames = std::move(frames_);
        frames_.clear();
        params_ = params;
        try {
            exec_block(block);
        } catch (...) {
            params_ = saved_params;
            frames_ = std::move(saved_frames);
            throw;
        }
        params_ = saved_params;
        frames_ = std::move(saved_frames);
    }

    void exec_block(const Block& block) {
        frames_.emplace_back();
        for (const auto& st : block) exec(st);
        frames_.pop_back();
    }

    void assign(const std::string& name, Value value) {
        for (auto frame = frames_.rbegin(); frame != frames_.rend(); ++frame) {
            for (auto it = frame->rbegin(); it != frame->rend(); ++it) {
                if (it->name == name) {
                    it->value = coerce(it->type, std::move(value));
                    return;
                }
            }
        }
        set_property(name, std::move(value));
    }

    void set_property(const std::string& name, Value value) {
        auto& rt = instances_[current_];
        const Property* decl = rt.thing->find_property(name);
        for (auto& [n, v] : rt.state.properties) {
            if (n == name) {
                v = decl ? coerce(decl->type, std::move(value)) : std::move(value);
                return;
            }
        }
        throw Error("E-NAME", "assignment to unknown name '" + name + "'");
    }

    void exec(const Statement& st) {
        using Kind = Statement::Kind;
        switch (st.kind) {
        case Kind::VarDecl:
            frames_.back().push_back({st.name, st.type, coerce(st.type, evaluate(st.exprs[0]))});
            break;
        case Kind::Assign: assign(st.name, evaluate(st.exprs[0])); break;
        case Kind::Send: send(st); break;
        case Kind::If:
            if (std::get<bool>(evaluate(st.exprs[0]))) {
                exec_block(st.body);
            } else if (st.has_else) {
                exec_block(st.else_body);
            }
            break;
        case Kind::While: {
            std::int64_t iterations = 0;
            while (std::get<bool>(evaluate(st.exprs[0]))) {
                if (++iterations > kMaxWhileIterations) {
                    throw Error("E-WHILE", "instance '" + instances_[current_].state.name + "': while loop exceeded " +
                                               std::to_string(kMaxWhileIterations) + " iterations");
                }
                exec_block(st.body);
            }
            break;
        }
        case Kind::Print: emit(TraceKind::Print, {{"value", to_json(evaluate(st.exprs[0]))}}); break;
        case Kind::DaPreprocess: da_preprocess(st.name); break;
        case Kind::DaTrain: da_train(st.name); break;
        case Kind::DaPredict: da_predict(st.name); break;
        case Kind::DaSave: da_save(st.name, st.path); break;
        }
    }

    void send(const Statement& st) {
        auto& rt = instances_[current_];
        const Message* msg = rt.thing->find_message(st.message);
        std::vector<Value> args;
        for (std::size_t k = 0; k < st.exprs.size(); ++k) {
            Value v = evaluate(st.exprs[k]);
            if (msg && k < msg->params.size()) v = coerce(msg->params[k].type, std::move(v));
            args.push_back(std::move(v));
        }

        std::vector<const Route*> targets;
        if (auto it = routes_.find({current_, st.name}); it != routes_.end()) {
            for (const auto& route : it->second) {
                const Port* port = instances_[route.instance].thing->find_port(route.port);
                if (port && port->can_receive(st.message)) targets.push_back(&route);
            }
        }
        if (targets.empty()) {
            emit(TraceKind::Discard, {{"reason", "unconnected-port"}, {"port", st.name}, {"message", st.message}});
            return;
        }
        ordered_json target_list = ordered_json::array();
        for (const Route* route : targets) {
            target_list.push_back({{"instance", instances_[route->instance].state.name}, {"port", route->port}});
        }
        emit(TraceKind::Send,
             {{"port", st.name}, {"message", st.message}, {"args", args_json(args)}, {"targets", target_list}});
        for (const Route* route : targets) {
            instances_[route->instance].state.mailbox.push_back({route->port, st.message, args, step_});
        }
    }

    // -- data analytics -----------------------------------------------------

    const DataAnalyticsBlock& analytics_block(const std::string& name) {
        const DataAnalyticsBlock* da = instances_[current_].thing->find_analytics(name);
        if (!da) throw Error("E-NAME", "unknown data_analytics block '" + name + "'");
        return *da;
    }

    std::filesystem::path resolve_path(const std::string& path) const {
        std::filesystem::path p(path);
        return p.is_absolute() ? p : base_dir_ / p;
    }

    ml::Dataset load(const DataAnalyticsBlock& da) {
        std::vector<std::string> features;
        for (const auto& f : da.features) features.push_back(f.name);
        try {
            return ml::load_dataset(resolve_path(da.dataset), features, da.label.name);
        } catch (const Error& e) {
            // Unreadable files and schema/content problems are all E-IO here.
            throw Error("E-IO", "data_analytics '" + da.name + "': " + e.what());
        }
    }

    void da_preprocess(const std::string& name) {
        const auto& da = analytics_block(name);
        auto& state = instances_[current_].state.analytics[name];
        state.dataset = load(da);
        state.scaler = ml::fit_scaler(state.dataset->features());
    }

    void da_train(const std::string& name) {
        const auto& da = analytics_block(name);
        auto& state = instances_[current_].state.analytics[name];
        if (!state.dataset) state.dataset = load(da);
        const auto resolution = resolve_algorithm(da.algorithm);
        if (!resolution.config) throw Error("E-NAME", "invalid algorithm for data_analytics '" + name + "'");
        try {
            state.model = ml::train(*resolution.config, *state.dataset, state.scaler.has_value(), state.scaler);
        } catch (const Error& e) {
            if (e.code() == "E-SCHEMA" || e.code() == "E-PARSE")
                throw Error("E-IO", "data_analytics '" + name + "': " + e.what());
            throw;
        }
        const auto metric = ml::evaluate(*state.model, *state.dataset);
        emit(TraceKind::Train, {{"da", name},
                                {"algorithm", std::string(ml::to_string(state.model->kind))},
                                {"rows", state.dataset->n()},
                                {"metric", metric.name},
                                {"value", metric.value}});
    }

    void da_predict(const std::string& name) {
        const auto& da = analytics_block(name);
        auto& rt = instances_[current_];
        const auto& state = rt.state.analytics[name];
        if (!state.model) throw Error("E-DA-ORDER", "da_predict(" + name + ") before da_train(" + name + ")");
        ml::Vector x;
        for (const auto& f : da.features) {
            const Value* v = rt.state.property(f.name);
            if (!v) throw Error("E-NAME", "unknown feature property '" + f.name + "'");
            x.push_back(v->index() == 0 ? static_cast<double>(std::get<std::int64_t>(*v)) : std::get<double>(*v));
        }
        const ml::Prediction prediction = ml::predict(*state.model, x);
        Value out = std::visit([](auto p) -> Value { return p; }, prediction);
        emit(TraceKind::Predict, {{"da", name}, {"features", x}, {"prediction", to_json(out)}});
        set_property(da.prediction.name, std::move(out));
    }

    void da_save(const std::string& name, const std::string& path) {
        analytics_block(name);
        const auto& state = instances_[current_].state.analytics[name];
        if (!state.model) throw Error("E-DA-ORDER", "da_save(" + name + ") before da_train(" + name + ")");
        const auto target = resolve_path(path);
        std::error_code ec;
        if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path(), ec);
        ml::save_model(*state.model, target);
    }

    // -- trace --------------------------------------------------------------

    void emit(TraceKind kind, ordered_json detail) {
        trace_.push_back({step_, instances_[current_].state.name, kind, std::move(detail)});
    }

    const Model& model_;
    const Configuration& config_;
    std::filesystem::path base_dir_;
    std::vector<Runtime> instances_;
    std::map<std::pair<std::size_t, std::string>, std::vector<Route>> routes_;
    std::vector<TraceEvent> trace_;
    std::int64_t step_ = 0;
    std::size_t current_ = 0;
    std::vector<std::vector<Local>> frames_;
    std::vector<Local>* params_ = nullptr;
};

}  // namespace

std::string_view to_string(TraceKind kind) noexcept {
    switch (kind) {
    case TraceKind::Dispatch: return "Dispatch";
    case TraceKind::Send: return "Send";
    case TraceKind::Transition: return "Transition";
    case TraceKind::EventlessTransition: return "EventlessTransition";
    case TraceKind::Discard: return "Discard";
    case TraceKind::Train: return "Train";
    case TraceKind::Predict: return "Predict";
    case TraceKind::Print: return "Print";
    }
    return "?";
}

std::string to_json_line(const TraceEvent& event) {
    ordered_json line;
    line["step"] = event.step;
    line["instance"] = event.instance;
    line["kind"] = std::string(to_string(event.kind));
    line["detail"] = event.detail;
    return line.dump();
}

void write_trace(std::ostream& out, const std::vector<TraceEvent>& trace) {
    for (const auto& event : trace) out << to_json_line(event) << '\n';
}

const Value* InstanceState::property(std::string_view name) const noexcept {
    for (const auto& [n, v] : properties) {
        if (n == name) return &v;
    }
    return nullptr;
}

const InstanceState* SimulationResult::instance(std::string_view name) const noexcept {
    for (const auto& inst : instances) {
        if (inst.name == name) return &inst;
    }
    return nullptr;
}

SimulationResult simulate(const Model& model, std::string_view config_name, std::int64_t max_steps,
                          const SimulationOptions& options) {
    const Configuration* config = model.find_configuration(config_name);
    if (!config) throw std::invalid_argument("unknown configuration '" + std::string(config_name) + "'");
    if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
    std::filesystem::path base = options.base_dir;
    if (base.empty()) base = std::filesystem::path(model.source_name).parent_path();
    return Simulator(model, *config, base).run(max_steps);
}

}  // namespace tml2
