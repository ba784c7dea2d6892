#pragma once

// Deterministic execution of a configuration: virtual-time scheduler, FIFO
// mailboxes, run-to-completion statecharts and DA actions.

#include "tml2/error.hpp"
#include "tml2/ml.hpp"
#include "tml2/model.hpp"

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace tml2 {

/// Runtime value; alternatives line up with ValueType.
using Value = Literal;

nlohmann::ordered_json to_json(const Value& value);

/// Resolves a free name to its current value, or nullptr when unbound.
using NameLookup = std::function<const Value*(std::string_view)>;

/// Evaluates `expr` left to right with short-circuit `and`/`or`. `now` is
/// the value of `Now()`. Throws Error E-DIV on division or modulo by zero.
/// Int arithmetic wraps on overflow.
Value eval(const Expression& expr, const NameLookup& lookup, std::int64_t now = 0);

/// Convenience overload over a plain name->value map.
Value eval(const Expression& expr, const std::map<std::string, Value, std::less<>>& env, std::int64_t now = 0);

enum class TraceKind { Dispatch, Send, Transition, EventlessTransition, Discard, Train, Predict, Print };

std::string_view to_string(TraceKind kind) noexcept;

struct TraceEvent {
    std::int64_t step = 0;
    std::string instance;
    TraceKind kind = TraceKind::Dispatch;
    nlohmann::ordered_json detail;
};

/// `{"step":..,"instance":..,"kind":..,"detail":{..}}` without a newline.
std::string to_json_line(const TraceEvent& event);
void write_trace(std::ostream& out, const std::vector<TraceEvent>& trace);

struct EventEnvelope {
    std::string port;  // receiving port
    std::string message;
    std::vector<Value> args;
    std::int64_t enqueued_at = 0;
};

/// Runtime state of one DA block inside one instance.
struct AnalyticsState {
    std::optional<ml::Dataset> dataset;
    std::optional<ml::ScalerParams> scaler;
    std::optional<ml::TrainedModel> model;
};

struct InstanceState {
    std::string name;
    std::string thing;
    std::string state;  // empty for things without a statechart
    std::vector<std::pair<std::string, Value>> properties;  // declaration order
    std::map<std::string, AnalyticsState> analytics;
    std::deque<EventEnvelope> mailbox;

    const Value* property(std::string_view name) const noexcept;
};

struct SimulationOptions {
    /// Dataset and `da_save` paths resolve against this directory. Empty:
    /// the directory of the model's source file.
    std::filesystem::path base_dir;
};

struct SimulationResult {
    std::vector<InstanceState> instances;  // configuration order
    std::vector<TraceEvent> trace;
    std::int64_t steps_executed = 0;  // global steps that ran to completion
    /// Set when the run stopped on E-LIVELOCK, E-WHILE, E-DIV, E-DA-ORDER,
    /// E-IO or another runtime failure; trace and states are kept up to the
    /// failing point.
    std::optional<Error> error;

    const InstanceState* instance(std::string_view name) const noexcept;
};

inline constexpr int kMaxEventlessChain = 1000;
inline constexpr std::int64_t kMaxWhileIterations = 100000;

/// Runs `config_name` of a validated model for at most `max_steps` global
/// steps, stopping early once every mailbox is empty and no eventless
/// transition is enabled.
///
/// Throws std::invalid_argument for an unknown configuration or
/// `max_steps < 1`.
SimulationResult simulate(const Model& model, std::string_view config_name, std::int64_t max_steps,
                          const SimulationOptions& options = {});

}  // namespace tml2
