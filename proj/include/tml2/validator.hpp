#pragma once

#include "tml2/diagnostic.hpp"
#include "tml2/ml.hpp"
#include "tml2/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tml2 {

struct ValidationReport {
    std::vector<Diagnostic> diagnostics;  // sorted by (file, line, column)
    bool ok = true;                       // no diagnostic has severity Error
};

/// Checks cross references, static types and well-formedness.
///
/// Errors V001-V014 block simulation and generation; V101 (unreachable
/// state), V102 (unused message) and V103 (DA block never used) are warnings.
ValidationReport validate(const Model& model);

/// Algorithm kind plus hyperparameters with defaults filled in. `problems`
/// lists every unknown name, ill-typed value or out-of-range value; the
/// config is only present when there are none.
struct AlgorithmResolution {
    struct Problem {
        SourcePos pos;
        std::string message;
    };
    std::optional<ml::AlgorithmConfig> config;
    std::vector<Problem> problems;
};
AlgorithmResolution resolve_algorithm(const AlgorithmSpec& spec);

}  // namespace tml2
