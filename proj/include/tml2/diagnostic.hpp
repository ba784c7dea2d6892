#pragma once

#include <span>
#include <string>

namespace tml2 {

enum class Severity { Error, Warning };

/// A finding from the parser (P-codes) or validator (V-codes).
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;  // [PV][0-9]{3}
    std::string message;
    std::string file;
    int line = 1;
    int column = 1;

    bool operator==(const Diagnostic&) const = default;
};

/// `<file>:<line>:<col>: error[<code>]: <message>` (or `warning[...]`).
std::string format(const Diagnostic& diagnostic);

bool has_errors(std::span<const Diagnostic> diagnostics) noexcept;

}  // namespace tml2
