#include "tml2/diagnostic.hpp"

#include <algorithm>

namespace tml2 {

std::string format(const Diagnostic& d) {
    return d.file + ":" + std::to_string(d.line) + ":" + std::to_string(d.column) + ": " +
           (d.severity == Severity::Error ? "error" : "warning") + "[" + d.code + "]: " + d.message;
}

bool has_errors(std::span<const Diagnostic> diagnostics) noexcept {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace tml2
