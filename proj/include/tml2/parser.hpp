#pragma once

#include "tml2/diagnostic.hpp"
#include "tml2/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tml2 {

struct ParseResult {
    std::optional<Model> model;  // present iff no error was reported
    std::vector<Diagnostic> diagnostics;

    bool ok() const noexcept { return model.has_value(); }
};

/// Parses `.tml2` source text. After an error the parser resynchronizes at
/// the next `thing` or `configuration` keyword, so one pass can report
/// several problems.
ParseResult parse(std::string_view source, std::string_view source_name);

/// Canonical source form: 4-space indentation, one declaration per line,
/// top-level declarations separated by a blank line.
std::string pretty_print(const Model& model);

/// Canonical spelling of a literal as it appears in source.
std::string render_literal(const Literal& literal);

}  // namespace tml2
