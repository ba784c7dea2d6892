#pragma once

#include "tml2/diagnostic.hpp"
#include "tml2/model.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tml2::detail {

enum class TokenKind { Identifier, Keyword, Int, Real, String, Symbol, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;  // spelling; unescaped contents for strings
    std::int64_t int_value = 0;
    double real_value = 0.0;
    SourcePos pos;

    bool is(TokenKind k, std::string_view spelling) const noexcept { return kind == k && text == spelling; }
    bool is_keyword(std::string_view spelling) const noexcept { return is(TokenKind::Keyword, spelling); }
    bool is_symbol(std::string_view spelling) const noexcept { return is(TokenKind::Symbol, spelling); }
};

bool is_keyword(std::string_view word) noexcept;

/// Splits source text into tokens. Lexical errors (P001 stray character,
/// P002 unterminated string, P003 numeric literal out of range) are appended
/// to `diagnostics`; lexing always runs to the end and the last token is End.
std::vector<Token> tokenize(std::string_view source, const std::string& file, std::vector<Diagnostic>& diagnostics);

}  // namespace tml2::detail
