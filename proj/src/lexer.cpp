#include "lexer.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <optional>

namespace tml2::detail {

namespace {

constexpr std::array kKeywords = {
    "thing",        "property",      "message",  "provided",  "required",   "port",
    "sends",        "receives",      "statechart", "init",    "state",      "entry",
    "exit",         "transition",    "event",    "guard",     "internal",   "action",
    "data_analytics", "features",    "label",    "dataset",   "algorithm",  "prediction",
    "configuration", "instance",     "connector", "var",      "if",         "else",
    "while",        "print",         "da_preprocess", "da_train", "da_predict", "da_save",
    "Int",          "Real",          "Bool",     "String",    "true",       "false",
    "not",          "and",           "or",       "Now",
};

// Longest spellings first so `->` wins over `-`.
constexpr std::array kSymbols = {
    "->", "=>", "==", "!=", "<=", ">=", "{", "}", "(", ")", ":", "=", ",", ";",
    "!",  "?",  ".",  "+",  "-",  "*",  "/", "%", "<", ">",
};

bool is_ident_start(char c) noexcept { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) noexcept { return is_ident_start(c) || is_digit(c); }

class Lexer {
public:
    Lexer(std::string_view src, const std::string& file, std::vector<Diagnostic>& diags)
        : src_(src), file_(file), diags_(diags) {}

    std::vector<Token> run() {
        std::vector<Token> tokens;
        while (true) {
            skip_trivia();
            if (at_end()) break;
            if (auto tok = next()) tokens.push_back(std::move(*tok));
        }
        Token end;
        end.kind = TokenKind::End;
        end.pos = here();
        tokens.push_back(end);
        return tokens;
    }

private:
    bool at_end() const noexcept { return i_ >= src_.size(); }
    char peek(std::size_t ahead = 0) const noexcept { return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0'; }
    SourcePos here() const noexcept { return {line_, column_}; }

    void advance() {
        const char c = src_[i_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
            // Continuation bytes of a UTF-8 sequence do not start a new column.
            ++column_;
        }
    }

    void error(SourcePos pos, const char* code, std::string message) {
        diags_.push_back({Severity::Error, code, std::move(message), file_, pos.line, pos.column});
    }

    void skip_trivia() {
        while (!at_end()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (!at_end() && peek() != '\n') advance();
            } else {
                return;
            }
        }
    }

    std::optional<Token> next() {
        Token tok;
        tok.pos = here();
        const char c = peek();
        if (is_ident_start(c)) {
            const auto start = i_;
            while (!at_end() && is_ident_char(peek())) advance();
            tok.text = std::string(src_.substr(start, i_ - start));
            tok.kind = is_keyword(tok.text) ? TokenKind::Keyword : TokenKind::Identifier;
            return tok;
        }
        if (is_digit(c)) return number(tok);
        if (c == '"') return string(tok);
        for (std::string_view sym : kSymbols) {
            if (src_.substr(i_, sym.size()) == sym) {
                for (std::size_t k = 0; k < sym.size(); ++k) advance();
                tok.kind = TokenKind::Symbol;
                tok.text = std::string(sym);
                return tok;
            }
        }
        error(tok.pos, "P001", "unexpected character '" + std::string(1, c) + "'");
        advance();
        while (!at_end() && (static_cast<unsigned char>(peek()) & 0xC0) == 0x80) advance();
        return std::nullopt;
    }

    Token number(Token& tok) {
        const auto start = i_;
        while (!at_end() && is_digit(peek())) advance();
        bool real = false;
        if (peek() == '.' && is_digit(peek(1))) {
            real = true;
            advance();
            while (!at_end() && is_digit(peek())) advance();
            if (peek() == 'e' || peek() == 'E') {
                const char sign = peek(1);
                const bool signed_exp = (sign == '+' || sign == '-') && is_digit(peek(2));
                if (is_digit(sign) || signed_exp) {
                    advance();
                    if (signed_exp) advance();
                    while (!at_end() && is_digit(peek())) advance();
                }
            }
        }
        tok.text = std::string(src_.substr(start, i_ - start));
        const char* first = tok.text.data();
        const char* last = first + tok.text.size();
        if (real) {
            tok.kind = TokenKind::Real;
            auto [ptr, ec] = std::from_chars(first, last, tok.real_value);
            if (ec != std::errc{} || !std::isfinite(tok.real_value)) {
                error(tok.pos, "P003", "real literal '" + tok.text + "' out of range");
                tok.real_value = 0.0;
            }
        } else {
            tok.kind = TokenKind::Int;
            auto [ptr, ec] = std::from_chars(first, last, tok.int_value);
            if (ec != std::errc{}) {
                error(tok.pos, "P003", "integer literal '" + tok.text + "' out of 64-bit signed range");
                tok.int_value = 0;
            }
        }
        return tok;
    }

    Token string(Token& tok) {
        tok.kind = TokenKind::String;
        advance();  // opening quote
        while (true) {
            if (at_end() || peek() == '\n') {
                error(tok.pos, "P002", "unterminated string literal");
                return tok;
            }
            const char c = peek();
            if (c == '"') {
                advance();
                return tok;
            }
            if (c == '\\') {
                const auto escape_pos = here();
                advance();
                const char e = peek();
                switch (e) {
                case 'n': tok.text += '\n'; break;
                case 't': tok.text += '\t'; break;
                case '"': tok.text += '"'; break;
                case '\\': tok.text += '\\'; break;
                default:
                    error(escape_pos, "P001", "unknown escape sequence");
                    if (at_end() || e == '\n') continue;
                    tok.text += e;
                    break;
                }
                advance();
                continue;
            }
            tok.text += c;
            advance();
        }
    }

    std::string_view src_;
    const std::string& file_;
    std::vector<Diagnostic>& diags_;
    std::size_t i_ = 0;
    int line_ = 1;
    int column_ = 1;
};

}  // namespace

bool is_keyword(std::string_view word) noexcept {
    for (std::string_view kw : kKeywords) {
        if (kw == word) return true;
    }
    return false;
}

std::vector<Token> tokenize(std::string_view source, const std::string& file, std::vector<Diagnostic>& diagnostics) {
    return Lexer(source, file, diagnostics).run();
}

}  // namespace tml2::detail
