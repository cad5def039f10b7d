#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "polcheck/error.hpp"

namespace polcheck::detail {

enum class TokenKind { Ident, Var, String, Punct, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    int line = 1;
    int column = 1;
};

// Tokenizes one chunk of input. `%` and `#` start comments that run to end of line.
// Identifiers may contain '-' when it is followed by an alphanumeric character.
std::vector<Token> tokenize(std::string_view text, int first_line = 1);

class TokenStream {
public:
    explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    const Token& peek(std::size_t ahead = 0) const;
    Token next();
    bool at_end() const { return peek().kind == TokenKind::End; }

    bool is_punct(std::string_view p, std::size_t ahead = 0) const;
    bool is_ident(std::string_view word, std::size_t ahead = 0) const;
    bool accept(std::string_view punct);
    bool accept_ident(std::string_view word);
    void expect(std::string_view punct);
    std::string expect_ident(std::string_view what = "identifier");

    [[noreturn]] void fail(const std::string& message) const;

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

// Splits text into (line number, line content) pairs, dropping blank and comment-only lines.
std::vector<std::pair<int, std::string>> logical_lines(std::string_view text);

}  // namespace polcheck::detail
