#include "lexer.hpp"

#include <array>
#include <cctype>

namespace polcheck::detail {

namespace {

bool ident_start(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Longest match first.
constexpr std::array<std::string_view, 25> kPuncts = {
    "/\\_s", "\\/_s", ":-", ":=", "/\\", "\\/", "<-",
    "(", ")", ",", "{", "}", "[", "]", "=", ".", "&", "|", "!", "~", "+", "-", ";", ":", "@"};

}  // namespace

std::vector<Token> tokenize(std::string_view text, int first_line) {
    std::vector<Token> out;
    int line = first_line;
    int col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (text[i] == '\n') { ++line; col = 1; } else { ++col; }
            ++i;
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) { advance(1); continue; }
        if (c == '%' || c == '#') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        Token tok;
        tok.line = line;
        tok.column = col;
        if (c == '"') {
            std::size_t j = i + 1;
            while (j < text.size() && text[j] != '"' && text[j] != '\n') ++j;
            if (j >= text.size() || text[j] != '"') throw ParseError("unterminated string", line, col);
            tok.kind = TokenKind::String;
            tok.text = std::string(text.substr(i + 1, j - i - 1));
            advance(j - i + 1);
            out.push_back(std::move(tok));
            continue;
        }
        if (c == '$') {
            std::size_t j = i + 1;
            while (j < text.size() && ident_start(text[j])) ++j;
            if (j == i + 1) throw ParseError("expected variable name after '$'", line, col);
            tok.kind = TokenKind::Var;
            tok.text = std::string(text.substr(i + 1, j - i - 1));
            advance(j - i);
            out.push_back(std::move(tok));
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < text.size()) {
                if (ident_start(text[j])) { ++j; continue; }
                // "pc-with-Windows" is one token; a trailing or spaced '-' is punctuation.
                if (text[j] == '-' && j + 1 < text.size() && ident_start(text[j + 1])) {
                    ++j;
                    continue;
                }
                break;
            }
            tok.kind = TokenKind::Ident;
            tok.text = std::string(text.substr(i, j - i));
            advance(j - i);
            out.push_back(std::move(tok));
            continue;
        }
        bool matched = false;
        for (auto p : kPuncts) {
            if (text.substr(i, p.size()) == p) {
                tok.kind = TokenKind::Punct;
                tok.text = std::string(p);
                advance(p.size());
                out.push_back(std::move(tok));
                matched = true;
                break;
            }
        }
        if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    Token end;
    end.kind = TokenKind::End;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

const Token& TokenStream::peek(std::size_t ahead) const {
    std::size_t idx = pos_ + ahead;
    if (idx >= tokens_.size()) return tokens_.back();
    return tokens_[idx];
}

Token TokenStream::next() {
    Token t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
}

bool TokenStream::is_punct(std::string_view p, std::size_t ahead) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Punct && t.text == p;
}

bool TokenStream::is_ident(std::string_view word, std::size_t ahead) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Ident && t.text == word;
}

bool TokenStream::accept(std::string_view punct) {
    if (!is_punct(punct)) return false;
    next();
    return true;
}

bool TokenStream::accept_ident(std::string_view word) {
    if (!is_ident(word)) return false;
    next();
    return true;
}

void TokenStream::expect(std::string_view punct) {
    if (!accept(punct)) fail("expected '" + std::string(punct) + "'");
}

std::string TokenStream::expect_ident(std::string_view what) {
    if (peek().kind != TokenKind::Ident) fail("expected " + std::string(what));
    return next().text;
}

void TokenStream::fail(const std::string& message) const {
    const Token& t = peek();
    std::string found = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(message + ", found " + found, t.line, t.column);
}

std::vector<std::pair<int, std::string>> logical_lines(std::string_view text) {
    std::vector<std::pair<int, std::string>> out;
    int line = 1;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(start, end - start);
        std::size_t first = raw.find_first_not_of(" \t\r");
        if (first != std::string_view::npos && raw[first] != '%' && raw[first] != '#')
            out.emplace_back(line, std::string(raw));
        ++line;
        start = end + 1;
        if (end == text.size()) break;
    }
    return out;
}

}  // namespace polcheck::detail
