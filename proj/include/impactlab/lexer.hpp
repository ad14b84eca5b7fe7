#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "impactlab/diagnostics.hpp"

namespace impactlab {

/// One source file of a project.
struct SourceUnit {
    std::string path;
    std::string text;
};

enum class TokenKind {
    Ident,
    IntLit,
    StringLit,
    // keywords
    KwClass, KwInterface, KwExtends, KwImplements, KwStatic, KwTest,
    KwInt, KwBool, KwVoid, KwIf, KwElse, KwWhile, KwReturn, KwAssert,
    KwNew, KwThis, KwTrue, KwFalse, KwAbs, KwReflectCall,
    // punctuation and operators
    LParen, RParen, LBrace, RBrace, Comma, Semi, Dot,
    Plus, Minus, Star, Slash, Percent,
    Lt, Le, Gt, Ge, EqEq, NotEq, AmpAmp, PipePipe, Bang, Assign,
    EndOfFile,
};

struct Token {
    TokenKind kind;
    std::string text;
    std::int64_t int_value = 0;
    Span span;
};

/// Lexes one unit. Appends diagnostics on bad input and keeps going where
/// reasonable; the parser refuses to run over units with lex errors.
class Lexer {
public:
    Lexer(const SourceUnit& unit, int unit_index, std::vector<Diagnostic>& diags)
        : src_(unit.text), unit_(unit_index), diags_(diags) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_trivia();
            Span sp = here();
            if (eof()) {
                out.push_back({TokenKind::EndOfFile, "", 0, sp});
                return out;
            }
            char c = peek();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                out.push_back(ident_or_keyword(sp));
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                out.push_back(int_literal(sp));
            } else if (c == '"') {
                out.push_back(string_literal(sp));
            } else {
                out.push_back(operator_token(sp));
            }
        }
    }

private:
    bool eof() const { return pos_ >= src_.size(); }
    char peek(std::size_t k = 0) const {
        return pos_ + k < src_.size() ? src_[pos_ + k] : '\0';
    }
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    Span here() const { return Span{unit_, line_, col_}; }

    void skip_trivia() {
        while (!eof()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (!eof() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    Token ident_or_keyword(Span sp) {
        std::string s;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
            s.push_back(advance());
        TokenKind k = keyword_kind(s);
        return {k, std::move(s), 0, sp};
    }

    static TokenKind keyword_kind(const std::string& s) {
        if (s == "class") return TokenKind::KwClass;
        if (s == "interface") return TokenKind::KwInterface;
        if (s == "extends") return TokenKind::KwExtends;
        if (s == "implements") return TokenKind::KwImplements;
        if (s == "static") return TokenKind::KwStatic;
        if (s == "test") return TokenKind::KwTest;
        if (s == "int") return TokenKind::KwInt;
        if (s == "bool") return TokenKind::KwBool;
        if (s == "void") return TokenKind::KwVoid;
        if (s == "if") return TokenKind::KwIf;
        if (s == "else") return TokenKind::KwElse;
        if (s == "while") return TokenKind::KwWhile;
        if (s == "return") return TokenKind::KwReturn;
        if (s == "assert") return TokenKind::KwAssert;
        if (s == "new") return TokenKind::KwNew;
        if (s == "this") return TokenKind::KwThis;
        if (s == "true") return TokenKind::KwTrue;
        if (s == "false") return TokenKind::KwFalse;
        if (s == "abs") return TokenKind::KwAbs;
        if (s == "reflect_call") return TokenKind::KwReflectCall;
        return TokenKind::Ident;
    }

    Token int_literal(Span sp) {
        std::string s;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) s.push_back(advance());
        std::int64_t v = 0;
        bool overflow = false;
        for (char c : s) {
            if (v > (INT64_MAX - (c - '0')) / 10) {
                overflow = true;
                break;
            }
            v = v * 10 + (c - '0');
        }
        if (overflow) {
            diags_.push_back({sp, Severity::Error, DiagCode::LexError,
                              "integer literal out of range: " + s});
            v = 0;
        }
        return {TokenKind::IntLit, std::move(s), v, sp};
    }

    Token string_literal(Span sp) {
        advance();  // opening quote
        std::string s;
        while (!eof() && peek() != '"' && peek() != '\n') s.push_back(advance());
        if (eof() || peek() != '"') {
            diags_.push_back({sp, Severity::Error, DiagCode::LexError, "unterminated string"});
        } else {
            advance();
        }
        return {TokenKind::StringLit, std::move(s), 0, sp};
    }

    Token operator_token(Span sp) {
        char c = advance();
        auto two = [&](char next, TokenKind yes, TokenKind no) {
            if (peek() == next) {
                advance();
                return yes;
            }
            return no;
        };
        switch (c) {
            case '(': return {TokenKind::LParen, "(", 0, sp};
            case ')': return {TokenKind::RParen, ")", 0, sp};
            case '{': return {TokenKind::LBrace, "{", 0, sp};
            case '}': return {TokenKind::RBrace, "}", 0, sp};
            case ',': return {TokenKind::Comma, ",", 0, sp};
            case ';': return {TokenKind::Semi, ";", 0, sp};
            case '.': return {TokenKind::Dot, ".", 0, sp};
            case '+': return {TokenKind::Plus, "+", 0, sp};
            case '-': return {TokenKind::Minus, "-", 0, sp};
            case '*': return {TokenKind::Star, "*", 0, sp};
            case '/': return {TokenKind::Slash, "/", 0, sp};
            case '%': return {TokenKind::Percent, "%", 0, sp};
            case '<': return {two('=', TokenKind::Le, TokenKind::Lt), "<", 0, sp};
            case '>': return {two('=', TokenKind::Ge, TokenKind::Gt), ">", 0, sp};
            case '=': return {two('=', TokenKind::EqEq, TokenKind::Assign), "=", 0, sp};
            case '!': return {two('=', TokenKind::NotEq, TokenKind::Bang), "!", 0, sp};
            case '&':
                if (peek() == '&') {
                    advance();
                    return {TokenKind::AmpAmp, "&&", 0, sp};
                }
                break;
            case '|':
                if (peek() == '|') {
                    advance();
                    return {TokenKind::PipePipe, "||", 0, sp};
                }
                break;
            default: break;
        }
        diags_.push_back({sp, Severity::Error, DiagCode::LexError,
                          std::string("unexpected character '") + c + "'"});
        return {TokenKind::EndOfFile, "", 0, sp};
    }

    const std::string& src_;
    int unit_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    std::vector<Diagnostic>& diags_;
};

}  // namespace impactlab
