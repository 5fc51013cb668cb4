#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bb84mc/diagnostics.hpp"

namespace bb84mc {

enum class Tok {
    Ident,
    Int,
    Real,
    String,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Semi,
    Colon,
    Comma,
    Prime,
    Assign,  // =
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Not,
    Plus,
    Minus,
    Star,
    Slash,
    Arrow,
    DotDot,
    Question,
    End,
};

inline std::string_view describe(Tok t) {
    switch (t) {
        case Tok::Ident: return "identifier";
        case Tok::Int: return "integer";
        case Tok::Real: return "decimal";
        case Tok::String: return "string";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Semi: return "';'";
        case Tok::Colon: return "':'";
        case Tok::Comma: return "','";
        case Tok::Prime: return "'''";
        case Tok::Assign: return "'='";
        case Tok::Ne: return "'!='";
        case Tok::Lt: return "'<'";
        case Tok::Le: return "'<='";
        case Tok::Gt: return "'>'";
        case Tok::Ge: return "'>='";
        case Tok::And: return "'&'";
        case Tok::Or: return "'|'";
        case Tok::Not: return "'!'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Arrow: return "'->'";
        case Tok::DotDot: return "'..'";
        case Tok::Question: return "'?'";
        case Tok::End: return "end of input";
    }
    return "?";
}

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::int64_t int_value = 0;
    double real_value = 0.0;
    SourcePos pos;
};

/// Splits model or property text into tokens. `//` starts a line comment.
inline std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    int line = 1;
    int col = 1;

    auto advance = [&](std::size_t count) {
        for (std::size_t k = 0; k < count && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto peek = [&](std::size_t off) -> char { return i + off < src.size() ? src[i + off] : '\0'; };

    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && peek(1) == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }

        Token tok;
        tok.pos = {line, col};

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            tok.kind = Tok::Ident;
            tok.text = std::string(src.substr(i, j - i));
            advance(j - i);
            out.push_back(std::move(tok));
            continue;
        }

        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            std::size_t j = i;
            bool real = false;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            // "0..1" is an integer followed by a range operator
            if (j < src.size() && src[j] == '.' && j + 1 < src.size() &&
                std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                real = true;
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    real = true;
                    j = k;
                    while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
                }
            }
            tok.text = std::string(src.substr(i, j - i));
            const char* first = tok.text.data();
            const char* last = first + tok.text.size();
            if (real) {
                tok.kind = Tok::Real;
                auto [ptr, ec] = std::from_chars(first, last, tok.real_value);
                if (ec != std::errc{} || ptr != last) {
                    throw ModelError(ErrorKind::Syntax, tok.pos, "malformed decimal literal '" + tok.text + "'");
                }
            } else {
                tok.kind = Tok::Int;
                auto [ptr, ec] = std::from_chars(first, last, tok.int_value);
                if (ec != std::errc{} || ptr != last) {
                    throw ModelError(ErrorKind::Syntax, tok.pos, "integer literal out of range '" + tok.text + "'");
                }
            }
            advance(j - i);
            out.push_back(std::move(tok));
            continue;
        }

        if (c == '"') {
            std::size_t j = i + 1;
            while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
            if (j >= src.size() || src[j] != '"') {
                throw ModelError(ErrorKind::Syntax, tok.pos, "unterminated string literal");
            }
            tok.kind = Tok::String;
            tok.text = std::string(src.substr(i + 1, j - i - 1));
            advance(j - i + 1);
            out.push_back(std::move(tok));
            continue;
        }

        auto two = [&](char a, char b) { return c == a && peek(1) == b; };
        std::size_t len = 1;
        if (two('-', '>')) {
            tok.kind = Tok::Arrow;
            len = 2;
        } else if (two('.', '.')) {
            tok.kind = Tok::DotDot;
            len = 2;
        } else if (two('!', '=')) {
            tok.kind = Tok::Ne;
            len = 2;
        } else if (two('<', '=')) {
            tok.kind = Tok::Le;
            len = 2;
        } else if (two('>', '=')) {
            tok.kind = Tok::Ge;
            len = 2;
        } else {
            switch (c) {
                case '[': tok.kind = Tok::LBracket; break;
                case ']': tok.kind = Tok::RBracket; break;
                case '(': tok.kind = Tok::LParen; break;
                case ')': tok.kind = Tok::RParen; break;
                case ';': tok.kind = Tok::Semi; break;
                case ':': tok.kind = Tok::Colon; break;
                case ',': tok.kind = Tok::Comma; break;
                case '\'': tok.kind = Tok::Prime; break;
                case '=': tok.kind = Tok::Assign; break;
                case '<': tok.kind = Tok::Lt; break;
                case '>': tok.kind = Tok::Gt; break;
                case '&': tok.kind = Tok::And; break;
                case '|': tok.kind = Tok::Or; break;
                case '!': tok.kind = Tok::Not; break;
                case '+': tok.kind = Tok::Plus; break;
                case '-': tok.kind = Tok::Minus; break;
                case '*': tok.kind = Tok::Star; break;
                case '/': tok.kind = Tok::Slash; break;
                case '?': tok.kind = Tok::Question; break;
                default:
                    throw ModelError(ErrorKind::Syntax, tok.pos, std::string("unexpected character '") + c + "'");
            }
        }
        tok.text = std::string(src.substr(i, len));
        advance(len);
        out.push_back(std::move(tok));
    }

    Token end;
    end.kind = Tok::End;
    end.pos = {line, col};
    out.push_back(end);
    return out;
}

}  // namespace bb84mc
