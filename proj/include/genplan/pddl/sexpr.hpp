#pragma once

#include "genplan/error.hpp"

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace genplan::pddl {

/// A node of a parsed s-expression: either an atom token or a list.
/// Tokens are lower-cased, since the planning language is case-insensitive.
struct SExpr {
    bool is_list = false;
    std::string token;
    std::vector<SExpr> items;
    SourceLocation where;

    bool is_token() const { return !is_list; }
    bool is_token(std::string_view t) const { return !is_list && token == t; }
    std::size_t size() const { return items.size(); }
    const SExpr& operator[](std::size_t i) const { return items[i]; }

    /// True when this is a list whose first element is the given token.
    bool head_is(std::string_view t) const { return is_list && !items.empty() && items.front().is_token(t); }
};

class SExprReader {
public:
    explicit SExprReader(std::string_view text) : text_(text) {}

    /// Reads every top-level expression in the text.
    std::vector<SExpr> read_all() {
        std::vector<SExpr> out;
        skip_space();
        while (pos_ < text_.size()) {
            out.push_back(read_one());
            skip_space();
        }
        return out;
    }

private:
    SExpr read_one() {
        skip_space();
        if (pos_ >= text_.size())
            throw Error(ErrorCode::SyntaxError, "unexpected end of input", here());
        SExpr node;
        node.where = here();
        char c = text_[pos_];
        if (c == ')')
            throw Error(ErrorCode::SyntaxError, "unbalanced ')'", here());
        if (c == '(') {
            node.is_list = true;
            advance();
            for (;;) {
                skip_space();
                if (pos_ >= text_.size())
                    throw Error(ErrorCode::SyntaxError, "missing ')' for list opened here", node.where);
                if (text_[pos_] == ')') {
                    advance();
                    break;
                }
                node.items.push_back(read_one());
            }
            return node;
        }
        while (pos_ < text_.size()) {
            c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ';')
                break;
            node.token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            advance();
        }
        return node;
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    SourceLocation here() const { return {line_, column_}; }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

inline std::vector<SExpr> read_sexprs(std::string_view text) { return SExprReader(text).read_all(); }

} // namespace genplan::pddl
