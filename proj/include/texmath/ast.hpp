#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "texmath/detail/util.hpp"
#include "texmath/diagnostic.hpp"

namespace texmath {

struct AstNode;
using NodeList = std::vector<AstNode>;
using detail::Box;

namespace ast {

/// A single character, digit, operator token, or zero-argument command
/// (stored with its backslash, e.g. "\\alpha").
struct Literal {
    std::string token;
    bool operator==(const Literal&) const = default;
};

struct Fun1 {
    std::string command;
    Box<AstNode> arg;
    bool operator==(const Fun1&) const = default;
};

/// One-argument command with a bracketed option, e.g. `\sqrt[3]{x}`.
struct Fun1Opt {
    std::string command;
    Box<AstNode> option;  // Sequence
    Box<AstNode> arg;
    bool operator==(const Fun1Opt&) const = default;
};

struct Fun2 {
    std::string command;
    Box<AstNode> arg1;
    Box<AstNode> arg2;
    bool operator==(const Fun2&) const = default;
};

struct Curly {
    NodeList children;
    bool operator==(const Curly&) const = default;
};

struct Sub {
    Box<AstNode> base;
    Box<AstNode> sub;
    bool operator==(const Sub&) const = default;
};

struct Sup {
    Box<AstNode> base;
    Box<AstNode> sup;
    bool operator==(const Sup&) const = default;
};

struct SubSup {
    Box<AstNode> base;
    Box<AstNode> sub;
    Box<AstNode> sup;
    bool operator==(const SubSup&) const = default;
};

/// `a \over b`; both sides are Sequence nodes holding the rest of the group.
struct Infix {
    std::string command;
    Box<AstNode> left;
    Box<AstNode> right;
    bool operator==(const Infix&) const = default;
};

/// Tabular environment. Each cell is a Sequence. Rows may be ragged.
struct Matrix {
    std::string env;
    std::string colspec;  // only for environments taking a column argument
    std::vector<NodeList> rows;

    std::size_t columns() const {
        std::size_t n = 0;
        for (const auto& r : rows) n = std::max(n, r.size());
        return n;
    }
    bool operator==(const Matrix&) const = default;
};

/// `\left open ... \right close`; tokens are spelled as in TeX ("(", "\\{", ".").
struct Delimited {
    std::string open;
    std::string close;
    Box<AstNode> body;  // Sequence
    bool operator==(const Delimited&) const = default;
};

/// `\big(` and relatives.
struct BigDelim {
    std::string command;
    std::string token;
    bool operator==(const BigDelim&) const = default;
};

struct Text {
    std::string content;
    bool operator==(const Text&) const = default;
};

struct Sequence {
    NodeList children;
    bool operator==(const Sequence&) const = default;
};

/// Declarative switch such as `\displaystyle`; `body` is the rest of the group.
struct Declarative {
    std::string command;
    Box<AstNode> body;  // Sequence
    bool operator==(const Declarative&) const = default;
};

/// `\intent{body}{intent='...', arg='...'}`. `span` locates the macro in the
/// source for diagnostics and does not take part in equality.
struct IntentWrap {
    Box<AstNode> body;
    std::string intent_raw;
    std::vector<std::pair<std::string, std::string>> arg_map;  // (formula ident, intent ident)
    Span span;

    bool operator==(const IntentWrap& o) const {
        return body == o.body && intent_raw == o.intent_raw && arg_map == o.arg_map;
    }
};

}  // namespace ast

struct AstNode {
    using Value = std::variant<ast::Literal, ast::Fun1, ast::Fun1Opt, ast::Fun2, ast::Curly, ast::Sub, ast::Sup,
                               ast::SubSup, ast::Infix, ast::Matrix, ast::Delimited, ast::BigDelim, ast::Text,
                               ast::Sequence, ast::Declarative, ast::IntentWrap>;
    Value value;

    template <class T>
    AstNode(T v) : value(std::move(v)) {}  // NOLINT(implicit)

    template <class T>
    bool is() const {
        return std::holds_alternative<T>(value);
    }
    template <class T>
    const T* as() const {
        return std::get_if<T>(&value);
    }
    template <class T>
    T* as() {
        return std::get_if<T>(&value);
    }

    bool operator==(const AstNode&) const = default;
};

inline AstNode make_literal(std::string token) { return ast::Literal{std::move(token)}; }

/// Calls `f(name)` for every command name (without backslash) the tree uses,
/// including environment names and command-spelled delimiters.
inline void for_each_command(const AstNode& node, const std::function<void(std::string_view)>& f) {
    auto cmd_token = [&](const std::string& tok) {
        if (tok.size() > 1 && tok[0] == '\\') f(std::string_view(tok).substr(1));
    };
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ast::Literal>) {
                cmd_token(n.token);
            } else if constexpr (std::is_same_v<T, ast::Fun1>) {
                f(n.command);
                for_each_command(*n.arg, f);
            } else if constexpr (std::is_same_v<T, ast::Fun1Opt>) {
                f(n.command);
                for_each_command(*n.option, f);
                for_each_command(*n.arg, f);
            } else if constexpr (std::is_same_v<T, ast::Fun2>) {
                f(n.command);
                for_each_command(*n.arg1, f);
                for_each_command(*n.arg2, f);
            } else if constexpr (std::is_same_v<T, ast::Curly> || std::is_same_v<T, ast::Sequence>) {
                for (const auto& c : n.children) for_each_command(c, f);
            } else if constexpr (std::is_same_v<T, ast::Sub>) {
                for_each_command(*n.base, f);
                for_each_command(*n.sub, f);
            } else if constexpr (std::is_same_v<T, ast::Sup>) {
                for_each_command(*n.base, f);
                for_each_command(*n.sup, f);
            } else if constexpr (std::is_same_v<T, ast::SubSup>) {
                for_each_command(*n.base, f);
                for_each_command(*n.sub, f);
                for_each_command(*n.sup, f);
            } else if constexpr (std::is_same_v<T, ast::Infix>) {
                f(n.command);
                for_each_command(*n.left, f);
                for_each_command(*n.right, f);
            } else if constexpr (std::is_same_v<T, ast::Matrix>) {
                f(n.env);
                for (const auto& row : n.rows)
                    for (const auto& cell : row) for_each_command(cell, f);
            } else if constexpr (std::is_same_v<T, ast::Delimited>) {
                f("left");
                f("right");
                cmd_token(n.open);
                cmd_token(n.close);
                for_each_command(*n.body, f);
            } else if constexpr (std::is_same_v<T, ast::BigDelim>) {
                f(n.command);
                cmd_token(n.token);
            } else if constexpr (std::is_same_v<T, ast::Text>) {
            } else if constexpr (std::is_same_v<T, ast::Declarative>) {
                f(n.command);
                for_each_command(*n.body, f);
            } else if constexpr (std::is_same_v<T, ast::IntentWrap>) {
                f("intent");
                for_each_command(*n.body, f);
            }
        },
        node.value);
}

/// Compact structural dump, e.g. `Sequence[Sup(Literal(x),Literal(2))]`.
inline std::string to_debug_string(const AstNode& node) {
    auto list = [](const NodeList& xs) {
        std::string s = "[";
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) s += ',';
            s += to_debug_string(xs[i]);
        }
        return s + "]";
    };
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ast::Literal>) return "Literal(" + n.token + ")";
            else if constexpr (std::is_same_v<T, ast::Fun1>) return "Fun1(" + n.command + "," + to_debug_string(*n.arg) + ")";
            else if constexpr (std::is_same_v<T, ast::Fun1Opt>)
                return "Fun1Opt(" + n.command + "," + to_debug_string(*n.option) + "," + to_debug_string(*n.arg) + ")";
            else if constexpr (std::is_same_v<T, ast::Fun2>)
                return "Fun2(" + n.command + "," + to_debug_string(*n.arg1) + "," + to_debug_string(*n.arg2) + ")";
            else if constexpr (std::is_same_v<T, ast::Curly>) return "Curly" + list(n.children);
            else if constexpr (std::is_same_v<T, ast::Sequence>) return "Sequence" + list(n.children);
            else if constexpr (std::is_same_v<T, ast::Sub>) return "Sub(" + to_debug_string(*n.base) + "," + to_debug_string(*n.sub) + ")";
            else if constexpr (std::is_same_v<T, ast::Sup>) return "Sup(" + to_debug_string(*n.base) + "," + to_debug_string(*n.sup) + ")";
            else if constexpr (std::is_same_v<T, ast::SubSup>)
                return "SubSup(" + to_debug_string(*n.base) + "," + to_debug_string(*n.sub) + "," + to_debug_string(*n.sup) + ")";
            else if constexpr (std::is_same_v<T, ast::Infix>)
                return "Infix(" + n.command + "," + to_debug_string(*n.left) + "," + to_debug_string(*n.right) + ")";
            else if constexpr (std::is_same_v<T, ast::Matrix>) {
                std::string s = "Matrix(" + n.env + ",[";
                for (std::size_t r = 0; r < n.rows.size(); ++r) {
                    if (r) s += ',';
                    s += list(n.rows[r]);
                }
                return s + "])";
            } else if constexpr (std::is_same_v<T, ast::Delimited>)
                return "Delimited(" + n.open + "," + n.close + "," + to_debug_string(*n.body) + ")";
            else if constexpr (std::is_same_v<T, ast::BigDelim>) return "BigDelim(" + n.command + "," + n.token + ")";
            else if constexpr (std::is_same_v<T, ast::Text>) return "Text(" + n.content + ")";
            else if constexpr (std::is_same_v<T, ast::Declarative>)
                return "Declarative(" + n.command + "," + to_debug_string(*n.body) + ")";
            else return "IntentWrap(" + to_debug_string(*n.body) + "," + n.intent_raw + ")";
        },
        node.value);
}

/// Drops braces around single-item arguments and scripts, so that `x^2` and
/// `x^{2}` (or `\frac12` and `\frac{1}{2}`) compare equal.
inline AstNode canonical(const AstNode& node) {
    auto slot = [](const AstNode& n) -> AstNode {
        if (auto c = n.as<ast::Curly>(); c && c->children.size() == 1) return canonical(c->children.front());
        return canonical(n);
    };
    auto list = [](const NodeList& xs) {
        NodeList out;
        out.reserve(xs.size());
        for (const auto& x : xs) out.push_back(canonical(x));
        return out;
    };
    return std::visit(
        [&](const auto& n) -> AstNode {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ast::Fun1>) return ast::Fun1{n.command, slot(*n.arg)};
            else if constexpr (std::is_same_v<T, ast::Fun1Opt>)
                return ast::Fun1Opt{n.command, canonical(*n.option), slot(*n.arg)};
            else if constexpr (std::is_same_v<T, ast::Fun2>) return ast::Fun2{n.command, slot(*n.arg1), slot(*n.arg2)};
            else if constexpr (std::is_same_v<T, ast::Curly>) return ast::Curly{list(n.children)};
            else if constexpr (std::is_same_v<T, ast::Sequence>) return ast::Sequence{list(n.children)};
            else if constexpr (std::is_same_v<T, ast::Sub>) return ast::Sub{canonical(*n.base), slot(*n.sub)};
            else if constexpr (std::is_same_v<T, ast::Sup>) return ast::Sup{canonical(*n.base), slot(*n.sup)};
            else if constexpr (std::is_same_v<T, ast::SubSup>)
                return ast::SubSup{canonical(*n.base), slot(*n.sub), slot(*n.sup)};
            else if constexpr (std::is_same_v<T, ast::Infix>)
                return ast::Infix{n.command, canonical(*n.left), canonical(*n.right)};
            else if constexpr (std::is_same_v<T, ast::Matrix>) {
                ast::Matrix m{n.env, n.colspec, {}};
                for (const auto& row : n.rows) m.rows.push_back(list(row));
                return m;
            } else if constexpr (std::is_same_v<T, ast::Delimited>)
                return ast::Delimited{n.open, n.close, canonical(*n.body)};
            else if constexpr (std::is_same_v<T, ast::Declarative>)
                return ast::Declarative{n.command, canonical(*n.body)};
            else if constexpr (std::is_same_v<T, ast::IntentWrap>)
                return ast::IntentWrap{slot(*n.body), n.intent_raw, n.arg_map, n.span};
            else return n;
        },
        node.value);
}

/// Equality up to braces around single-item arguments.
inline bool structurally_equal(const AstNode& a, const AstNode& b) { return canonical(a) == canonical(b); }

}  // namespace texmath
