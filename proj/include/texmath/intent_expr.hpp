#pragma once

// Intent attribute expressions.
//
//     intent       := concept-or-literal | number | reference | application | structure
//     concept      := NCName
//     number       := '-'? digit+ ( '.' digit+ )?
//     reference    := '$' NCName
//     structure    := ':' ( 'common' | 'structure' | 'chemistry' | 'matrix' )
//     application  := intent hint? '(' arguments? ')'
//     arguments    := intent ( ',' intent )*
//     hint         := '@' ( 'prefix' | 'infix' | 'postfix' | 'function' | 'silent'
//                         | 'decimal-comma' | 'thousands-comma' )
//
// Application is left recursive; it is parsed as a primary followed by any
// number of `hint? ( args )` suffixes. ASCII whitespace is allowed between
// tokens.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "texmath/detail/util.hpp"
#include "texmath/diagnostic.hpp"

namespace texmath {

struct IntentExpr;

namespace intent {

struct Concept {
    std::string name;
    bool operator==(const Concept&) const = default;
};

/// `value` holds the unsigned digits, e.g. "3.5" for "-3.5".
struct Number {
    std::string value;
    bool negative = false;

    std::string text() const { return negative ? "-" + value : value; }
    bool operator==(const Number&) const = default;
};

struct Reference {
    std::string name;
    bool operator==(const Reference&) const = default;
};

enum class StructureKind { common, structure, chemistry, matrix };

struct Structure {
    StructureKind kind;
    bool operator==(const Structure&) const = default;
};

enum class Hint { prefix, infix, postfix, function, silent, decimal_comma, thousands_comma };

inline constexpr std::array<std::pair<StructureKind, std::string_view>, 4> structure_names{{
    {StructureKind::common, "common"},
    {StructureKind::structure, "structure"},
    {StructureKind::chemistry, "chemistry"},
    {StructureKind::matrix, "matrix"},
}};

inline constexpr std::array<std::pair<Hint, std::string_view>, 7> hint_names{{
    {Hint::prefix, "prefix"},
    {Hint::infix, "infix"},
    {Hint::postfix, "postfix"},
    {Hint::function, "function"},
    {Hint::silent, "silent"},
    {Hint::decimal_comma, "decimal-comma"},
    {Hint::thousands_comma, "thousands-comma"},
}};

struct Application;

}  // namespace intent

struct IntentExpr;

namespace intent {
struct Application {
    detail::Box<IntentExpr> head;
    std::optional<Hint> hint;
    std::vector<IntentExpr> args;
    bool operator==(const Application&) const = default;
};
}  // namespace intent

struct IntentExpr {
    using Value = std::variant<intent::Concept, intent::Number, intent::Reference, intent::Structure,
                               intent::Application>;
    Value value;

    template <class T>
    IntentExpr(T v) : value(std::move(v)) {}  // NOLINT(implicit)

    template <class T>
    const T* as() const {
        return std::get_if<T>(&value);
    }
    bool operator==(const IntentExpr&) const = default;
};

namespace detail {

inline bool is_ncname_start(char c) {
    return is_ascii_alpha(c) || c == '_' || static_cast<unsigned char>(c) >= 0x80;
}
inline bool is_ncname_char(char c) {
    return is_ncname_start(c) || is_ascii_digit(c) || c == '-' || c == '.';
}

inline bool is_ncname(std::string_view s) {
    if (s.empty() || !is_ncname_start(s[0])) return false;
    for (char c : s)
        if (!is_ncname_char(c)) return false;
    return true;
}

class IntentParser {
public:
    explicit IntentParser(std::string_view text) : text_(text) {}

    IntentExpr parse() {
        skip_ws();
        if (at_end()) fail("empty intent");
        IntentExpr e = parse_intent();
        skip_ws();
        if (!at_end()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int depth_ = 0;

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }
    void skip_ws() {
        while (!at_end() && is_ascii_space(text_[pos_])) ++pos_;
    }

    [[noreturn]] void fail(std::string msg) const {
        Span span{pos_, pos_ + 1};
        if (pos_ >= text_.size()) span = {text_.empty() ? 0 : text_.size() - 1, text_.size()};
        throw Error(make_error(codes::intent_syntax, std::move(msg), span));
    }

    std::string read_ncname() {
        if (!is_ncname_start(peek())) fail("expected a name");
        auto start = pos_;
        while (!at_end() && is_ncname_char(text_[pos_])) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    IntentExpr parse_primary() {
        char c = peek();
        if (c == '$') {
            ++pos_;
            return intent::Reference{read_ncname()};
        }
        if (c == ':') {
            ++pos_;
            auto start = pos_;
            auto word = is_ncname_start(peek()) ? read_ncname() : std::string();
            for (const auto& [kind, name] : intent::structure_names)
                if (word == name) return intent::Structure{kind};
            pos_ = start;
            fail("unknown structure kind '" + word + "'");
        }
        if (c == '-' || is_ascii_digit(c)) {
            intent::Number n;
            if (c == '-') {
                n.negative = true;
                ++pos_;
            }
            if (!is_ascii_digit(peek())) fail("expected digit");
            while (is_ascii_digit(peek())) n.value += text_[pos_++];
            if (peek() == '.') {
                n.value += text_[pos_++];
                if (!is_ascii_digit(peek())) fail("expected digit after '.'");
                while (is_ascii_digit(peek())) n.value += text_[pos_++];
            }
            if (is_ncname_char(peek())) fail("malformed number");
            return n;
        }
        if (is_ncname_start(c)) return intent::Concept{read_ncname()};
        if (at_end()) fail("unexpected end of intent");
        fail("unexpected '" + std::string(1, c) + "'");
    }

    IntentExpr parse_intent() {
        if (++depth_ > 128) fail("intent nested too deeply");
        IntentExpr expr = parse_primary();
        for (;;) {
            skip_ws();
            std::optional<intent::Hint> hint;
            if (peek() == '@') {
                ++pos_;
                auto start = pos_;
                std::string word;
                while (!at_end() && (is_ascii_alpha(text_[pos_]) || text_[pos_] == '-')) word += text_[pos_++];
                for (const auto& [h, name] : intent::hint_names)
                    if (word == name) hint = h;
                if (!hint) {
                    pos_ = start;
                    fail("unknown hint '" + word + "'");
                }
                skip_ws();
                if (peek() != '(') fail("expected '(' after hint");
            }
            if (peek() != '(') break;
            ++pos_;
            intent::Application app{std::move(expr), hint, {}};
            skip_ws();
            if (peek() != ')') {
                for (;;) {
                    skip_ws();
                    app.args.push_back(parse_intent());
                    skip_ws();
                    if (peek() == ',') {
                        ++pos_;
                        continue;
                    }
                    break;
                }
            }
            skip_ws();
            if (peek() != ')') fail("expected ')'");
            ++pos_;
            expr = std::move(app);
        }
        --depth_;
        return expr;
    }
};

inline void collect_references(const IntentExpr& e, std::vector<std::string>& out) {
    if (auto r = e.as<intent::Reference>()) {
        for (const auto& existing : out)
            if (existing == r->name) return;
        out.push_back(r->name);
    } else if (auto a = e.as<intent::Application>()) {
        collect_references(*a->head, out);
        for (const auto& arg : a->args) collect_references(arg, out);
    }
}

}  // namespace detail

/// Parses an intent expression; the whole input must match. Throws `Error`
/// with code E_INTENT_SYNTAX and a span into `text` on failure.
inline IntentExpr parse_intent(std::string_view text) { return detail::IntentParser(text).parse(); }

/// Distinct `$name` references in left-to-right order.
inline std::vector<std::string> intent_references(const IntentExpr& e) {
    std::vector<std::string> out;
    detail::collect_references(e, out);
    return out;
}

/// Canonical text form (no whitespace).
inline std::string to_string(const IntentExpr& e) {
    if (auto c = e.as<intent::Concept>()) return c->name;
    if (auto n = e.as<intent::Number>()) return n->text();
    if (auto r = e.as<intent::Reference>()) return "$" + r->name;
    if (auto s = e.as<intent::Structure>()) {
        for (const auto& [kind, name] : intent::structure_names)
            if (kind == s->kind) return ":" + std::string(name);
    }
    const auto& a = std::get<intent::Application>(e.value);
    std::string out = to_string(*a.head);
    if (a.hint) {
        for (const auto& [h, name] : intent::hint_names)
            if (h == *a.hint) out += "@" + std::string(name);
    }
    out += '(';
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) out += ',';
        out += to_string(a.args[i]);
    }
    return out + ")";
}

}  // namespace texmath
