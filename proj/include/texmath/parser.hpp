#pragma once

// Recursive-descent parser for the whitelisted TeX math dialect.
//
// Ordered choice is resolved by the next token alone, so no alternative ever
// needs to backtrack across a brace group. The first error aborts the parse;
// warnings accumulate alongside a successful AST.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "texmath/ast.hpp"
#include "texmath/detail/util.hpp"
#include "texmath/diagnostic.hpp"
#include "texmath/intent_expr.hpp"
#include "texmath/registry.hpp"
#include "texmath/translation.hpp"

namespace texmath {

inline constexpr int max_nesting_depth = 128;

struct ParseOptions {
    /// Accept chem-only commands (\sbond, \longrightleftharpoons, ...). Set
    /// after the mhchem preprocessor has run.
    bool allow_chem = false;
};

struct ParseResult {
    std::optional<AstNode> ast;  // root Sequence; absent iff `errors` is non-empty
    std::vector<Diagnostic> errors;
    std::vector<Diagnostic> warnings;

    bool ok() const { return ast.has_value(); }

    std::vector<Diagnostic> diagnostics() const {
        auto out = errors;
        out.insert(out.end(), warnings.begin(), warnings.end());
        return out;
    }
};

namespace detail {

enum class TokKind { eof, lbrace, rbrace, caret, underscore, amp, rowsep, command, ch, bad };

struct Tok {
    TokKind kind = TokKind::eof;
    std::string_view text;  // command name without backslash, or the character
    Span span;
};

/// Parses `intent='...'[, arg='a=x,b=y']`. Returns an error message or the
/// parsed pieces.
struct IntentArgs {
    std::string intent;
    std::vector<std::pair<std::string, std::string>> arg_map;
};

inline std::optional<std::string> parse_intent_args(std::string_view raw, IntentArgs& out) {
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < raw.size() && is_ascii_space(raw[i])) ++i;
    };
    bool have_intent = false;
    bool have_arg = false;
    for (;;) {
        skip_ws();
        auto key_start = i;
        while (i < raw.size() && is_ascii_alpha(raw[i])) ++i;
        std::string key(raw.substr(key_start, i - key_start));
        skip_ws();
        if (i >= raw.size() || raw[i] != '=') return "expected key=value";
        ++i;
        skip_ws();
        std::string value;
        if (i < raw.size() && (raw[i] == '\'' || raw[i] == '"')) {
            char q = raw[i++];
            auto close = raw.find(q, i);
            if (close == std::string_view::npos) return "unterminated quote";
            value = std::string(raw.substr(i, close - i));
            i = close + 1;
        } else {
            auto start = i;
            while (i < raw.size() && raw[i] != ',') ++i;
            value = std::string(trim(raw.substr(start, i - start)));
        }
        std::string unescaped;
        for (std::size_t k = 0; k < value.size(); ++k) {
            if (value[k] == '\\' && k + 1 < value.size() && value[k + 1] == '$') continue;
            unescaped += value[k];
        }
        if (key == "intent" && !have_intent) {
            have_intent = true;
            out.intent = unescaped;
        } else if (key == "arg" && !have_arg) {
            have_arg = true;
            std::size_t p = 0;
            std::string_view v = unescaped;
            while (p <= v.size()) {
                auto comma = v.find(',', p);
                if (comma == std::string_view::npos) comma = v.size();
                auto kv = split_key_value(trim(v.substr(p, comma - p)));
                if (!kv) return "malformed arg binding";
                auto a = std::string(trim(kv->first));
                auto b = std::string(trim(kv->second));
                if (!is_ncname(a) || !is_ncname(b)) return "arg binding names must be NCNames";
                for (const auto& [f, _] : out.arg_map)
                    if (f == a) return "duplicate binding for '" + a + "'";
                out.arg_map.emplace_back(a, b);
                p = comma + 1;
            }
        } else {
            return key.empty() ? std::string("expected key") : "unexpected key '" + key + "'";
        }
        skip_ws();
        if (i >= raw.size()) break;
        if (raw[i] != ',') return "expected ','";
        ++i;
    }
    if (!have_intent) return "missing intent=";
    return std::nullopt;
}

class Parser {
public:
    Parser(std::string_view input, const Registry& reg, ParseOptions opts)
        : in_(input), reg_(reg), opts_(opts) {}

    ParseResult run() {
        ParseResult result;
        try {
            auto children = parse_group(Ctx::top, Span{0, 0});
            result.ast = AstNode(ast::Sequence{std::move(children)});
            result.warnings = std::move(warnings_);
        } catch (const Error& e) {
            result.errors.push_back(e.diagnostic());
            result.warnings = std::move(warnings_);
        }
        return result;
    }

private:
    enum class Ctx { top, brace, left, env, option };

    struct Item {
        enum class Kind { node, infix, decl } kind;
        std::optional<AstNode> node;
        std::string command;
        Span span;
    };

    std::string_view in_;
    const Registry& reg_;
    ParseOptions opts_;
    std::size_t pos_ = 0;
    int depth_ = 0;
    std::vector<Diagnostic> warnings_;

    [[noreturn]] void fail(std::string_view code, std::string msg, Span span) const {
        if (span.end <= span.begin) span.end = span.begin + 1;
        if (span.end > in_.size()) {
            span.end = in_.size();
            span.begin = span.end == 0 ? 0 : std::min(span.begin, span.end - 1);
        }
        throw Error(make_error(code, std::move(msg), span));
    }

    void skip_ws() {
        while (pos_ < in_.size() && is_ascii_space(in_[pos_])) ++pos_;
    }

    Tok peek() {
        skip_ws();
        Tok t;
        if (pos_ >= in_.size()) {
            t.span = {in_.size(), in_.size()};
            return t;
        }
        char c = in_[pos_];
        t.span = {pos_, pos_ + 1};
        t.text = in_.substr(pos_, 1);
        switch (c) {
            case '{': t.kind = TokKind::lbrace; return t;
            case '}': t.kind = TokKind::rbrace; return t;
            case '^': t.kind = TokKind::caret; return t;
            case '_': t.kind = TokKind::underscore; return t;
            case '&': t.kind = TokKind::amp; return t;
            default: break;
        }
        if (c == '\\') {
            std::size_t j = pos_ + 1;
            if (j >= in_.size()) {
                t.kind = TokKind::bad;
                return t;
            }
            if (is_ascii_alpha(in_[j])) {
                while (j < in_.size() && is_ascii_alpha(in_[j])) ++j;
                t.kind = TokKind::command;
                t.text = in_.substr(pos_ + 1, j - pos_ - 1);
                t.span = {pos_, j};
                return t;
            }
            if (in_[j] == '\\') {
                t.kind = TokKind::rowsep;
                t.span = {pos_, j + 1};
                t.text = in_.substr(pos_, 2);
                return t;
            }
            auto len = utf8_sequence_length(in_, j);
            t.kind = TokKind::command;
            t.text = in_.substr(j, len == 0 ? 1 : len);
            t.span = {pos_, j + t.text.size()};
            return t;
        }
        auto len = utf8_sequence_length(in_, pos_);
        if (len != 1) {
            t.kind = TokKind::bad;
            t.span = {pos_, pos_ + (len == 0 ? 1 : len)};
            t.text = in_.substr(pos_, t.span.size());
            return t;
        }
        if (is_ascii_alpha(c) || is_ascii_digit(c) || reg_.find_operator(t.text)) {
            t.kind = TokKind::ch;
            return t;
        }
        t.kind = TokKind::bad;
        return t;
    }

    void consume(const Tok& t) { pos_ = t.span.end; }

    void enter(Span where) {
        if (++depth_ > max_nesting_depth) fail(codes::too_deep, "nesting deeper than 128 levels", where);
    }
    void leave() { --depth_; }

    const CommandSpec& resolve(const Tok& t) {
        if (t.kind == TokKind::bad) {
            if (t.text == "\\") fail(codes::bad_char, "stray backslash", t.span);
            fail(codes::bad_char, "character not allowed in math mode", t.span);
        }
        const CommandSpec* spec = reg_.lookup(t.text);
        if (!spec) fail(codes::unknown_command, "unknown command \\" + std::string(t.text), t.span);
        if (spec->category == Category::chem_only && !opts_.allow_chem)
            fail(codes::unknown_command, "\\" + std::string(t.text) + " is only available in chemistry mode", t.span);
        if (spec->fn == TranslationFn::chem)
            fail(codes::chem_syntax, "\\" + std::string(t.text) + " was not expanded by the chemistry preprocessor",
                 t.span);
        return *spec;
    }

    static bool is_fence(const CommandSpec& s, std::string_view side) {
        return s.fn == TranslationFn::fence && !s.params.empty() && s.params[0] == side;
    }

    bool is_stop(const Tok& t, Ctx ctx) const {
        switch (t.kind) {
            case TokKind::eof:
            case TokKind::rbrace:
            case TokKind::amp:
            case TokKind::rowsep:
                return true;
            case TokKind::command: {
                if (t.text == "end") return true;
                const CommandSpec* s = reg_.lookup(t.text);
                return s && is_fence(*s, "right");
            }
            case TokKind::ch:
                return ctx == Ctx::option && t.text == "]";
            default:
                return false;
        }
    }

    /// Raises the error for a stop token the context cannot accept, or
    /// returns normally when the token legitimately ends the group.
    void check_stop(const Tok& t, Ctx ctx, Span opener) const {
        bool is_right = t.kind == TokKind::command && t.text != "end";
        bool is_end = t.kind == TokKind::command && t.text == "end";
        switch (ctx) {
            case Ctx::top:
                if (t.kind == TokKind::eof) return;
                break;
            case Ctx::brace:
                if (t.kind == TokKind::rbrace) return;
                if (t.kind == TokKind::eof) fail(codes::unbalanced_brace, "unclosed '{'", opener);
                break;
            case Ctx::left:
                if (is_right) return;
                fail(codes::bad_delim, "\\left without matching \\right", opener);
            case Ctx::env:
                if (t.kind == TokKind::amp || t.kind == TokKind::rowsep || is_end) return;
                if (t.kind == TokKind::eof) fail(codes::bad_env, "\\begin without matching \\end", opener);
                break;
            case Ctx::option:
                if (t.kind == TokKind::ch) return;
                fail(codes::unbalanced_brace, "unclosed '['", opener);
        }
        if (t.kind == TokKind::rbrace) fail(codes::unbalanced_brace, "unmatched '}'", t.span);
        if (is_right) fail(codes::bad_delim, "\\right without matching \\left", t.span);
        if (is_end) fail(codes::bad_env, "\\end without matching \\begin", t.span);
        fail(codes::misplaced, std::string(t.kind == TokKind::amp ? "'&'" : "'\\\\'") + " outside a tabular environment",
             t.span);
    }

    NodeList parse_group(Ctx ctx, Span opener) {
        std::vector<Item> items;
        int decls = 0;
        for (;;) {
            Tok t = peek();
            if (is_stop(t, ctx)) {
                check_stop(t, ctx, opener);
                break;
            }
            if (t.kind == TokKind::command) {
                if (t.text != "begin") {
                    const CommandSpec& spec = resolve(t);
                    if (spec.fn == TranslationFn::infix || spec.fn == TranslationFn::declstyle) {
                        consume(t);
                        auto kind = spec.fn == TranslationFn::infix ? Item::Kind::infix : Item::Kind::decl;
                        if (kind == Item::Kind::decl && depth_ + ++decls > max_nesting_depth)
                            fail(codes::too_deep, "too many nested style switches", t.span);
                        if (kind == Item::Kind::infix)
                            warnings_.push_back(make_warning(
                                codes::deprecated, "\\" + spec.name + " is deprecated; use a two-argument form",
                                t.span));
                        items.push_back({kind, std::nullopt, spec.name, t.span});
                        Tok after = peek();
                        if (after.kind == TokKind::caret || after.kind == TokKind::underscore)
                            fail(codes::misplaced, "script cannot attach to \\" + spec.name, after.span);
                        continue;
                    }
                }
            }
            items.push_back({Item::Kind::node, parse_scripted(), {}, {}});
        }
        return finalize(std::move(items));
    }

    NodeList finalize(std::vector<Item> items) {
        std::optional<std::size_t> infix;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (items[i].kind != Item::Kind::infix) continue;
            if (infix) fail(codes::double_infix, "ambiguous: more than one infix command in a group", items[i].span);
            infix = i;
        }
        if (!infix) return finalize_decl(items, 0, items.size());
        ast::Infix node{items[*infix].command, AstNode(ast::Sequence{finalize_decl(items, 0, *infix)}),
                        AstNode(ast::Sequence{finalize_decl(items, *infix + 1, items.size())})};
        return {AstNode(std::move(node))};
    }

    static NodeList finalize_decl(std::vector<Item>& items, std::size_t from, std::size_t to) {
        NodeList out;
        for (std::size_t i = from; i < to; ++i) {
            if (items[i].kind == Item::Kind::decl) {
                out.push_back(ast::Declarative{items[i].command, AstNode(ast::Sequence{finalize_decl(items, i + 1, to)})});
                return out;
            }
            out.push_back(std::move(*items[i].node));
        }
        return out;
    }

    AstNode parse_scripted() {
        Tok first = peek();
        std::optional<AstNode> base;
        if (first.kind != TokKind::caret && first.kind != TokKind::underscore) base = parse_atom();
        std::optional<AstNode> sub, sup;
        for (;;) {
            Tok t = peek();
            if (t.kind != TokKind::caret && t.kind != TokKind::underscore) break;
            bool is_sup = t.kind == TokKind::caret;
            if ((is_sup && sup) || (!is_sup && sub))
                fail(codes::double_script, is_sup ? "double superscript" : "double subscript", t.span);
            consume(t);
            auto arg = parse_script_arg(t.span);
            (is_sup ? sup : sub) = std::move(arg);
        }
        if (!sub && !sup) return std::move(*base);
        AstNode b = base ? std::move(*base) : AstNode(ast::Curly{});
        if (sub && sup) return ast::SubSup{std::move(b), std::move(*sub), std::move(*sup)};
        if (sub) return ast::Sub{std::move(b), std::move(*sub)};
        return ast::Sup{std::move(b), std::move(*sup)};
    }

    /// A braced group, a single character, or a token-like command.
    std::optional<AstNode> parse_simple_arg() {
        Tok t = peek();
        if (t.kind == TokKind::lbrace) return parse_curly();
        if (t.kind == TokKind::ch) {
            consume(t);
            return make_literal(std::string(t.text));
        }
        if (t.kind == TokKind::command && t.text != "begin" && t.text != "end") {
            const CommandSpec* s = reg_.lookup(t.text);
            if (s && is_token_like(s->fn)) {
                resolve(t);
                consume(t);
                return make_literal("\\" + s->name);
            }
        }
        return std::nullopt;
    }

    AstNode parse_script_arg(Span op) {
        if (auto a = parse_simple_arg()) return std::move(*a);
        Tok t = peek();
        if (t.kind == TokKind::command || t.kind == TokKind::bad) {
            if (t.kind == TokKind::bad || (t.text != "begin" && t.text != "end")) resolve(t);
            fail(codes::empty_arg, "script argument must be braced", t.span);
        }
        fail(codes::empty_arg, "missing script argument", op);
    }

    AstNode parse_command_arg(const Tok& cmd) {
        if (auto a = parse_simple_arg()) return std::move(*a);
        Tok t = peek();
        if (t.kind == TokKind::command || t.kind == TokKind::bad) {
            if (t.kind == TokKind::bad || (t.text != "begin" && t.text != "end")) resolve(t);
            fail(codes::empty_arg, "argument of \\" + std::string(cmd.text) + " must be braced", t.span);
        }
        fail(codes::empty_arg, "missing argument for \\" + std::string(cmd.text), cmd.span);
    }

    AstNode parse_curly() {
        Tok open = peek();
        consume(open);
        enter(open.span);
        auto children = parse_group(Ctx::brace, open.span);
        consume(peek());  // '}'
        leave();
        return ast::Curly{std::move(children)};
    }

    AstNode parse_atom() {
        Tok t = peek();
        switch (t.kind) {
            case TokKind::lbrace:
                return parse_curly();
            case TokKind::ch:
                consume(t);
                return make_literal(std::string(t.text));
            case TokKind::bad:
                resolve(t);
                break;
            case TokKind::command:
                return parse_command(t);
            default:
                break;
        }
        // Stop tokens never reach here; parse_group filters them.
        fail(codes::misplaced, "unexpected token", t.span);
    }

    AstNode parse_command(const Tok& t) {
        if (t.text == "begin") return parse_environment(t);
        const CommandSpec& spec = resolve(t);
        consume(t);
        switch (spec.fn) {
            case TranslationFn::identifier:
            case TranslationFn::operator_:
            case TranslationFn::bigop:
            case TranslationFn::namedfn:
            case TranslationFn::delimiter:
            case TranslationFn::space:
                return make_literal("\\" + spec.name);
            case TranslationFn::fence: {
                if (is_fence(spec, "right")) fail(codes::bad_delim, "\\right without matching \\left", t.span);
                std::string open = parse_delimiter(t);
                enter(t.span);
                auto body = parse_group(Ctx::left, t.span);
                Tok right = peek();
                consume(right);
                std::string close = parse_delimiter(right);
                leave();
                return ast::Delimited{std::move(open), std::move(close), AstNode(ast::Sequence{std::move(body)})};
            }
            case TranslationFn::bigdelim: {
                std::string tok = parse_delimiter(t);
                if (tok == ".") fail(codes::bad_delim, "\\" + spec.name + " needs a visible delimiter", t.span);
                return ast::BigDelim{spec.name, std::move(tok)};
            }
            case TranslationFn::infix:
            case TranslationFn::declstyle:
                break;  // handled by parse_group
            case TranslationFn::matrix:
                fail(codes::bad_env, "\\" + spec.name + " is an environment; use \\begin{" + spec.name + "}", t.span);
            case TranslationFn::sqrt: {
                Tok b = peek();
                if (b.kind == TokKind::ch && b.text == "[") {
                    consume(b);
                    enter(b.span);
                    auto opt = parse_group(Ctx::option, b.span);
                    consume(peek());  // ']'
                    leave();
                    auto arg = parse_command_arg(t);
                    return ast::Fun1Opt{spec.name, AstNode(ast::Sequence{std::move(opt)}), std::move(arg)};
                }
                return ast::Fun1{spec.name, parse_command_arg(t)};
            }
            case TranslationFn::accent:
            case TranslationFn::underaccent:
            case TranslationFn::style:
            case TranslationFn::opname:
            case TranslationFn::phantom:
            case TranslationFn::enclose:
                return ast::Fun1{spec.name, parse_command_arg(t)};
            case TranslationFn::text:
                return ast::Fun1{spec.name, parse_text_arg(t)};
            case TranslationFn::fraction:
            case TranslationFn::overunder: {
                auto a = parse_command_arg(t);
                auto b = parse_command_arg(t);
                return ast::Fun2{spec.name, std::move(a), std::move(b)};
            }
            case TranslationFn::intent:
                return parse_intent_macro(t);
            case TranslationFn::chem:
                break;  // rejected by resolve
        }
        fail(codes::misplaced, "unexpected \\" + spec.name, t.span);
    }

    /// Delimiter after \left, \right or \big; returned in TeX spelling.
    std::string parse_delimiter(const Tok& after) {
        Tok t = peek();
        if (t.kind == TokKind::ch) {
            if (t.text == ".") {
                consume(t);
                return ".";
            }
            const OperatorSpec* op = reg_.find_operator(t.text);
            if (op && op->delimiter) {
                consume(t);
                return std::string(t.text);
            }
        } else if (t.kind == TokKind::command && t.text != "begin" && t.text != "end") {
            const CommandSpec* s = reg_.lookup(t.text);
            if (s && s->fn == TranslationFn::delimiter) {
                resolve(t);
                consume(t);
                return "\\" + s->name;
            }
        }
        Span where = t.kind == TokKind::eof ? after.span : t.span;
        fail(codes::bad_delim, "expected a delimiter after \\" + std::string(after.text), where);
    }

    AstNode parse_text_arg(const Tok& cmd) {
        Tok open = peek();
        if (open.kind != TokKind::lbrace) {
            if (open.kind == TokKind::eof) fail(codes::empty_arg, "missing argument for \\" + std::string(cmd.text), cmd.span);
            fail(codes::empty_arg, "argument of \\" + std::string(cmd.text) + " must be braced", open.span);
        }
        std::size_t i = open.span.end;
        std::string content;
        while (i < in_.size() && in_[i] != '}') {
            char c = in_[i];
            if (c == '{' || c == '\\') fail(codes::bad_text, "commands and groups are not allowed in text", {i, i + 1});
            auto len = utf8_sequence_length(in_, i);
            if (len == 0) fail(codes::bad_char, "malformed UTF-8", {i, i + 1});
            if (len == 1 && static_cast<unsigned char>(c) < 0x20 && c != ' ' && c != '\t' && c != '\n')
                fail(codes::bad_char, "control character in text", {i, i + 1});
            if (len == 1 && c == 0x7F) fail(codes::bad_char, "control character in text", {i, i + 1});
            content.append(in_.substr(i, len));
            i += len;
        }
        if (i >= in_.size()) fail(codes::unbalanced_brace, "unclosed '{'", open.span);
        pos_ = i + 1;
        return ast::Text{std::move(content)};
    }

    AstNode parse_intent_macro(const Tok& cmd) {
        enter(cmd.span);
        auto body = parse_command_arg(cmd);
        leave();
        Tok open = peek();
        if (open.kind != TokKind::lbrace) {
            if (open.kind == TokKind::eof) fail(codes::empty_arg, "missing intent argument", cmd.span);
            fail(codes::empty_arg, "intent argument must be braced", open.span);
        }
        std::size_t i = open.span.end;
        int level = 1;
        while (i < in_.size()) {
            if (in_[i] == '{') ++level;
            else if (in_[i] == '}' && --level == 0) break;
            ++i;
        }
        if (i >= in_.size()) fail(codes::unbalanced_brace, "unclosed '{'", open.span);
        Span group{open.span.begin, i + 1};
        std::string_view raw = in_.substr(open.span.end, i - open.span.end);
        for (std::size_t k = 0; k < raw.size(); ++k) {
            auto len = utf8_sequence_length(raw, k);
            if (len == 0) fail(codes::bad_char, "malformed UTF-8", {open.span.end + k, open.span.end + k + 1});
            k += len - 1;
        }
        pos_ = i + 1;

        IntentArgs args;
        if (auto err = parse_intent_args(raw, args)) fail(codes::intent_syntax, *err, group);
        try {
            parse_intent(args.intent);
        } catch (const Error& e) {
            fail(codes::intent_syntax, "invalid intent: " + e.diagnostic().message, group);
        }
        return ast::IntentWrap{std::move(body), std::move(args.intent), std::move(args.arg_map),
                               Span{cmd.span.begin, group.end}};
    }

    /// Reads `{name}` after \begin or \end.
    std::string read_env_name(const Tok& cmd) {
        Tok open = peek();
        if (open.kind != TokKind::lbrace) fail(codes::bad_env, "expected {name} after \\" + std::string(cmd.text), cmd.span);
        std::size_t i = open.span.end;
        while (i < in_.size() && (is_ascii_alpha(in_[i]) || in_[i] == '*')) ++i;
        if (i >= in_.size() || in_[i] != '}' || i == open.span.end)
            fail(codes::bad_env, "malformed environment name", {cmd.span.begin, std::min(i + 1, in_.size())});
        pos_ = i + 1;
        return std::string(in_.substr(open.span.end, i - open.span.end));
    }

    AstNode parse_environment(const Tok& begin) {
        consume(begin);
        auto name_start = peek().span.begin;
        std::string name = read_env_name(begin);
        Span name_span{name_start, pos_};
        const CommandSpec* spec = reg_.lookup(name);
        if (!spec || spec->category != Category::environment || spec->fn != TranslationFn::matrix)
            fail(codes::bad_env, "unknown environment '" + name + "'", name_span);

        std::string colspec;
        if (spec->arity == 1) {
            Tok open = peek();
            if (open.kind != TokKind::lbrace) fail(codes::bad_env, "\\begin{" + name + "} needs a column spec", name_span);
            std::size_t i = open.span.end;
            while (i < in_.size() && in_[i] != '}') {
                char c = in_[i];
                if (c != 'l' && c != 'c' && c != 'r' && c != '|' && c != ' ')
                    fail(codes::bad_env, "column spec may only contain l, c, r and |", {i, i + 1});
                if (c != ' ') colspec += c;
                ++i;
            }
            if (i >= in_.size()) fail(codes::unbalanced_brace, "unclosed '{'", open.span);
            if (colspec.empty()) fail(codes::bad_env, "empty column spec", open.span);
            pos_ = i + 1;
        }

        Span opener{begin.span.begin, name_span.end};
        enter(opener);
        ast::Matrix m{name, colspec, {}};
        NodeList row;
        for (;;) {
            auto cell = parse_group(Ctx::env, opener);
            row.push_back(ast::Sequence{std::move(cell)});
            Tok t = peek();
            consume(t);
            if (t.kind == TokKind::amp) continue;
            m.rows.push_back(std::move(row));
            row.clear();
            if (t.kind == TokKind::rowsep) continue;
            // \end
            std::string end_name = read_env_name(t);
            if (end_name != name)
                fail(codes::bad_env, "\\begin{" + name + "} closed by \\end{" + end_name + "}", {t.span.begin, pos_});
            break;
        }
        leave();
        auto empty_row = [](const NodeList& r) {
            return r.size() == 1 && r.front().as<ast::Sequence>() && r.front().as<ast::Sequence>()->children.empty();
        };
        while (m.rows.size() > 1 && empty_row(m.rows.back())) m.rows.pop_back();
        return m;
    }
};

inline bool ends_with_command_word(const std::string& out) {
    std::size_t i = out.size();
    while (i > 0 && is_ascii_alpha(out[i - 1])) --i;
    return i < out.size() && i > 0 && out[i - 1] == '\\';
}

inline void append_tex(std::string& out, std::string_view piece) {
    if (!piece.empty() && is_ascii_alpha(piece.front()) && ends_with_command_word(out)) out += ' ';
    out += piece;
}

}  // namespace detail

/// Parses `input` against `registry`. Deterministic; never throws.
inline ParseResult parse(std::string_view input, const Registry& registry, ParseOptions options = {}) {
    return detail::Parser(input, registry, options).run();
}

inline ParseResult parse(std::string_view input) { return parse(input, default_registry()); }

/// The diagnostics `parse` would report, without keeping the tree.
inline std::vector<Diagnostic> validate(std::string_view input, const Registry& registry,
                                        ParseOptions options = {}) {
    return parse(input, registry, options).diagnostics();
}

namespace detail {

inline void render_into(std::string& out, const AstNode& node);

inline void render_braced(std::string& out, const AstNode& node) {
    if (node.is<ast::Curly>()) {
        render_into(out, node);
        return;
    }
    out += '{';
    render_into(out, node);
    out += '}';
}

inline void render_list(std::string& out, const NodeList& xs) {
    for (const auto& x : xs) render_into(out, x);
}

inline void render_into(std::string& out, const AstNode& node) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ast::Literal>) {
                append_tex(out, n.token);
            } else if constexpr (std::is_same_v<T, ast::Fun1>) {
                append_tex(out, "\\" + n.command);
                render_braced(out, *n.arg);
            } else if constexpr (std::is_same_v<T, ast::Fun1Opt>) {
                append_tex(out, "\\" + n.command);
                out += '[';
                render_into(out, *n.option);
                out += ']';
                render_braced(out, *n.arg);
            } else if constexpr (std::is_same_v<T, ast::Fun2>) {
                append_tex(out, "\\" + n.command);
                render_braced(out, *n.arg1);
                render_braced(out, *n.arg2);
            } else if constexpr (std::is_same_v<T, ast::Curly>) {
                out += '{';
                render_list(out, n.children);
                out += '}';
            } else if constexpr (std::is_same_v<T, ast::Sequence>) {
                render_list(out, n.children);
            } else if constexpr (std::is_same_v<T, ast::Sub>) {
                render_into(out, *n.base);
                out += '_';
                render_braced(out, *n.sub);
            } else if constexpr (std::is_same_v<T, ast::Sup>) {
                render_into(out, *n.base);
                out += '^';
                render_braced(out, *n.sup);
            } else if constexpr (std::is_same_v<T, ast::SubSup>) {
                render_into(out, *n.base);
                out += '_';
                render_braced(out, *n.sub);
                out += '^';
                render_braced(out, *n.sup);
            } else if constexpr (std::is_same_v<T, ast::Infix>) {
                render_into(out, *n.left);
                append_tex(out, "\\" + n.command);
                render_into(out, *n.right);
            } else if constexpr (std::is_same_v<T, ast::Matrix>) {
                append_tex(out, "\\begin{" + n.env + "}");
                if (!n.colspec.empty()) out += "{" + n.colspec + "}";
                for (std::size_t r = 0; r < n.rows.size(); ++r) {
                    if (r) out += "\\\\";
                    for (std::size_t c = 0; c < n.rows[r].size(); ++c) {
                        if (c) out += '&';
                        render_into(out, n.rows[r][c]);
                    }
                }
                append_tex(out, "\\end{" + n.env + "}");
            } else if constexpr (std::is_same_v<T, ast::Delimited>) {
                append_tex(out, "\\left");
                append_tex(out, n.open);
                render_into(out, *n.body);
                append_tex(out, "\\right");
                append_tex(out, n.close);
            } else if constexpr (std::is_same_v<T, ast::BigDelim>) {
                append_tex(out, "\\" + n.command);
                append_tex(out, n.token);
            } else if constexpr (std::is_same_v<T, ast::Text>) {
                out += n.content;
            } else if constexpr (std::is_same_v<T, ast::Declarative>) {
                append_tex(out, "\\" + n.command);
                render_into(out, *n.body);
            } else if constexpr (std::is_same_v<T, ast::IntentWrap>) {
                append_tex(out, "\\intent");
                render_braced(out, *n.body);
                out += "{intent='" + n.intent_raw + "'";
                if (!n.arg_map.empty()) {
                    out += ",arg='";
                    for (std::size_t i = 0; i < n.arg_map.size(); ++i) {
                        if (i) out += ',';
                        out += n.arg_map[i].first + "=" + n.arg_map[i].second;
                    }
                    out += "'";
                }
                out += '}';
            }
        },
        node.value);
}

}  // namespace detail

/// Normalized TeX: every argument and script braced, whitespace collapsed to
/// the minimum needed to separate command words from letters.
inline std::string render_tex(const AstNode& node) {
    std::string out;
    detail::render_into(out, node);
    return out;
}

}  // namespace texmath
