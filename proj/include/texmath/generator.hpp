#pragma once

// Presentation MathML generation: a visitor over the AST that dispatches
// command nodes on their registry translation function.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "texmath/ast.hpp"
#include "texmath/detail/util.hpp"
#include "texmath/intent.hpp"
#include "texmath/mathml.hpp"
#include "texmath/parser.hpp"
#include "texmath/registry.hpp"
#include "texmath/translation.hpp"

namespace texmath {

enum class Display { inline_, block };

struct GenOptions {
    Display display = Display::inline_;
    bool wrap_semantics = false;
    bool annotate_tex = false;  // implies wrap_semantics

    bool operator==(const GenOptions&) const = default;
};

inline std::string_view to_string(Display d) { return d == Display::block ? "block" : "inline"; }

inline constexpr std::string_view function_application = "\xE2\x81\xA1";  // U+2061

namespace detail {

inline bool has_param(const CommandSpec& s, std::string_view p) {
    for (const auto& x : s.params)
        if (x == p) return true;
    return false;
}

/// Text of a hex-codepoint param list ("006D 006F 0064" -> "mod").
inline std::string codepoints_text(const std::vector<std::string>& params) {
    std::string out;
    for (const auto& p : params)
        if (is_hex_field(p))
            if (auto cp = parse_hex_codepoint(p)) append_utf8(out, *cp);
    return out;
}

inline std::string first_codepoint(const CommandSpec& s) {
    if (s.params.empty()) return {};
    if (auto cp = parse_hex_codepoint(s.params[0])) return codepoint_to_utf8(*cp);
    return {};
}

inline void apply_variant(MathMLNode& n, const std::string& variant) {
    if ((n.element == "mi" || n.element == "mn") && !n.attr("mathvariant")) n.set_attr("mathvariant", variant);
    for (auto& c : n.children) apply_variant(c, variant);
}

inline void collect_text(const MathMLNode& n, std::string& out) {
    if (n.is_token()) out += n.text;
    for (const auto& c : n.children) collect_text(c, out);
}

inline MathMLNode stretchy_fence(std::string text) {
    auto mo = MathMLNode::token("mo", std::move(text));
    mo.set_attr("fence", "true").set_attr("stretchy", "true");
    return mo;
}

class Generator {
public:
    explicit Generator(const Registry& reg) : reg_(reg) {}

    /// One node for a group: the single child itself, or an mrow.
    static MathMLNode group(std::vector<MathMLNode> xs) {
        if (xs.size() == 1) return std::move(xs.front());
        return MathMLNode("mrow", std::move(xs));
    }

    MathMLNode one(const AstNode& n) { return group(translate(n)); }

    std::vector<MathMLNode> translate(const AstNode& node) {
        return std::visit([&](const auto& n) { return visit(n); }, node.value);
    }

private:
    const Registry& reg_;

    const CommandSpec& spec(const std::string& name) const {
        const CommandSpec* s = reg_.lookup(name);
        if (!s) throw Error(make_error("E_INTERNAL", "command \\" + name + " missing from registry", {}));
        return *s;
    }

    static bool is_digit_literal(const AstNode& n) {
        auto l = n.as<ast::Literal>();
        return l && l->token.size() == 1 && is_ascii_digit(l->token[0]);
    }
    static bool is_dot_literal(const AstNode& n) {
        auto l = n.as<ast::Literal>();
        return l && l->token == ".";
    }
    static const AstNode* script_base(const AstNode& n) {
        if (auto s = n.as<ast::Sub>()) return &*s->base;
        if (auto s = n.as<ast::Sup>()) return &*s->base;
        if (auto s = n.as<ast::SubSup>()) return &*s->base;
        return nullptr;
    }

    /// Sibling list with digit runs merged into a single mn. A run that
    /// ends at a scripted digit (`10^m`) becomes that script's base.
    std::vector<MathMLNode> translate_list(const NodeList& xs) {
        std::vector<MathMLNode> out;
        for (std::size_t i = 0; i < xs.size();) {
            if (!is_digit_literal(xs[i])) {
                auto part = translate(xs[i]);
                for (auto& p : part) out.push_back(std::move(p));
                ++i;
                continue;
            }
            std::string run;
            std::size_t j = i;
            while (j < xs.size()) {
                if (is_digit_literal(xs[j])) {
                    run += xs[j].as<ast::Literal>()->token;
                    ++j;
                } else if (is_dot_literal(xs[j]) && j + 1 < xs.size() && is_digit_literal(xs[j + 1]) &&
                           !run.empty()) {
                    run += '.';
                    ++j;
                } else {
                    break;
                }
            }
            const AstNode* base = j < xs.size() ? script_base(xs[j]) : nullptr;
            if (base && is_digit_literal(*base)) {
                auto scripted = translate(xs[j]);
                scripted.front().children.front().text = run + base->as<ast::Literal>()->token;
                for (auto& p : scripted) out.push_back(std::move(p));
                i = j + 1;
            } else {
                out.push_back(MathMLNode::token("mn", run));
                i = j;
            }
        }
        return out;
    }

    std::vector<MathMLNode> literal(const std::string& token) {
        if (token.size() == 1 && is_ascii_alpha(token[0])) return {MathMLNode::token("mi", token)};
        if (token.size() == 1 && is_ascii_digit(token[0])) return {MathMLNode::token("mn", token)};
        if (token.size() > 1 && token[0] == '\\') return command_literal(spec(token.substr(1)));
        const OperatorSpec* op = reg_.find_operator(token);
        if (!op) throw Error(make_error("E_INTERNAL", "operator '" + token + "' missing from registry", {}));
        auto n = MathMLNode::token(std::string(to_string(op->element)), op->text());
        for (const auto& [k, v] : op->attributes) n.set_attr(k, v);
        return {std::move(n)};
    }

    static std::string namedfn_text(const CommandSpec& s) {
        for (const auto& p : s.params)
            if (p != "limits") return p;
        return s.name;
    }

    std::vector<MathMLNode> command_literal(const CommandSpec& s) {
        switch (s.fn) {
            case TranslationFn::identifier: {
                auto mi = MathMLNode::token("mi", first_codepoint(s));
                if (s.params.size() > 1) mi.set_attr("mathvariant", s.params[1]);
                return {std::move(mi)};
            }
            case TranslationFn::operator_:
            case TranslationFn::bigop:
            case TranslationFn::delimiter:
                return {MathMLNode::token("mo", s.fn == TranslationFn::operator_ ? codepoints_text(s.params)
                                                                                 : first_codepoint(s))};
            case TranslationFn::namedfn:
                return {MathMLNode::token("mi", namedfn_text(s)),
                        MathMLNode::token("mo", std::string(function_application))};
            case TranslationFn::space: {
                MathMLNode sp("mspace");
                sp.set_attr("width", s.params.at(0));
                return {std::move(sp)};
            }
            default:
                break;
        }
        throw Error(make_error("E_INTERNAL", "\\" + s.name + " is not a token command", {}));
    }

    std::optional<std::string> delimiter_text(const std::string& token) {
        if (token == ".") return std::nullopt;
        if (token.size() > 1 && token[0] == '\\') return first_codepoint(spec(token.substr(1)));
        if (const OperatorSpec* op = reg_.find_operator(token)) return op->text();
        return token;
    }

    static std::optional<std::string> fence_param_text(const std::string& p) {
        if (p == ".") return std::nullopt;
        if (is_hex_field(p)) return codepoint_to_utf8(*parse_hex_codepoint(p));
        return p;
    }

    /// Splits params into leading fence tokens and key=value attributes.
    static void split_params(const CommandSpec& s, std::vector<std::string>& fences,
                             std::vector<std::pair<std::string, std::string>>& attrs) {
        for (const auto& p : s.params) {
            if (auto kv = split_key_value(p)) attrs.push_back(*kv);
            else fences.push_back(p);
        }
    }

    static MathMLNode fenced(const std::vector<std::string>& fences, std::vector<MathMLNode> inner) {
        if (fences.size() < 2) return group(std::move(inner));
        std::vector<MathMLNode> xs;
        if (auto o = fence_param_text(fences[0])) xs.push_back(stretchy_fence(*o));
        for (auto& x : inner) xs.push_back(std::move(x));
        if (auto c = fence_param_text(fences[1])) xs.push_back(stretchy_fence(*c));
        return group(std::move(xs));
    }

    MathMLNode fraction(const CommandSpec& s, MathMLNode num, MathMLNode den) {
        std::vector<std::string> fences;
        std::vector<std::pair<std::string, std::string>> attrs;
        split_params(s, fences, attrs);
        MathMLNode frac("mfrac", {std::move(num), std::move(den)});
        std::optional<std::string> display;
        for (const auto& [k, v] : attrs) {
            if (k == "displaystyle") display = v;
            else frac.set_attr(k, v);
        }
        MathMLNode out = fenced(fences, {std::move(frac)});
        if (display) {
            MathMLNode style("mstyle", {std::move(out)});
            style.set_attr("displaystyle", *display);
            style.set_attr("scriptlevel", "0");
            return style;
        }
        return out;
    }

    // --- visitors -------------------------------------------------------

    std::vector<MathMLNode> visit(const ast::Literal& n) { return literal(n.token); }

    std::vector<MathMLNode> visit(const ast::Curly& n) { return {group(translate_list(n.children))}; }

    std::vector<MathMLNode> visit(const ast::Sequence& n) { return translate_list(n.children); }

    std::vector<MathMLNode> visit(const ast::Text& n) { return {MathMLNode::token("mtext", n.content)}; }

    std::vector<MathMLNode> visit(const ast::Fun1& n) {
        const CommandSpec& s = spec(n.command);
        switch (s.fn) {
            case TranslationFn::accent: {
                auto mo = MathMLNode::token("mo", first_codepoint(s));
                if (has_param(s, "stretchy")) mo.set_attr("stretchy", "true");
                MathMLNode over("mover", {one(*n.arg), std::move(mo)});
                over.set_attr("accent", "true");
                return {std::move(over)};
            }
            case TranslationFn::underaccent: {
                auto mo = MathMLNode::token("mo", first_codepoint(s));
                if (has_param(s, "stretchy")) mo.set_attr("stretchy", "true");
                MathMLNode under("munder", {one(*n.arg), std::move(mo)});
                under.set_attr("accentunder", "true");
                return {std::move(under)};
            }
            case TranslationFn::sqrt:
                return {MathMLNode("msqrt", {one(*n.arg)})};
            case TranslationFn::style: {
                auto xs = translate(*n.arg);
                for (auto& x : xs) apply_variant(x, s.params.at(0));
                return {group(std::move(xs))};
            }
            case TranslationFn::text: {
                auto mt = MathMLNode::token("mtext", n.arg->as<ast::Text>()->content);
                if (!s.params.empty()) mt.set_attr("mathvariant", s.params[0]);
                return {std::move(mt)};
            }
            case TranslationFn::opname: {
                std::string name;
                for (const auto& x : translate(*n.arg)) collect_text(x, name);
                return {MathMLNode::token("mi", name), MathMLNode::token("mo", std::string(function_application))};
            }
            case TranslationFn::phantom: {
                MathMLNode ph("mphantom", {one(*n.arg)});
                if (s.params.empty()) return {std::move(ph)};
                MathMLNode pad("mpadded", {std::move(ph)});
                for (const auto& p : s.params)
                    if (auto kv = split_key_value(p)) pad.set_attr(kv->first, kv->second);
                return {std::move(pad)};
            }
            case TranslationFn::enclose: {
                MathMLNode en("menclose", {one(*n.arg)});
                en.set_attr("notation", s.params.at(0));
                return {std::move(en)};
            }
            case TranslationFn::chem: {
                // Unreachable for parser output; kept total for hand-built trees.
                std::string raw;
                if (auto t = n.arg->as<ast::Text>()) raw = t->content;
                return {MathMLNode::token("mtext", raw)};
            }
            default:
                break;
        }
        throw Error(make_error("E_INTERNAL", "\\" + n.command + " is not a one-argument command", {}));
    }

    std::vector<MathMLNode> visit(const ast::Fun1Opt& n) {
        return {MathMLNode("mroot", {one(*n.arg), one(*n.option)})};
    }

    std::vector<MathMLNode> visit(const ast::Fun2& n) {
        const CommandSpec& s = spec(n.command);
        if (s.fn == TranslationFn::fraction) return {fraction(s, one(*n.arg1), one(*n.arg2))};
        if (s.fn == TranslationFn::overunder) {
            bool under = has_param(s, "under");
            MathMLNode m(under ? "munder" : "mover", {one(*n.arg2), one(*n.arg1)});
            return {std::move(m)};
        }
        throw Error(make_error("E_INTERNAL", "\\" + n.command + " is not a two-argument command", {}));
    }

    std::vector<MathMLNode> visit(const ast::Infix& n) {
        return {fraction(spec(n.command), one(*n.left), one(*n.right))};
    }

    std::vector<MathMLNode> scripted(const AstNode& base, const AstNode* sub, const AstNode* sup) {
        bool limits = false;
        bool function = false;
        if (auto l = base.as<ast::Literal>(); l && l->token.size() > 1 && l->token[0] == '\\') {
            const CommandSpec& s = spec(l->token.substr(1));
            if (s.fn == TranslationFn::bigop || s.fn == TranslationFn::namedfn) limits = has_param(s, "limits");
            function = s.fn == TranslationFn::namedfn;
        } else if (auto f = base.as<ast::Fun1>()) {
            limits = has_param(spec(f->command), "limits");
        }
        auto xs = translate(base);
        std::optional<MathMLNode> apply;
        if (function) {
            apply = std::move(xs.back());
            xs.pop_back();
        }
        MathMLNode b = group(std::move(xs));
        MathMLNode out;
        if (sub && sup) out = MathMLNode(limits ? "munderover" : "msubsup", {std::move(b), one(*sub), one(*sup)});
        else if (sub) out = MathMLNode(limits ? "munder" : "msub", {std::move(b), one(*sub)});
        else out = MathMLNode(limits ? "mover" : "msup", {std::move(b), one(*sup)});
        std::vector<MathMLNode> result{std::move(out)};
        if (apply) result.push_back(std::move(*apply));
        return result;
    }

    std::vector<MathMLNode> visit(const ast::Sub& n) { return scripted(*n.base, &*n.sub, nullptr); }
    std::vector<MathMLNode> visit(const ast::Sup& n) { return scripted(*n.base, nullptr, &*n.sup); }
    std::vector<MathMLNode> visit(const ast::SubSup& n) { return scripted(*n.base, &*n.sub, &*n.sup); }

    std::vector<MathMLNode> visit(const ast::Matrix& n) {
        const CommandSpec& s = spec(n.env);
        std::vector<std::string> fences;
        std::vector<std::pair<std::string, std::string>> attrs;
        split_params(s, fences, attrs);
        MathMLNode table("mtable");
        for (const auto& [k, v] : attrs) table.set_attr(k, v);
        if (!n.colspec.empty()) {
            std::string align;
            for (char c : n.colspec) {
                if (c == '|') continue;
                if (!align.empty()) align += ' ';
                align += c == 'l' ? "left" : c == 'r' ? "right" : "center";
            }
            table.set_attr("columnalign", align);
        }
        for (const auto& row : n.rows) {
            MathMLNode tr("mtr");
            for (const auto& cell : row) tr.children.push_back(MathMLNode("mtd", translate(cell)));
            table.children.push_back(std::move(tr));
        }
        return {fenced(fences, {std::move(table)})};
    }

    std::vector<MathMLNode> visit(const ast::Delimited& n) {
        std::vector<MathMLNode> xs;
        if (auto o = delimiter_text(n.open)) xs.push_back(stretchy_fence(*o));
        for (auto& x : translate(*n.body)) xs.push_back(std::move(x));
        if (auto c = delimiter_text(n.close)) xs.push_back(stretchy_fence(*c));
        return {MathMLNode("mrow", std::move(xs))};
    }

    std::vector<MathMLNode> visit(const ast::BigDelim& n) {
        const CommandSpec& s = spec(n.command);
        auto mo = MathMLNode::token("mo", delimiter_text(n.token).value_or(""));
        mo.set_attr("minsize", s.params.at(0)).set_attr("maxsize", s.params.at(0));
        return {std::move(mo)};
    }

    std::vector<MathMLNode> visit(const ast::Declarative& n) {
        const CommandSpec& s = spec(n.command);
        auto xs = translate(*n.body);
        MathMLNode::Attributes style_attrs;
        for (const auto& p : s.params) {
            auto kv = split_key_value(p);
            if (!kv) continue;
            if (kv->first == "mathvariant") {
                for (auto& x : xs) apply_variant(x, kv->second);
            } else {
                style_attrs.push_back(*kv);
            }
        }
        if (style_attrs.empty()) return xs;
        MathMLNode st("mstyle", std::move(xs));
        st.attributes = std::move(style_attrs);
        return {std::move(st)};
    }

    std::vector<MathMLNode> visit(const ast::IntentWrap& n) { return {apply_intent(n, one(*n.body), n.arg_map)}; }
};

}  // namespace detail

/// Translates one AST node to its MathML siblings.
inline std::vector<MathMLNode> translate_node(const AstNode& node, const Registry& registry) {
    return detail::Generator(registry).translate(node);
}

/// Generates the `math` element for a parser-produced AST. Throws `Error`
/// only for intent reference failures (E_INTENT_UNBOUND_REF,
/// E_INTENT_AMBIGUOUS_REF) or a tree that was not built against `registry`.
inline MathMLNode to_mathml(const AstNode& ast, const Registry& registry, const GenOptions& options = {}) {
    detail::Generator gen(registry);
    std::vector<MathMLNode> body{gen.one(ast)};
    if (options.wrap_semantics || options.annotate_tex) {
        MathMLNode sem("semantics", std::move(body));
        if (options.annotate_tex) {
            auto ann = MathMLNode::token("annotation", render_tex(ast));
            ann.set_attr("encoding", "application/x-tex");
            sem.children.push_back(std::move(ann));
        }
        body = {std::move(sem)};
    }
    MathMLNode math("math", std::move(body));
    math.attributes.insert(math.attributes.begin(), {"display", std::string(to_string(options.display))});
    return math;
}

}  // namespace texmath
