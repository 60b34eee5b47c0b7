#pragma once

#include <string>
#include <utility>
#include <vector>

#include "texmath/ast.hpp"
#include "texmath/diagnostic.hpp"
#include "texmath/intent_expr.hpp"
#include "texmath/mathml.hpp"

namespace texmath {

/// (formula identifier, intent identifier) pairs from `arg='a=x,b=y'`.
using ArgBinding = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline void find_ident(MathMLNode& n, const std::string& ident, bool is_root, std::vector<MathMLNode*>& out) {
    if (!is_root && n.attr("intent")) return;  // a nested annotation owns its subtree
    if ((n.element == "mi" || n.element == "mn") && n.text == ident) out.push_back(&n);
    for (auto& c : n.children) find_ident(c, ident, false, out);
}

}  // namespace detail

/// Attaches `intent` to the generated subtree of an `\intent` body and
/// `arg` to the identifiers its references name. A token root is wrapped in
/// an mrow first. Throws `Error` (E_INTENT_UNBOUND_REF,
/// E_INTENT_AMBIGUOUS_REF) spanning the macro.
inline MathMLNode apply_intent(const ast::IntentWrap& node, MathMLNode mathml, const ArgBinding& binding) {
    IntentExpr expr = parse_intent(node.intent_raw);
    if (mathml.is_token()) mathml = MathMLNode("mrow", {std::move(mathml)});
    mathml.set_attr("intent", node.intent_raw);

    for (const auto& name : intent_references(expr)) {
        std::string ident = name;
        bool bound = false;
        for (const auto& [formula, intent_name] : binding) {
            if (intent_name == name) {
                ident = formula;
                bound = true;
                break;
            }
        }
        std::vector<MathMLNode*> hits;
        detail::find_ident(mathml, ident, true, hits);
        if (hits.empty())
            throw Error(make_error(codes::intent_unbound_ref,
                                   "$" + name + " does not match any identifier '" + ident + "' in the body", node.span));
        if (hits.size() > 1 && !bound)
            throw Error(make_error(codes::intent_ambiguous_ref,
                                   "$" + name + " matches " + std::to_string(hits.size()) + " identifiers; add arg='" +
                                       ident + "=" + name + "' to choose",
                                   node.span));
        hits.front()->set_attr("arg", name);
    }
    return mathml;
}

}  // namespace texmath
