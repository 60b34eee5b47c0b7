#pragma once

// One realistic example formula per registry command.

#include <string>
#include <vector>

#include "texmath/detail/util.hpp"
#include "texmath/registry.hpp"
#include "texmath/translation.hpp"

namespace texmath {

struct CoverageCase {
    std::string command;
    std::string input;
    bool chem = false;
};

namespace detail {

inline std::string command_token(const CommandSpec& s) {
    std::string t = "\\" + s.name;
    return t;
}

inline std::string coverage_input(const CommandSpec& s) {
    const std::string c = command_token(s);
    const bool word = !s.name.empty() && is_ascii_alpha(s.name[0]);
    const std::string sp = word ? " " : "";
    switch (s.fn) {
        case TranslationFn::identifier:
            return "2" + c + sp + "+ x";
        case TranslationFn::operator_:
            return "a " + c + sp + " b";
        case TranslationFn::bigop:
            return c + "_{i=1}^{n} x_i";
        case TranslationFn::namedfn:
            return c + "_{n} x";
        case TranslationFn::delimiter:
            return c + sp + "x" + c;
        case TranslationFn::space:
            return "a" + c + sp + "b";
        case TranslationFn::fence:
            return s.params.at(0) == "left" ? "\\left( \\frac{a}{b} \\right." : "\\left. x \\right|_{0}";
        case TranslationFn::bigdelim:
            return c + "( x " + c + ")";
        case TranslationFn::infix:
            return "{a+1 " + c + " b}";
        case TranslationFn::declstyle:
            return "{" + c + " x^2 + y}";
        case TranslationFn::matrix:
            if (s.arity == 1) return "\\begin{" + s.name + "}{cc} a & b \\\\ c & d \\end{" + s.name + "}";
            return "\\begin{" + s.name + "} a & b \\\\ c & d \\end{" + s.name + "}";
        case TranslationFn::accent:
        case TranslationFn::underaccent:
            return c + "{x}";
        case TranslationFn::sqrt:
            return c + "{x^2+1} + " + c + "[3]{y}";
        case TranslationFn::style:
            return c + "{Ax}";
        case TranslationFn::text:
            return c + "{if } x > 0";
        case TranslationFn::opname:
            return c + "{sgn} x";
        case TranslationFn::phantom:
            return "a" + c + "{b}c";
        case TranslationFn::enclose:
            return c + "{x+y}";
        case TranslationFn::chem:
            return s.name == "pu" ? c + "{1.2e3 m/s}" : c + "{2H2 + O2 -> 2H2O}";
        case TranslationFn::fraction:
            return c + "{a}{b+1}";
        case TranslationFn::overunder:
            return c + "{!}{=}";
        case TranslationFn::intent:
            return c + "{(x,y)}{intent='open-interval($x,$y)'}";
    }
    return c;
}

}  // namespace detail

/// One case per command, in registry (name) order.
inline std::vector<CoverageCase> coverage_corpus(const Registry& reg) {
    std::vector<CoverageCase> out;
    for (const auto& [name, spec] : reg.commands()) {
        bool chem = spec.category == Category::chem_only;
        std::string input = detail::coverage_input(spec);
        if (chem && spec.fn != TranslationFn::chem) input = "\\mathrm{A}" + detail::command_token(spec) + " \\mathrm{B}";
        out.push_back({name, std::move(input), chem});
    }
    return out;
}

}  // namespace texmath
