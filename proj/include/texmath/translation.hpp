#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace texmath {

/// Generator functions a registry entry can dispatch to. The parser also
/// reads these to decide how a command consumes its arguments, so adding
/// one means teaching both `parse` and `to_mathml` about it; the compiler
/// flags every switch that misses a new enumerator.
enum class TranslationFn {
    identifier,   // mi <codepoint> [mathvariant]
    operator_,    // mo <codepoint...>
    bigop,        // mo; scripts become under/over when params say "limits"
    namedfn,      // mi "sin" + U+2061
    delimiter,    // mo; also legal after \left, \right, \big
    space,        // mspace width=<param>
    fence,        // \left / \right
    bigdelim,     // \big( and friends
    infix,        // \over, \atop, \choose
    declstyle,    // \displaystyle, \rm: applies to the rest of the group
    matrix,       // environments
    accent,       // mover accent=true
    underaccent,  // munder accentunder=true
    sqrt,         // msqrt / mroot
    style,        // \mathbf{...}: mathvariant on tokens
    text,         // mtext
    opname,       // \operatorname{...}
    phantom,      // mphantom, optionally inside mpadded
    enclose,      // menclose notation=<param>
    chem,         // \ce, \pu: expanded by the mhchem preprocessor
    fraction,     // mfrac, with optional fences and displaystyle
    overunder,    // \overset, \underset, \stackrel
    intent,       // \intent{body}{intent='...', arg='...'}
};

struct TranslationFnInfo {
    TranslationFn fn;
    std::string_view name;
    unsigned arity_mask;  // bit n set: arity n accepted

    bool accepts_arity(int arity) const {
        return arity >= 0 && arity < 8 && (arity_mask & (1u << arity)) != 0;
    }
};

inline constexpr unsigned arity0 = 1u << 0;
inline constexpr unsigned arity1 = 1u << 1;
inline constexpr unsigned arity2 = 1u << 2;

inline constexpr std::array<TranslationFnInfo, 23> translation_fns{{
    {TranslationFn::identifier, "identifier", arity0},
    {TranslationFn::operator_, "operator", arity0},
    {TranslationFn::bigop, "bigop", arity0},
    {TranslationFn::namedfn, "namedfn", arity0},
    {TranslationFn::delimiter, "delimiter", arity0},
    {TranslationFn::space, "space", arity0},
    {TranslationFn::fence, "fence", arity0},
    {TranslationFn::bigdelim, "bigdelim", arity0},
    {TranslationFn::infix, "infix", arity0},
    {TranslationFn::declstyle, "declstyle", arity0},
    {TranslationFn::matrix, "matrix", arity0 | arity1},
    {TranslationFn::accent, "accent", arity1},
    {TranslationFn::underaccent, "underaccent", arity1},
    {TranslationFn::sqrt, "sqrt", arity1},
    {TranslationFn::style, "style", arity1},
    {TranslationFn::text, "text", arity1},
    {TranslationFn::opname, "opname", arity1},
    {TranslationFn::phantom, "phantom", arity1},
    {TranslationFn::enclose, "enclose", arity1},
    {TranslationFn::chem, "chem", arity1},
    {TranslationFn::fraction, "fraction", arity2},
    {TranslationFn::overunder, "overunder", arity2},
    {TranslationFn::intent, "intent", arity2},
}};

inline std::optional<TranslationFnInfo> find_translation_fn(std::string_view name) {
    for (const auto& info : translation_fns)
        if (info.name == name) return info;
    return std::nullopt;
}

inline std::string_view to_string(TranslationFn fn) {
    for (const auto& info : translation_fns)
        if (info.fn == fn) return info.name;
    return "?";
}

/// Zero-argument commands that behave like a single token wherever an
/// argument or script is expected (`\frac\alpha\beta`, `x^\infty`).
inline bool is_token_like(TranslationFn fn) {
    switch (fn) {
        case TranslationFn::identifier:
        case TranslationFn::operator_:
        case TranslationFn::bigop:
        case TranslationFn::namedfn:
        case TranslationFn::delimiter:
        case TranslationFn::space:
            return true;
        default:
            return false;
    }
}

}  // namespace texmath
