#pragma once

// Chemistry preprocessor: rewrites \ce{...} and \pu{...} into plain TeX that
// the parser accepts (with chem-only commands enabled).
//
// \ce subset
//   elements      H, Cl, SO (consecutive elements share one \mathrm)
//   counts        H2, (OH)2, X_{12}
//   charges       ^2-, ^{3+}, ^+, trailing + or - (Na+, Cl-, Na+(aq))
//   coefficients  2H2O, 1/2O2, 0.5H2 at the start of a formula
//   isotopes      ^{227}_{90}Th, ^14C, ^{1}_{0}n
//   states        (s) (l) (g) (aq) (cr)
//   bonds         - = # between atoms (C=O); alone as a word
//   adducts       * or . (CuSO4*5H2O)
//   arrows        -> <- <=> <->, as separate words
//   plus          + as a separate word
//   groups        ( ) [ ]
//
// \pu subset
//   number        -?d+(.d+)?([eE][+-]?d+)?
//   units         letters with an optional exponent (m2, s-1, m^2), joined
//                 by . or * (product), / (quotient) or space
//
// Expansions are wrapped in braces so that a following script cannot
// attach to their last atom.

#include <algorithm>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "texmath/detail/util.hpp"
#include "texmath/diagnostic.hpp"

namespace texmath {

struct ChemToken {
    enum class Kind {
        element,
        count,
        charge,
        arrow,
        plus,
        state,
        bond,
        stoich_coeff,
        isotope,
        text,
        group_open,
        group_close,
        adduct,
        separator,
    };
    Kind kind;
    std::string payload;
    Span span;  // within the \ce body

    bool operator==(const ChemToken& o) const { return kind == o.kind && payload == o.payload; }
};

namespace detail {

[[noreturn]] inline void chem_fail(std::string msg, std::size_t at, std::size_t len = 1) {
    throw Error(make_error(codes::chem_syntax, std::move(msg), {at, at + len}));
}

inline bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
inline bool is_lower(char c) { return c >= 'a' && c <= 'z'; }

class CeLexer {
public:
    explicit CeLexer(std::string_view body) : s_(body) {}

    std::vector<ChemToken> run() {
        while (i_ < s_.size()) {
            char c = s_[i_];
            if (is_ascii_space(c)) {
                ++i_;
                if (!out_.empty() && out_.back().kind != ChemToken::Kind::separator)
                    emit(ChemToken::Kind::separator, " ", i_ - 1);
                word_start_ = true;
                continue;
            }
            if (word_start_ && word()) continue;
            word_start_ = false;
            formula_part();
        }
        if (!out_.empty() && out_.back().kind == ChemToken::Kind::separator) out_.pop_back();
        if (depth_ != 0) chem_fail("unbalanced group", open_at_);
        return out_;
    }

private:
    std::string_view s_;
    std::size_t i_ = 0;
    bool word_start_ = true;
    int depth_ = 0;
    std::size_t open_at_ = 0;
    std::vector<ChemToken> out_;

    void emit(ChemToken::Kind k, std::string payload, std::size_t begin) {
        out_.push_back({k, std::move(payload), {begin, std::max(i_, begin + 1)}});
    }

    bool ends_word(std::size_t j) const { return j >= s_.size() || is_ascii_space(s_[j]); }
    bool starts(std::string_view p) const { return s_.substr(i_, p.size()) == p; }

    static constexpr std::string_view states_[] = {"(s)", "(l)", "(g)", "(aq)", "(cr)"};

    bool state_at(std::size_t j) const {
        for (auto st : states_)
            if (s_.substr(j, st.size()) == st) return true;
        return false;
    }

    void check_char(char c) const {
        if (c == '$') chem_fail("math escapes inside \\ce are not supported", i_);
        if (c == '\\') chem_fail("commands inside \\ce are not supported", i_);
    }

    /// Whole-word constructs at the start of a word. Returns true if one matched.
    bool word() {
        auto b = i_;
        static constexpr std::string_view arrows[] = {"<=>", "<->", "->", "<-"};
        for (auto tok : arrows) {
            if (starts(tok) && ends_word(i_ + tok.size())) {
                i_ += tok.size();
                emit(ChemToken::Kind::arrow, std::string(tok), b);
                return true;
            }
        }
        char c = s_[i_];
        if (c == '+' && ends_word(i_ + 1)) {
            ++i_;
            emit(ChemToken::Kind::plus, "+", b);
            return true;
        }
        if ((c == '-' || c == '=' || c == '#') && ends_word(i_ + 1)) {
            ++i_;
            emit(ChemToken::Kind::bond, std::string(1, c), b);
            return true;
        }
        if (is_ascii_digit(c)) {
            coefficient();
            if (i_ < s_.size() && s_[i_] == '^') isotope();
            word_start_ = false;
            return true;
        }
        if (c == '^') {
            isotope();
            word_start_ = false;
            return true;
        }
        return false;
    }

    std::string digits() {
        std::string d;
        while (i_ < s_.size() && is_ascii_digit(s_[i_])) d += s_[i_++];
        return d;
    }

    void coefficient() {
        auto b = i_;
        std::string v = digits();
        if (i_ + 1 < s_.size() && (s_[i_] == '/' || s_[i_] == '.') && is_ascii_digit(s_[i_ + 1])) {
            v += s_[i_++];
            v += digits();
        }
        emit(ChemToken::Kind::stoich_coeff, v, b);
    }

    /// `^{...}` / `_{...}` / `^123` / `_4`; returns the script text.
    std::string script_arg(bool allow_sign) {
        auto b = i_;
        std::string v;
        if (i_ < s_.size() && s_[i_] == '{') {
            auto close = s_.find('}', i_);
            if (close == std::string_view::npos) chem_fail("unclosed '{'", i_);
            v = std::string(s_.substr(i_ + 1, close - i_ - 1));
            i_ = close + 1;
        } else {
            v = digits();
            if (allow_sign)
                while (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-')) v += s_[i_++];
        }
        if (v.empty()) chem_fail("empty script", b == 0 ? 0 : b - 1);
        for (char c : v) {
            if (is_ascii_digit(c)) continue;
            if (allow_sign && (c == '+' || c == '-')) continue;
            chem_fail("script may only contain digits" + std::string(allow_sign ? " and a sign" : ""), b);
        }
        return v;
    }

    void isotope() {
        auto b = i_;
        ++i_;  // '^'
        std::string mass = script_arg(false);
        std::string payload = mass;
        if (i_ < s_.size() && s_[i_] == '_') {
            ++i_;
            payload += "," + script_arg(false);
        }
        if (i_ >= s_.size() || !is_ascii_alpha(s_[i_])) chem_fail("isotope must precede an element or particle", b);
        emit(ChemToken::Kind::isotope, payload, b);
    }

    bool after_atom() const {
        if (out_.empty()) return false;
        auto k = out_.back().kind;
        return k == ChemToken::Kind::element || k == ChemToken::Kind::count || k == ChemToken::Kind::group_close ||
               k == ChemToken::Kind::text || k == ChemToken::Kind::state;
    }

    void formula_part() {
        auto b = i_;
        char c = s_[i_];
        check_char(c);
        if (is_upper(c)) {
            ++i_;
            if (i_ < s_.size() && is_lower(s_[i_])) ++i_;
            emit(ChemToken::Kind::element, std::string(s_.substr(b, i_ - b)), b);
            return;
        }
        if (is_lower(c)) {
            while (i_ < s_.size() && is_lower(s_[i_])) ++i_;
            emit(ChemToken::Kind::text, std::string(s_.substr(b, i_ - b)), b);
            return;
        }
        if (is_ascii_digit(c)) {
            if (!after_atom()) chem_fail("count must follow an atom or group", b);
            emit(ChemToken::Kind::count, digits(), b);
            return;
        }
        if (c == '_') {
            if (!after_atom()) chem_fail("subscript must follow an atom or group", b);
            ++i_;
            emit(ChemToken::Kind::count, script_arg(false), b);
            return;
        }
        if (c == '^') {
            if (!after_atom()) chem_fail("charge must follow an atom or group", b);
            ++i_;
            std::string v = script_arg(true);
            emit(ChemToken::Kind::charge, v, b);
            return;
        }
        if (c == '(') {
            for (auto st : states_) {
                if (starts(st)) {
                    i_ += st.size();
                    emit(ChemToken::Kind::state, std::string(st.substr(1, st.size() - 2)), b);
                    return;
                }
            }
        }
        if (c == '(' || c == '[') {
            if (depth_++ == 0) open_at_ = i_;
            ++i_;
            emit(ChemToken::Kind::group_open, std::string(1, c), b);
            return;
        }
        if (c == ')' || c == ']') {
            if (--depth_ < 0) chem_fail("unbalanced group", b);
            ++i_;
            emit(ChemToken::Kind::group_close, std::string(1, c), b);
            return;
        }
        if ((c == '+' || c == '-') && after_atom()) {
            std::size_t j = i_;
            while (j < s_.size() && s_[j] == c) ++j;
            if (ends_word(j) || state_at(j)) {
                std::string v(s_.substr(i_, j - i_));
                i_ = j;
                emit(ChemToken::Kind::charge, v, b);
                return;
            }
        }
        if ((c == '-' || c == '=' || c == '#') && after_atom() && i_ + 1 < s_.size() &&
            (is_ascii_alpha(s_[i_ + 1]) || s_[i_ + 1] == '(' || s_[i_ + 1] == '[')) {
            ++i_;
            emit(ChemToken::Kind::bond, std::string(1, c), b);
            return;
        }
        if ((c == '*' || c == '.') && after_atom()) {
            ++i_;
            emit(ChemToken::Kind::adduct, std::string(1, c), b);
            if (i_ < s_.size() && is_ascii_digit(s_[i_])) coefficient();
            return;
        }
        if (static_cast<unsigned char>(c) >= 0x80) {
            auto len = utf8_sequence_length(s_, i_);
            chem_fail("unsupported character in \\ce", b, len == 0 ? 1 : len);
        }
        chem_fail(std::string("unexpected '") + c + "' in \\ce", b);
    }
};

inline std::string render_script(const std::string& v) { return "{" + v + "}"; }

inline std::string render_ce(const std::vector<ChemToken>& toks) {
    using K = ChemToken::Kind;
    std::string out;
    std::string upright;  // pending run of element/text glyphs
    auto flush = [&] {
        if (upright.empty()) return;
        out += "\\mathrm{" + upright + "}";
        upright.clear();
    };
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const auto& t = toks[i];
        if (t.kind == K::element || t.kind == K::text) {
            upright += t.payload;
            continue;
        }
        flush();
        switch (t.kind) {
            case K::count:
                out += "{}_" + render_script(t.payload);
                if (i + 1 < toks.size() && toks[i + 1].kind == K::charge) out += "^" + render_script(toks[++i].payload);
                break;
            case K::charge:
                out += "{}^" + render_script(t.payload);
                break;
            case K::isotope: {
                auto comma = t.payload.find(',');
                out += "{}^" + render_script(t.payload.substr(0, comma));
                if (comma != std::string::npos) out += "_" + render_script(t.payload.substr(comma + 1));
                break;
            }
            case K::stoich_coeff: {
                auto slash = t.payload.find('/');
                if (slash != std::string::npos)
                    out += "\\frac{" + t.payload.substr(0, slash) + "}{" + t.payload.substr(slash + 1) + "}";
                else
                    out += t.payload;
                if (i + 1 < toks.size() && toks[i + 1].kind != K::separator) out += "\\,";
                break;
            }
            case K::arrow:
                if (t.payload == "->") out += "\\longrightarrow ";
                else if (t.payload == "<-") out += "\\longleftarrow ";
                else if (t.payload == "<=>") out += "\\longrightleftharpoons ";
                else out += "\\longleftrightarrow ";
                break;
            case K::plus:
                out += "+";
                break;
            case K::bond:
                out += t.payload == "-" ? "\\sbond " : t.payload == "=" ? "\\dbond " : "\\tbond ";
                break;
            case K::state:
                out += "(\\mathrm{" + t.payload + "})";
                break;
            case K::group_open:
            case K::group_close:
                out += t.payload;
                break;
            case K::adduct:
                out += "\\cdot ";
                break;
            case K::separator:
                out += ' ';
                break;
            case K::element:
            case K::text:
                break;
        }
    }
    flush();
    return out;
}

}  // namespace detail

/// Tokenizes a \ce body. Throws `Error` (E_CHEM_SYNTAX) with a span into
/// `body`.
inline std::vector<ChemToken> tokenize_ce(std::string_view body) { return detail::CeLexer(body).run(); }

/// Expands a \ce body to plain TeX.
inline std::string expand_ce(std::string_view body) { return detail::render_ce(tokenize_ce(body)); }

namespace detail {

inline std::string pu_unit(std::string_view s, std::size_t& i, std::size_t base) {
    auto b = i;
    std::string letters;
    while (i < s.size() && is_ascii_alpha(s[i])) letters += s[i++];
    if (letters.empty()) {
        std::size_t len = i < s.size() ? std::max<std::size_t>(1, utf8_sequence_length(s, i)) : 1;
        chem_fail("expected a unit", base + std::min(i, s.empty() ? 0 : s.size() - 1), len);
    }
    std::string out = "\\mathrm{" + letters + "}";
    std::string exp;
    if (i < s.size() && s[i] == '^') {
        ++i;
        if (i < s.size() && s[i] == '{') {
            auto close = s.find('}', i);
            if (close == std::string_view::npos) chem_fail("unclosed '{'", base + i);
            exp = std::string(s.substr(i + 1, close - i - 1));
            i = close + 1;
        } else {
            if (i < s.size() && s[i] == '-') exp += s[i++];
            while (i < s.size() && is_ascii_digit(s[i])) exp += s[i++];
        }
        if (exp.empty() || exp == "-") chem_fail("empty unit exponent", base + b);
    } else {
        if (i < s.size() && s[i] == '-' && i + 1 < s.size() && is_ascii_digit(s[i + 1])) exp += s[i++];
        while (i < s.size() && is_ascii_digit(s[i])) exp += s[i++];
    }
    for (std::size_t k = 0; k < exp.size(); ++k)
        if (!is_ascii_digit(exp[k]) && !(k == 0 && exp[k] == '-')) chem_fail("unit exponent must be an integer", base + b);
    if (!exp.empty()) out += "^{" + exp + "}";
    return out;
}

}  // namespace detail

/// Expands a \pu body: an optional number followed by an optional unit
/// expression. Throws `Error` (E_CHEM_SYNTAX) with a span into `body`.
inline std::string expand_pu(std::string_view body) {
    using namespace detail;
    using detail::chem_fail;
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < body.size() && is_ascii_space(body[i])) ++i;
    };
    skip_ws();
    std::string out;
    auto nb = i;
    std::string number;
    if (i < body.size() && (is_ascii_digit(body[i]) || body[i] == '-')) {
        if (body[i] == '-') number += body[i++];
        if (i >= body.size() || !is_ascii_digit(body[i])) chem_fail("malformed number", nb);
        while (i < body.size() && is_ascii_digit(body[i])) number += body[i++];
        if (i < body.size() && body[i] == '.') {
            number += body[i++];
            if (i >= body.size() || !is_ascii_digit(body[i])) chem_fail("malformed number", nb);
            while (i < body.size() && is_ascii_digit(body[i])) number += body[i++];
        }
        out = number;
        if (i < body.size() && (body[i] == 'e' || body[i] == 'E') && i + 1 < body.size() &&
            (is_ascii_digit(body[i + 1]) || body[i + 1] == '-' || body[i + 1] == '+')) {
            ++i;
            std::string exp;
            if (body[i] == '-' || body[i] == '+') {
                if (body[i] == '-') exp += '-';
                ++i;
            }
            if (i >= body.size() || !is_ascii_digit(body[i])) chem_fail("malformed exponent", nb);
            while (i < body.size() && is_ascii_digit(body[i])) exp += body[i++];
            out += "\\times 10^{" + exp + "}";
        }
        if (i < body.size() && !is_ascii_space(body[i])) chem_fail("expected a space between number and unit", i);
    }
    skip_ws();
    if (i >= body.size()) return out;
    if (!out.empty()) out += "\\,";
    out += detail::pu_unit(body, i, 0);
    while (i < body.size()) {
        char c = body[i];
        if (c == '.' || c == '*') {
            ++i;
            out += "\\cdot ";
            out += detail::pu_unit(body, i, 0);
        } else if (c == '/') {
            ++i;
            out += "/";
            out += detail::pu_unit(body, i, 0);
        } else if (is_ascii_space(c)) {
            skip_ws();
            if (i >= body.size()) break;
            out += "\\,";
            out += detail::pu_unit(body, i, 0);
        } else {
            chem_fail(std::string("unexpected '") + (static_cast<unsigned char>(c) < 0x80 ? std::string(1, c) : "?") +
                          "' in \\pu",
                      i, std::max<std::size_t>(1, utf8_sequence_length(body, i)));
        }
    }
    return out;
}

/// One rewritten \ce/\pu occurrence: input range and output range.
struct ChemSegment {
    Span input;
    Span output;
};

struct PreprocessResult {
    std::string text;
    std::vector<ChemSegment> segments;

    /// Maps a span in `text` back to the input: spans inside a rewritten
    /// segment map to the whole \ce{...}; others shift by the size deltas.
    Span map_to_input(Span s) const {
        long delta = 0;
        for (const auto& seg : segments) {
            if (s.begin >= seg.output.end) {
                delta += static_cast<long>(seg.input.size()) - static_cast<long>(seg.output.size());
                continue;
            }
            if (s.end > seg.output.begin) return seg.input;
            break;
        }
        return {static_cast<std::size_t>(static_cast<long>(s.begin) + delta),
                static_cast<std::size_t>(static_cast<long>(s.end) + delta)};
    }
};

/// Rewrites every \ce{...} and \pu{...} in `input`; other bytes are copied
/// unchanged. Throws `Error` with spans into `input`.
inline PreprocessResult preprocess_mapped(std::string_view input) {
    using namespace detail;
    PreprocessResult r;
    std::size_t i = 0;
    while (i < input.size()) {
        if (input[i] != '\\') {
            r.text += input[i++];
            continue;
        }
        std::size_t j = i + 1;
        while (j < input.size() && is_ascii_alpha(input[j])) ++j;
        std::string_view name = input.substr(i + 1, j - i - 1);
        if (name != "ce" && name != "pu") {
            if (j == i + 1 && j < input.size()) ++j;  // control symbol, e.g. "\\" or "\{"
            r.text += input.substr(i, j - i);
            i = j;
            continue;
        }
        Span cmd{i, j};
        std::size_t k = j;
        while (k < input.size() && is_ascii_space(input[k])) ++k;
        if (k >= input.size() || input[k] != '{')
            throw Error(make_error(codes::chem_syntax, "\\" + std::string(name) + " needs a braced argument", cmd));
        int level = 0;
        std::size_t close = k;
        for (; close < input.size(); ++close) {
            if (input[close] == '{') ++level;
            else if (input[close] == '}' && --level == 0) break;
        }
        if (close >= input.size()) throw Error(make_error(codes::unbalanced_brace, "unclosed '{'", {k, k + 1}));
        std::string_view body = input.substr(k + 1, close - k - 1);
        std::string expansion;
        try {
            expansion = name == "ce" ? expand_ce(body) : expand_pu(body);
        } catch (const Error& e) {
            Diagnostic d = e.diagnostic();
            std::size_t b = std::min(k + 1 + d.span.begin, close);
            std::size_t en = std::min(k + 1 + d.span.end, close);
            d.span = en > b ? Span{b, en} : Span{cmd.begin, close + 1};
            throw Error(d);
        }
        std::size_t out_begin = r.text.size();
        r.text += "{" + expansion + "}";
        r.segments.push_back({{i, close + 1}, {out_begin, r.text.size()}});
        i = close + 1;
    }
    return r;
}

inline std::string preprocess(std::string_view input) { return preprocess_mapped(input).text; }

}  // namespace texmath
