#pragma once

// Whitelist of supported TeX commands and literal operator tokens.
//
// The registry is plain data: one record per command naming the generator
// function that translates it and that function's parameters. Everything the
// parser accepts and everything the generator emits for a command is decided
// here, so new macros are added by editing data/default.registry.
//
// File format (UTF-8, line oriented, '#' starts a comment line):
//
//     version 1.0.0
//     [commands]
//     # name  arity  fn  category  params...
//     ddot    1      accent  function  00A8
//     [operators]
//     # token  element  codepoint...  [key=value...]  [delim]
//     (        mo       0028  delim
//
// Fields are whitespace separated; a field containing whitespace, a quote, a
// backslash or a leading '#' is written in double quotes with \" and \\
// escapes.

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "texmath/detail/util.hpp"
#include "texmath/diagnostic.hpp"
#include "texmath/translation.hpp"

namespace texmath {

enum class Category { literal, function, environment, delimiter, style, chem_only, intent_only };

inline constexpr std::array<std::pair<Category, std::string_view>, 7> category_names{{
    {Category::literal, "literal"},
    {Category::function, "function"},
    {Category::environment, "environment"},
    {Category::delimiter, "delimiter"},
    {Category::style, "style"},
    {Category::chem_only, "chem-only"},
    {Category::intent_only, "intent-only"},
}};

inline std::string_view to_string(Category c) {
    for (const auto& [cat, name] : category_names)
        if (cat == c) return name;
    return "?";
}

inline std::optional<Category> parse_category(std::string_view s) {
    for (const auto& [cat, name] : category_names)
        if (name == s) return cat;
    return std::nullopt;
}

inline constexpr int max_command_arity = 3;

struct CommandSpec {
    std::string name;  // without the backslash
    int arity = 0;
    std::string translation_fn;
    std::vector<std::string> params;
    Category category = Category::literal;
    TranslationFn fn = TranslationFn::identifier;  // resolved from translation_fn

    bool operator==(const CommandSpec&) const = default;
};

enum class TokenElement { mo, mi, mn };

inline std::string_view to_string(TokenElement e) {
    switch (e) {
        case TokenElement::mo: return "mo";
        case TokenElement::mi: return "mi";
        case TokenElement::mn: return "mn";
    }
    return "mo";
}

struct OperatorSpec {
    std::string token;
    TokenElement element = TokenElement::mo;
    std::vector<std::string> codepoints;  // uppercase hex, decoded at generation time
    std::vector<std::pair<std::string, std::string>> attributes;
    bool delimiter = false;  // may follow \left, \right, \big

    std::string text() const {
        std::string out;
        for (const auto& cp : codepoints)
            if (auto v = detail::parse_hex_codepoint(cp)) detail::append_utf8(out, *v);
        return out;
    }

    bool operator==(const OperatorSpec&) const = default;
};

class Registry {
public:
    using CommandMap = std::map<std::string, CommandSpec, std::less<>>;
    using OperatorMap = std::map<std::string, OperatorSpec, std::less<>>;

    Registry() = default;

    const std::string& version() const { return version_; }
    const CommandMap& commands() const { return commands_; }
    const OperatorMap& operators() const { return operators_; }

    /// Exact-match lookup by command name (no backslash); nullptr when the
    /// command is not whitelisted.
    const CommandSpec* lookup(std::string_view name) const {
        auto it = commands_.find(name);
        return it == commands_.end() ? nullptr : &it->second;
    }

    const OperatorSpec* find_operator(std::string_view token) const {
        auto it = operators_.find(token);
        return it == operators_.end() ? nullptr : &it->second;
    }

    bool operator==(const Registry&) const = default;

private:
    friend Registry load_registry(std::string_view, std::string_view);

    std::string version_;
    CommandMap commands_;
    OperatorMap operators_;
};

namespace detail {

struct RegistryLine {
    std::size_t number = 0;
    std::vector<std::string> fields;
};

[[noreturn]] inline void registry_fail(std::string_view source, std::size_t line, const std::string& what) {
    std::string msg(source);
    msg += ':';
    msg += std::to_string(line);
    msg += ": ";
    msg += what;
    throw Error(make_error("E_REGISTRY", msg, {}));
}

inline std::vector<std::string> split_registry_fields(std::string_view line, std::string_view source,
                                                      std::size_t number) {
    std::vector<std::string> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        if (is_ascii_space(line[i])) {
            ++i;
            continue;
        }
        std::string field;
        if (line[i] == '"') {
            ++i;
            bool closed = false;
            while (i < line.size()) {
                char c = line[i++];
                if (c == '"') {
                    closed = true;
                    break;
                }
                if (c == '\\') {
                    if (i >= line.size()) break;
                    field += line[i++];
                } else {
                    field += c;
                }
            }
            if (!closed) registry_fail(source, number, "unterminated quoted field");
            if (i < line.size() && !is_ascii_space(line[i]))
                registry_fail(source, number, "garbage after quoted field");
        } else {
            while (i < line.size() && !is_ascii_space(line[i])) field += line[i++];
        }
        fields.push_back(std::move(field));
    }
    return fields;
}

inline std::string quote_registry_field(std::string_view f) {
    bool needs = f.empty() || f.front() == '#' || f.front() == '[';
    for (char c : f)
        if (is_ascii_space(c) || c == '"' || c == '\\') needs = true;
    if (!needs) return std::string(f);
    std::string out = "\"";
    for (char c : f) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

inline bool is_hex_field(std::string_view s) { return parse_hex_codepoint(s).has_value() && s.size() >= 4; }

inline bool valid_command_name(std::string_view name) {
    if (name.empty()) return false;
    if (name.size() == 1) return true;
    for (char c : name)
        if (!is_ascii_alpha(c)) return false;
    return true;
}

/// Parameter conventions per translation function; nullopt when valid.
inline std::optional<std::string> check_params(const CommandSpec& spec) {
    const auto& p = spec.params;
    auto need_hex_first = [&]() -> std::optional<std::string> {
        if (p.empty() || !is_hex_field(p[0])) return "expects a hex codepoint as first parameter";
        return std::nullopt;
    };
    switch (spec.fn) {
        case TranslationFn::identifier:
        case TranslationFn::delimiter:
        case TranslationFn::accent:
        case TranslationFn::underaccent:
            return need_hex_first();
        case TranslationFn::bigop:
            if (auto e = need_hex_first()) return e;
            if (p.size() > 1 && p[1] != "limits" && p[1] != "nolimits")
                return "bigop second parameter must be limits or nolimits";
            return std::nullopt;
        case TranslationFn::operator_:
            if (p.empty()) return "operator needs at least one codepoint";
            for (const auto& cp : p)
                if (!is_hex_field(cp)) return "operator parameters must be hex codepoints";
            return std::nullopt;
        case TranslationFn::space:
            if (p.size() != 1) return "space expects exactly one width parameter";
            return std::nullopt;
        case TranslationFn::fence:
            if (p.size() != 1 || (p[0] != "left" && p[0] != "right"))
                return "fence expects left or right";
            return std::nullopt;
        case TranslationFn::bigdelim:
            if (p.empty()) return "bigdelim expects a size";
            return std::nullopt;
        case TranslationFn::style:
            if (p.size() != 1) return "style expects one mathvariant";
            return std::nullopt;
        case TranslationFn::enclose:
            if (p.size() != 1) return "enclose expects one notation";
            return std::nullopt;
        case TranslationFn::overunder:
            if (p.size() != 1 || (p[0] != "over" && p[0] != "under"))
                return "overunder expects over or under";
            return std::nullopt;
        case TranslationFn::declstyle:
            if (p.empty()) return "declstyle expects key=value parameters";
            for (const auto& kv : p)
                if (!split_key_value(kv)) return "declstyle parameters must be key=value";
            return std::nullopt;
        case TranslationFn::namedfn:
        case TranslationFn::infix:
        case TranslationFn::matrix:
        case TranslationFn::sqrt:
        case TranslationFn::text:
        case TranslationFn::opname:
        case TranslationFn::phantom:
        case TranslationFn::chem:
        case TranslationFn::fraction:
        case TranslationFn::intent:
            return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace detail

/// Loads a registry from its text form. Fails atomically with an `Error`
/// whose message names the source and line of the offending entry.
inline Registry load_registry(std::string_view text, std::string_view source = "<registry>") {
    using detail::registry_fail;
    Registry reg;
    enum class Section { none, commands, operators } section = Section::none;
    bool have_version = false;

    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++number;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        auto body = detail::trim(line);
        if (body.empty() || body.front() == '#') {
            if (nl == text.size()) break;
            continue;
        }
        if (body == "[commands]") {
            section = Section::commands;
        } else if (body == "[operators]") {
            section = Section::operators;
        } else if (body.front() == '[') {
            registry_fail(source, number, "unknown section " + std::string(body));
        } else {
            auto fields = detail::split_registry_fields(body, source, number);
            if (section == Section::none) {
                if (fields.size() != 2 || fields[0] != "version")
                    registry_fail(source, number, "expected 'version <string>' before any section");
                if (have_version) registry_fail(source, number, "duplicate version header");
                reg.version_ = fields[1];
                have_version = true;
            } else if (section == Section::commands) {
                if (fields.size() < 4)
                    registry_fail(source, number, "command entry needs name, arity, fn and category");
                CommandSpec spec;
                spec.name = fields[0];
                if (!detail::valid_command_name(spec.name))
                    registry_fail(source, number, "invalid command name '" + spec.name + "'");
                if (fields[1].size() != 1 || !detail::is_ascii_digit(fields[1][0]))
                    registry_fail(source, number, "entry '" + spec.name + "': arity must be a digit");
                spec.arity = fields[1][0] - '0';
                if (spec.arity > max_command_arity)
                    registry_fail(source, number, "entry '" + spec.name + "': arity above " +
                                                      std::to_string(max_command_arity));
                spec.translation_fn = fields[2];
                auto info = find_translation_fn(spec.translation_fn);
                if (!info)
                    registry_fail(source, number, "entry '" + spec.name + "': unknown translation function '" +
                                                      spec.translation_fn + "'");
                spec.fn = info->fn;
                if (!info->accepts_arity(spec.arity))
                    registry_fail(source, number, "entry '" + spec.name + "': " + spec.translation_fn +
                                                      " does not take " + std::to_string(spec.arity) +
                                                      " arguments");
                auto cat = parse_category(fields[3]);
                if (!cat)
                    registry_fail(source, number, "entry '" + spec.name + "': unknown category '" + fields[3] + "'");
                spec.category = *cat;
                spec.params.assign(fields.begin() + 4, fields.end());
                if (auto err = detail::check_params(spec))
                    registry_fail(source, number, "entry '" + spec.name + "': " + *err);
                if (reg.commands_.count(spec.name))
                    registry_fail(source, number, "duplicate command '" + spec.name + "'");
                reg.commands_.emplace(spec.name, std::move(spec));
            } else {
                if (fields.size() < 3) registry_fail(source, number, "operator entry needs token, element, codepoint");
                OperatorSpec op;
                op.token = fields[0];
                if (fields[1] == "mo") op.element = TokenElement::mo;
                else if (fields[1] == "mi") op.element = TokenElement::mi;
                else if (fields[1] == "mn") op.element = TokenElement::mn;
                else registry_fail(source, number, "operator '" + op.token + "': element must be mo, mi or mn");
                for (std::size_t i = 2; i < fields.size(); ++i) {
                    const auto& f = fields[i];
                    if (f == "delim") {
                        op.delimiter = true;
                    } else if (auto kv = detail::split_key_value(f)) {
                        op.attributes.push_back(*kv);
                    } else if (detail::is_hex_field(f)) {
                        if (!op.attributes.empty() || op.delimiter)
                            registry_fail(source, number, "operator '" + op.token + "': codepoints must come first");
                        op.codepoints.push_back(f);
                    } else {
                        registry_fail(source, number, "operator '" + op.token + "': bad field '" + f + "'");
                    }
                }
                if (op.codepoints.empty()) registry_fail(source, number, "operator '" + op.token + "': no codepoint");
                if (reg.operators_.count(op.token))
                    registry_fail(source, number, "duplicate operator '" + op.token + "'");
                reg.operators_.emplace(op.token, std::move(op));
            }
        }
        if (nl == text.size()) break;
    }
    if (!have_version) registry_fail(source, number, "missing version header");
    return reg;
}

inline Registry load_registry_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(make_error("E_IO", "cannot read registry file " + path.string(), {}));
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_registry(ss.str(), path.string());
}

inline std::string serialize_registry(const Registry& reg) {
    using detail::quote_registry_field;
    std::string out = "version " + quote_registry_field(reg.version()) + "\n\n[commands]\n";
    for (const auto& [name, spec] : reg.commands()) {
        out += quote_registry_field(name);
        out += ' ';
        out += std::to_string(spec.arity);
        out += ' ';
        out += spec.translation_fn;
        out += ' ';
        out += to_string(spec.category);
        for (const auto& p : spec.params) {
            out += ' ';
            out += quote_registry_field(p);
        }
        out += '\n';
    }
    out += "\n[operators]\n";
    for (const auto& [token, op] : reg.operators()) {
        out += quote_registry_field(token);
        out += ' ';
        out += to_string(op.element);
        for (const auto& cp : op.codepoints) {
            out += ' ';
            out += cp;
        }
        for (const auto& [k, v] : op.attributes) {
            out += ' ';
            out += quote_registry_field(k + "=" + v);
        }
        if (op.delimiter) out += " delim";
        out += '\n';
    }
    return out;
}

}  // namespace texmath

#include "texmath/default_registry_data.hpp"

namespace texmath {

/// The registry shipped with the library (data/default.registry), parsed once.
inline const Registry& default_registry() {
    static const Registry reg = load_registry(default_registry_text, "default.registry");
    return reg;
}

}  // namespace texmath
