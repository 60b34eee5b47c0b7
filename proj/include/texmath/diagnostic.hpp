#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace texmath {

enum class Severity { error, warning };

inline std::string_view to_string(Severity s) {
    return s == Severity::error ? "error" : "warning";
}

/// Half-open byte range [begin, end) into the source formula.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool operator==(const Span&) const = default;
};

// Stable machine identifiers. Tests and corpus manifests match on these strings.
namespace codes {
inline constexpr std::string_view unknown_command = "E_UNKNOWN_COMMAND";
inline constexpr std::string_view unbalanced_brace = "E_UNBALANCED_BRACE";
inline constexpr std::string_view bad_delim = "E_BAD_DELIM";
inline constexpr std::string_view bad_env = "E_BAD_ENV";
inline constexpr std::string_view empty_arg = "E_EMPTY_ARG";
inline constexpr std::string_view double_script = "E_DOUBLE_SCRIPT";
inline constexpr std::string_view double_infix = "E_DOUBLE_INFIX";
inline constexpr std::string_view too_deep = "E_TOO_DEEP";
inline constexpr std::string_view bad_char = "E_BAD_CHAR";
inline constexpr std::string_view bad_text = "E_BAD_TEXT";
inline constexpr std::string_view misplaced = "E_MISPLACED";
inline constexpr std::string_view chem_syntax = "E_CHEM_SYNTAX";
inline constexpr std::string_view intent_syntax = "E_INTENT_SYNTAX";
inline constexpr std::string_view intent_unbound_ref = "E_INTENT_UNBOUND_REF";
inline constexpr std::string_view intent_ambiguous_ref = "E_INTENT_AMBIGUOUS_REF";
inline constexpr std::string_view deprecated = "W_DEPRECATED";
}  // namespace codes

struct Diagnostic {
    Severity severity = Severity::error;
    std::string code;
    std::string message;
    Span span;

    bool is_error() const { return severity == Severity::error; }
    bool operator==(const Diagnostic&) const = default;
};

inline Diagnostic make_error(std::string_view code, std::string message, Span span) {
    return {Severity::error, std::string(code), std::move(message), span};
}

inline Diagnostic make_warning(std::string_view code, std::string message, Span span) {
    return {Severity::warning, std::string(code), std::move(message), span};
}

/// `severity:code:begin-end:message`, the line format the CLI prints.
inline std::string format_diagnostic(const Diagnostic& d) {
    std::string out(to_string(d.severity));
    out += ':';
    out += d.code;
    out += ':';
    out += std::to_string(d.span.begin);
    out += '-';
    out += std::to_string(d.span.end);
    out += ':';
    out += d.message;
    return out;
}

inline bool has_errors(const std::vector<Diagnostic>& ds) {
    for (const auto& d : ds)
        if (d.is_error()) return true;
    return false;
}

/// Raised by operations whose contract is a value or a single failure
/// (registry loading, intent parsing, chemistry expansion).
class Error : public std::runtime_error {
public:
    explicit Error(Diagnostic d)
        : std::runtime_error(format_diagnostic(d)), diagnostic_(std::move(d)) {}

    const Diagnostic& diagnostic() const noexcept { return diagnostic_; }
    const std::string& code() const noexcept { return diagnostic_.code; }

private:
    Diagnostic diagnostic_;
};

}  // namespace texmath
