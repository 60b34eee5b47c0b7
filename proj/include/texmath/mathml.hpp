#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace texmath {

/// The presentation elements the generator may emit.
inline constexpr std::array<std::string_view, 27> supported_elements{
    "math",   "mrow",     "mi",          "mo",         "mn",         "mtext",     "mspace",
    "ms",     "mfrac",    "msqrt",       "mroot",      "msub",       "msup",      "msubsup",
    "munder", "mover",    "munderover",  "mmultiscripts", "mtable",  "mtr",       "mtd",
    "mstyle", "mpadded",  "mphantom",    "menclose",   "semantics",  "annotation",
};

inline bool is_supported_element(std::string_view name) {
    return std::find(supported_elements.begin(), supported_elements.end(), name) != supported_elements.end();
}

/// Elements whose content is text rather than child elements.
inline bool is_token_element(std::string_view name) {
    return name == "mi" || name == "mo" || name == "mn" || name == "mtext" || name == "ms" || name == "annotation";
}

struct MathMLNode {
    using Attributes = std::vector<std::pair<std::string, std::string>>;

    std::string element;
    Attributes attributes;  // insertion order is serialization order
    std::vector<MathMLNode> children;
    std::string text;  // token elements only

    MathMLNode() = default;
    explicit MathMLNode(std::string name) : element(std::move(name)) {}
    MathMLNode(std::string name, std::vector<MathMLNode> kids)
        : element(std::move(name)), children(std::move(kids)) {}

    static MathMLNode token(std::string name, std::string content) {
        MathMLNode n(std::move(name));
        n.text = std::move(content);
        return n;
    }

    bool is_token() const { return is_token_element(element); }

    const std::string* attr(std::string_view name) const {
        for (const auto& [k, v] : attributes)
            if (k == name) return &v;
        return nullptr;
    }

    /// Replaces an existing value in place or appends.
    MathMLNode& set_attr(std::string_view name, std::string value) {
        for (auto& [k, v] : attributes) {
            if (k == name) {
                v = std::move(value);
                return *this;
            }
        }
        attributes.emplace_back(std::string(name), std::move(value));
        return *this;
    }

    bool remove_attr(std::string_view name) {
        auto it = std::find_if(attributes.begin(), attributes.end(), [&](const auto& kv) { return kv.first == name; });
        if (it == attributes.end()) return false;
        attributes.erase(it);
        return true;
    }

    bool operator==(const MathMLNode&) const = default;
};

/// Number of nodes in the tree.
inline std::size_t node_count(const MathMLNode& n) {
    std::size_t c = 1;
    for (const auto& k : n.children) c += node_count(k);
    return c;
}

namespace detail {

inline void xml_escape(std::string& out, std::string_view s, bool attribute) {
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"':
                if (attribute) out += "&quot;";
                else out += c;
                break;
            default: out += c;
        }
    }
}

inline void serialize_into(std::string& out, const MathMLNode& n) {
    out += '<';
    out += n.element;
    for (const auto& [k, v] : n.attributes) {
        out += ' ';
        out += k;
        out += "=\"";
        xml_escape(out, v, true);
        out += '"';
    }
    if (n.is_token()) {
        out += '>';
        xml_escape(out, n.text, false);
    } else if (n.children.empty()) {
        out += "/>";
        return;
    } else {
        out += '>';
        for (const auto& c : n.children) serialize_into(out, c);
    }
    out += "</";
    out += n.element;
    out += '>';
}

}  // namespace detail

/// Compact UTF-8 XML. Non-ASCII is written literally.
inline std::string serialize(const MathMLNode& tree) {
    std::string out;
    detail::serialize_into(out, tree);
    return out;
}

}  // namespace texmath
