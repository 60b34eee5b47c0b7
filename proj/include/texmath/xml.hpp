#pragma once

// Minimal XML reader for MathML documents produced by other renderers.
//
// Handles the prolog, comments, processing instructions, CDATA, character
// and predefined entity references, and namespace prefixes (dropped along
// with xmlns attributes). Whitespace between elements is discarded; text of
// leaf elements is trimmed with inner runs collapsed to one space.

#include <string>
#include <string_view>

#include "texmath/detail/util.hpp"
#include "texmath/diagnostic.hpp"
#include "texmath/mathml.hpp"

namespace texmath {

namespace codes {
inline constexpr std::string_view xml_syntax = "E_XML";
}

namespace detail {

class XmlReader {
public:
    explicit XmlReader(std::string_view text) : s_(text) {}

    MathMLNode read_document() {
        skip_misc();
        if (peek() != '<') fail("expected root element");
        MathMLNode root = read_element(0);
        skip_misc();
        if (i_ < s_.size()) fail("content after root element");
        return root;
    }

private:
    std::string_view s_;
    std::size_t i_ = 0;

    [[noreturn]] void fail(std::string msg) const {
        std::size_t b = std::min(i_, s_.empty() ? 0 : s_.size() - 1);
        throw Error(make_error(codes::xml_syntax, std::move(msg), {b, std::min(b + 1, s_.size())}));
    }

    char peek(std::size_t k = 0) const { return i_ + k < s_.size() ? s_[i_ + k] : '\0'; }
    bool starts(std::string_view p) const { return s_.substr(i_, p.size()) == p; }

    void skip_ws() {
        while (i_ < s_.size() && is_ascii_space(s_[i_])) ++i_;
    }

    void skip_until(std::string_view end) {
        auto e = s_.find(end, i_);
        if (e == std::string_view::npos) fail("unterminated markup");
        i_ = e + end.size();
    }

    /// Skips whitespace, comments, PIs and a DOCTYPE.
    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts("<!--")) skip_until("-->");
            else if (starts("<?")) skip_until("?>");
            else if (starts("<!DOCTYPE")) skip_until(">");
            else return;
        }
    }

    static bool name_char(char c) {
        return is_ascii_alpha(c) || is_ascii_digit(c) || c == '-' || c == '_' || c == '.' || c == ':' ||
               static_cast<unsigned char>(c) >= 0x80;
    }

    std::string read_name() {
        auto b = i_;
        while (i_ < s_.size() && name_char(s_[i_])) ++i_;
        if (b == i_) fail("expected a name");
        return std::string(s_.substr(b, i_ - b));
    }

    static std::string local(const std::string& qname) {
        auto c = qname.find(':');
        return c == std::string::npos ? qname : qname.substr(c + 1);
    }

    void read_reference(std::string& out) {
        auto semi = s_.find(';', i_);
        if (semi == std::string_view::npos || semi - i_ > 12) fail("malformed entity reference");
        auto ent = s_.substr(i_ + 1, semi - i_ - 1);
        if (ent == "lt") out += '<';
        else if (ent == "gt") out += '>';
        else if (ent == "amp") out += '&';
        else if (ent == "quot") out += '"';
        else if (ent == "apos") out += '\'';
        else if (!ent.empty() && ent[0] == '#') {
            std::uint32_t cp = 0;
            bool ok = ent.size() > 1;
            if (ok && (ent[1] == 'x' || ent[1] == 'X')) {
                auto v = parse_hex_codepoint(ent.substr(2));
                ok = v.has_value();
                if (ok) cp = *v;
            } else {
                for (char c : ent.substr(1)) {
                    if (!is_ascii_digit(c) || cp > 0x10FFFF) {
                        ok = false;
                        break;
                    }
                    cp = cp * 10 + static_cast<std::uint32_t>(c - '0');
                }
                ok = ok && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF);
            }
            if (!ok || cp == 0) fail("bad character reference");
            append_utf8(out, cp);
        } else {
            fail("unknown entity &" + std::string(ent) + ";");
        }
        i_ = semi + 1;
    }

    static std::string collapse(const std::string& raw) {
        std::string out;
        bool space = false;
        for (char c : raw) {
            if (is_ascii_space(c)) {
                space = true;
                continue;
            }
            if (space && !out.empty()) out += ' ';
            space = false;
            out += c;
        }
        return out;
    }

    MathMLNode read_element(int depth) {
        if (depth > 512) fail("document nested too deeply");
        ++i_;  // '<'
        std::string qname = read_name();
        MathMLNode node(local(qname));
        for (;;) {
            skip_ws();
            char c = peek();
            if (c == '/' && peek(1) == '>') {
                i_ += 2;
                return node;
            }
            if (c == '>') {
                ++i_;
                break;
            }
            std::string an = read_name();
            skip_ws();
            if (peek() != '=') fail("expected '=' after attribute name");
            ++i_;
            skip_ws();
            char q = peek();
            if (q != '"' && q != '\'') fail("expected quoted attribute value");
            ++i_;
            std::string value;
            while (i_ < s_.size() && s_[i_] != q) {
                if (s_[i_] == '<') fail("'<' in attribute value");
                if (s_[i_] == '&') read_reference(value);
                else value += s_[i_++];
            }
            if (i_ >= s_.size()) fail("unterminated attribute value");
            ++i_;
            if (an == "xmlns" || an.rfind("xmlns:", 0) == 0) continue;
            node.set_attr(local(an), value);
        }

        std::string text;
        bool has_text = false;
        for (;;) {
            if (i_ >= s_.size()) fail("unclosed element <" + qname + ">");
            if (starts("</")) {
                i_ += 2;
                std::string close = read_name();
                if (close != qname) fail("mismatched </" + close + ">, expected </" + qname + ">");
                skip_ws();
                if (peek() != '>') fail("expected '>'");
                ++i_;
                break;
            }
            if (starts("<!--")) {
                skip_until("-->");
            } else if (starts("<![CDATA[")) {
                i_ += 9;
                auto e = s_.find("]]>", i_);
                if (e == std::string_view::npos) fail("unterminated CDATA");
                text += s_.substr(i_, e - i_);
                has_text = true;
                i_ = e + 3;
            } else if (starts("<?")) {
                skip_until("?>");
            } else if (peek() == '<') {
                node.children.push_back(read_element(depth + 1));
            } else if (peek() == '&') {
                read_reference(text);
                has_text = true;
            } else {
                char c = s_[i_++];
                if (!is_ascii_space(c)) has_text = true;
                text += c;
            }
        }
        std::string collapsed = collapse(text);
        if (!node.children.empty()) {
            if (has_text && !collapsed.empty()) fail("mixed text and element content in <" + qname + ">");
        } else {
            node.text = collapsed;
        }
        return node;
    }
};

}  // namespace detail

/// Parses an XML document into a MathMLNode tree. Throws `Error` with code
/// E_XML on malformed input.
inline MathMLNode parse_xml(std::string_view text) { return detail::XmlReader(text).read_document(); }

}  // namespace texmath
