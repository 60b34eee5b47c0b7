#pragma once

// Corpus manifests (JSON).
//
// Conversion corpus: an array of cases
//
//     {
//       "id": "sqrt-poly",
//       "input": "\\sqrt{1-z^3}",
//       "expect": {"mathml": "<math ...>...</math>"}     // or {"error_code": "E_..."}
//                                                        // or {"valid_only": true}
//       "options": {"display": "block", "chem": false,   // all optional
//                   "semantics": false, "annotate": false}
//     }
//
// Comparison manifest: an array of {"id", "a_path" | "a_inline",
// "b_path" | "b_inline"}; paths are relative to the manifest file.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "texmath/similarity.hpp"
#include "texmath/texmath.hpp"

namespace texmath {

struct CorpusCase {
    enum class Expect { mathml, error_code, valid_only };

    std::string id;
    std::string input;
    Expect expect = Expect::valid_only;
    std::string expected;  // MathML or error code
    ConvertOptions options;
};

enum class CaseStatus { pass, fail, error };

inline std::string_view to_string(CaseStatus s) {
    switch (s) {
        case CaseStatus::pass: return "pass";
        case CaseStatus::fail: return "fail";
        case CaseStatus::error: return "error";
    }
    return "?";
}

struct CaseOutcome {
    std::string id;
    CaseStatus status = CaseStatus::pass;
    std::string actual;   // MathML on success
    std::string message;  // why it did not pass
    std::vector<Diagnostic> diagnostics;
};

struct CorpusSummary {
    std::size_t passed = 0;
    std::size_t failed = 0;
    std::size_t errors = 0;
    std::vector<CaseOutcome> outcomes;  // sorted by id

    std::size_t total() const { return passed + failed + errors; }
};

class ManifestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string read_text_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ManifestError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ConvertOptions options_from_json(const nlohmann::json& j) {
    ConvertOptions o;
    if (j.is_null()) return o;
    if (!j.is_object()) throw ManifestError("options must be an object");
    if (j.contains("display")) {
        auto d = j.at("display").get<std::string>();
        if (d == "block") o.gen.display = Display::block;
        else if (d == "inline") o.gen.display = Display::inline_;
        else throw ManifestError("display must be block or inline");
    }
    o.chem = j.value("chem", false);
    o.gen.wrap_semantics = j.value("semantics", false);
    o.gen.annotate_tex = j.value("annotate", false);
    return o;
}

inline nlohmann::json options_to_json(const ConvertOptions& o) {
    nlohmann::json j = nlohmann::json::object();
    if (o.gen.display == Display::block) j["display"] = "block";
    if (o.chem) j["chem"] = true;
    if (o.gen.wrap_semantics) j["semantics"] = true;
    if (o.gen.annotate_tex) j["annotate"] = true;
    return j;
}

}  // namespace detail

inline std::vector<CorpusCase> parse_corpus(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!j.is_array()) throw ManifestError("manifest must be a JSON array");
    std::vector<CorpusCase> out;
    try {
        for (const auto& c : j) {
            CorpusCase cc;
            cc.id = c.at("id").get<std::string>();
            cc.input = c.at("input").get<std::string>();
            const auto& e = c.at("expect");
            int kinds = 0;
            if (e.contains("mathml")) {
                cc.expect = CorpusCase::Expect::mathml;
                cc.expected = e.at("mathml").get<std::string>();
                ++kinds;
            }
            if (e.contains("error_code")) {
                cc.expect = CorpusCase::Expect::error_code;
                cc.expected = e.at("error_code").get<std::string>();
                ++kinds;
            }
            if (e.contains("valid_only")) {
                cc.expect = CorpusCase::Expect::valid_only;
                ++kinds;
            }
            if (kinds != 1) throw ManifestError("case " + cc.id + ": expect needs exactly one of mathml, error_code, valid_only");
            cc.options = detail::options_from_json(c.contains("options") ? c.at("options") : nlohmann::json());
            out.push_back(std::move(cc));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(std::string("malformed case: ") + e.what());
    }
    return out;
}

inline std::vector<CorpusCase> load_corpus(const std::filesystem::path& path) {
    return parse_corpus(detail::read_text_file(path));
}

inline std::string dump_corpus(const std::vector<CorpusCase>& cases) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : cases) {
        nlohmann::json j;
        j["id"] = c.id;
        j["input"] = c.input;
        switch (c.expect) {
            case CorpusCase::Expect::mathml: j["expect"] = {{"mathml", c.expected}}; break;
            case CorpusCase::Expect::error_code: j["expect"] = {{"error_code", c.expected}}; break;
            case CorpusCase::Expect::valid_only: j["expect"] = {{"valid_only", true}}; break;
        }
        auto o = detail::options_to_json(c.options);
        if (!o.empty()) j["options"] = o;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

inline CaseOutcome run_case(const CorpusCase& c, const Registry& reg) {
    CaseOutcome out;
    out.id = c.id;
    ConvertResult r = convert(c.input, reg, c.options);
    out.diagnostics = r.diagnostics;
    out.actual = r.mathml;
    switch (c.expect) {
        case CorpusCase::Expect::mathml:
            if (!r.ok()) {
                out.status = CaseStatus::error;
                out.message = "conversion failed: " + format_diagnostic(r.diagnostics.front());
            } else if (r.mathml != c.expected) {
                out.status = CaseStatus::fail;
                out.message = "output differs from reference";
            }
            break;
        case CorpusCase::Expect::error_code: {
            bool found = false;
            for (const auto& d : r.diagnostics)
                if (d.is_error() && d.code == c.expected) found = true;
            if (!found) {
                out.status = CaseStatus::fail;
                out.message = r.ok() ? "expected " + c.expected + " but the input converted"
                                     : "expected " + c.expected + ", got " + r.diagnostics.front().code;
            }
            break;
        }
        case CorpusCase::Expect::valid_only:
            if (!r.ok()) {
                out.status = CaseStatus::error;
                out.message = "conversion failed: " + format_diagnostic(r.diagnostics.front());
            }
            break;
    }
    return out;
}

inline CorpusSummary run_corpus(const std::vector<CorpusCase>& cases, const Registry& reg) {
    CorpusSummary s;
    for (const auto& c : cases) {
        auto o = run_case(c, reg);
        switch (o.status) {
            case CaseStatus::pass: ++s.passed; break;
            case CaseStatus::fail: ++s.failed; break;
            case CaseStatus::error: ++s.errors; break;
        }
        s.outcomes.push_back(std::move(o));
    }
    std::stable_sort(s.outcomes.begin(), s.outcomes.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return s;
}

/// Rewrites `mathml` expectations from current output. Cases that no longer
/// convert keep their old reference. Returns the number changed.
inline std::size_t update_refs(std::vector<CorpusCase>& cases, const Registry& reg) {
    std::size_t changed = 0;
    for (auto& c : cases) {
        if (c.expect != CorpusCase::Expect::mathml) continue;
        auto r = convert(c.input, reg, c.options);
        if (r.ok() && r.mathml != c.expected) {
            c.expected = r.mathml;
            ++changed;
        }
    }
    return changed;
}

inline std::vector<ComparePair> load_compare_manifest(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(detail::read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!j.is_array()) throw ManifestError("manifest must be a JSON array");
    auto base = path.parent_path();
    std::vector<ComparePair> out;
    try {
        for (const auto& e : j) {
            ComparePair p;
            p.id = e.at("id").get<std::string>();
            auto side = [&](const char* inline_key, const char* path_key) {
                if (e.contains(inline_key)) return e.at(inline_key).get<std::string>();
                if (e.contains(path_key)) return detail::read_text_file(base / e.at(path_key).get<std::string>());
                throw ManifestError("pair " + p.id + ": needs " + inline_key + " or " + path_key);
            };
            p.a = side("a_inline", "a_path");
            p.b = side("b_inline", "b_path");
            out.push_back(std::move(p));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(std::string("malformed pair: ") + e.what());
    }
    return out;
}

}  // namespace texmath
