#pragma once

// The texmathc command-line front end. `run` is the whole program; main()
// only forwards the process streams, so tests drive it in-process.
//
// Exit codes: 0 success, 1 validation or comparison failure, 2 usage,
// I/O or environment failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "texmath/cache.hpp"
#include "texmath/corpus.hpp"
#include "texmath/similarity.hpp"
#include "texmath/texmath.hpp"

namespace texmath::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_environment = 2;

namespace detail {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string read_all(std::istream& in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path);
    return read_all(f);
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write " + tmp.string());
        f << text;
        if (!f) throw IoError("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

/// Formula from the positional argument, --file, or stdin, in that order.
/// One trailing newline from a file or stdin is dropped.
inline std::string formula_input(const std::optional<std::string>& positional, const std::optional<std::string>& file,
                                 std::istream& in) {
    std::string text;
    if (positional && *positional != "-") return *positional;
    text = file ? read_file(*file) : read_all(in);
    if (!text.empty() && text.back() == '\n') text.pop_back();
    if (!text.empty() && text.back() == '\r') text.pop_back();
    return text;
}

inline nlohmann::json diagnostics_json(const std::vector<Diagnostic>& ds) {
    auto arr = nlohmann::json::array();
    for (const auto& d : ds)
        arr.push_back({{"severity", to_string(d.severity)},
                       {"code", d.code},
                       {"begin", d.span.begin},
                       {"end", d.span.end},
                       {"message", d.message}});
    return arr;
}

inline void print_diagnostics(std::ostream& err, const std::vector<Diagnostic>& ds) {
    for (const auto& d : ds) err << format_diagnostic(d) << '\n';
}

inline std::string options_fingerprint(const ConvertOptions& o) {
    std::string s = "display=";
    s += to_string(o.gen.display);
    s += o.chem ? ";chem=1" : ";chem=0";
    s += o.gen.wrap_semantics ? ";semantics=1" : ";semantics=0";
    s += o.gen.annotate_tex ? ";annotate=1" : ";annotate=0";
    return s;
}

inline std::string plural(std::size_t n, std::string_view one, std::string_view many) {
    return std::to_string(n) + " " + std::string(n == 1 ? one : many);
}

inline std::string pad(std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
}

}  // namespace detail

struct Settings {
    std::optional<std::string> registry_path;
    std::optional<std::string> cache_dir;
    bool verbose = false;
};

class App {
public:
    App(std::istream& in, std::ostream& out, std::ostream& err) : in_(in), out_(out), err_(err) {}

    int run(int argc, const char* const* argv) {
        CLI::App app{"LaTeX math to MathML converter and comparison tool", "texmathc"};
        app.require_subcommand(1);
        app.add_option("--registry", settings_.registry_path, "Command registry file (default: built in)");
        app.add_option("--cache-dir", settings_.cache_dir, "Render cache directory (default: $TEXMATHC_CACHE_DIR)");
        app.add_flag("-v,--verbose", settings_.verbose, "Progress and cache lines on stderr");

        // check
        auto* check = app.add_subcommand("check", "Validate a formula");
        std::optional<std::string> check_formula, check_file;
        bool check_chem = false, check_json = false;
        check->add_option("formula", check_formula, "Formula text ('-' or omitted: stdin)");
        check->add_option("-f,--file", check_file, "Read the formula from a file");
        check->add_flag("--chem", check_chem, "Expand \\ce and \\pu first");
        check->add_flag("--json", check_json, "Diagnostics as a JSON array on stdout");

        // convert
        auto* conv = app.add_subcommand("convert", "Convert a formula to MathML");
        std::optional<std::string> conv_formula, conv_file;
        std::string display = "inline";
        bool conv_chem = false, semantics = false, annotate = false, no_cache = false;
        conv->add_option("formula", conv_formula, "Formula text ('-' or omitted: stdin)");
        conv->add_option("-f,--file", conv_file, "Read the formula from a file");
        conv->add_option("--display", display, "inline or block")->check(CLI::IsMember({"inline", "block"}));
        conv->add_flag("--chem", conv_chem, "Expand \\ce and \\pu first");
        conv->add_flag("--semantics", semantics, "Wrap the result in <semantics>");
        conv->add_flag("--annotate", annotate, "Add an application/x-tex annotation (implies --semantics)");
        conv->add_flag("--no-cache", no_cache, "Bypass the render cache");

        // corpus
        auto* corp = app.add_subcommand("corpus", "Check a corpus manifest");
        std::string manifest;
        bool update_refs = false;
        std::string corpus_report = "table";
        corp->add_option("manifest", manifest, "Corpus manifest (JSON)")->required();
        corp->add_flag("--update-refs", update_refs, "Regenerate mathml expectations from current output");
        corp->add_option("--report", corpus_report, "json or table")->check(CLI::IsMember({"json", "table"}));

        // compare
        auto* cmp = app.add_subcommand("compare", "Compare MathML trees");
        std::vector<std::string> cmp_files;
        std::optional<std::string> cmp_manifest;
        bool ignore_mrow = false, ignore_all_attrs = false, require_semantics = false;
        std::vector<std::string> ignore_attr, strip;
        std::string cmp_report = "table";
        cmp->add_option("files", cmp_files, "Two MathML files")->expected(0, 2);
        cmp->add_option("--manifest", cmp_manifest, "Comparison manifest (JSON)");
        cmp->add_flag("--ignore-mrow", ignore_mrow, "Ignore inferred mrow wrappers");
        cmp->add_flag("--ignore-all-attrs", ignore_all_attrs, "Ignore every attribute");
        cmp->add_option("--ignore-attr", ignore_attr, "Ignore the named attribute (repeatable)")
            ->allow_extra_args(false)
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
        cmp->add_option("--strip", strip, "Splice out the named element (repeatable)")
            ->allow_extra_args(false)
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
        cmp->add_flag("--require-semantics", require_semantics, "Add a semantics wrapper where missing");
        cmp->add_option("--report", cmp_report, "json or table")->check(CLI::IsMember({"json", "table"}));

        // cache
        auto* cache = app.add_subcommand("cache", "Manage the render cache");
        cache->require_subcommand(1);
        auto* purge = cache->add_subcommand("purge", "Remove every entry");
        auto* stats = cache->add_subcommand("stats", "Entry count and size");

        // registry
        auto* reg = app.add_subcommand("registry", "Print the active registry");

        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            int code = app.exit(e, out_, err_);
            return code == 0 ? exit_ok : exit_environment;
        }

        try {
            if (check->parsed()) {
                ConvertOptions o;
                o.chem = check_chem;
                return cmd_check(detail::formula_input(check_formula, check_file, in_), o, check_json);
            }
            if (conv->parsed()) {
                ConvertOptions o;
                o.chem = conv_chem;
                o.gen.display = display == "block" ? Display::block : Display::inline_;
                o.gen.wrap_semantics = semantics || annotate;
                o.gen.annotate_tex = annotate;
                return cmd_convert(detail::formula_input(conv_formula, conv_file, in_), o, !no_cache);
            }
            if (corp->parsed()) return cmd_corpus(manifest, update_refs, corpus_report == "json");
            if (cmp->parsed()) {
                CompareOptions o;
                o.ignore_inferred_mrow = ignore_mrow;
                o.ignore_all_attributes = ignore_all_attrs;
                o.ignored_attributes.insert(ignore_attr.begin(), ignore_attr.end());
                o.strip_elements.insert(strip.begin(), strip.end());
                o.require_semantics_wrapper = require_semantics;
                return cmd_compare(cmp_files, cmp_manifest, o, cmp_report == "json");
            }
            if (purge->parsed()) return cmd_cache_purge();
            if (stats->parsed()) return cmd_cache_stats();
            if (reg->parsed()) {
                out_ << serialize_registry(registry());
                return exit_ok;
            }
        } catch (const detail::IoError& e) {
            err_ << "error: " << e.what() << '\n';
            return exit_environment;
        } catch (const ManifestError& e) {
            err_ << "error: " << e.what() << '\n';
            return exit_environment;
        } catch (const std::filesystem::filesystem_error& e) {
            err_ << "error: " << e.what() << '\n';
            return exit_environment;
        } catch (const Error& e) {
            // registry load failures
            err_ << format_diagnostic(e.diagnostic()) << '\n';
            return exit_environment;
        }
        return exit_environment;
    }

private:
    std::istream& in_;
    std::ostream& out_;
    std::ostream& err_;
    Settings settings_;
    std::optional<Registry> custom_registry_;

    const Registry& registry() {
        if (!settings_.registry_path) return default_registry();
        if (!custom_registry_) custom_registry_ = load_registry_file(*settings_.registry_path);
        return *custom_registry_;
    }

    RenderCache cache() const {
        return RenderCache(settings_.cache_dir ? std::filesystem::path(*settings_.cache_dir) : RenderCache::default_dir());
    }

    int cmd_check(const std::string& formula, const ConvertOptions& o, bool json) {
        auto r = convert(formula, registry(), o);
        if (json) out_ << detail::diagnostics_json(r.diagnostics).dump() << '\n';
        else detail::print_diagnostics(err_, r.diagnostics);
        return has_errors(r.diagnostics) ? exit_failure : exit_ok;
    }

    int cmd_convert(const std::string& formula, const ConvertOptions& o, bool use_cache) {
        const Registry& reg = registry();
        if (!use_cache) {
            auto r = convert(formula, reg, o);
            detail::print_diagnostics(err_, r.diagnostics);
            if (!r.ok()) return exit_failure;
            out_ << r.mathml << '\n';
            return exit_ok;
        }
        RenderCache c = cache();
        const std::string key = RenderCache::key(formula, detail::options_fingerprint(o), reg.version());
        if (auto hit = c.get(key)) {
            if (settings_.verbose) err_ << "cache hit " << key << '\n';
            out_ << *hit << '\n';
            return exit_ok;
        }
        if (settings_.verbose) err_ << "cache miss " << key << '\n';
        auto r = convert(formula, reg, o);
        detail::print_diagnostics(err_, r.diagnostics);
        if (!r.ok()) return exit_failure;
        try {
            c.put(key, r.mathml);
        } catch (const std::filesystem::filesystem_error& e) {
            err_ << "warning: cache write failed: " << e.what() << '\n';
        }
        out_ << r.mathml << '\n';
        return exit_ok;
    }

    int cmd_corpus(const std::string& path, bool update, bool json) {
        auto cases = load_corpus(path);
        const Registry& reg = registry();
        if (update) {
            std::size_t n = update_refs(cases, reg);
            detail::write_file(path, dump_corpus(cases));
            err_ << "updated " << detail::plural(n, "reference", "references") << '\n';
        }
        auto s = run_corpus(cases, reg);
        if (json) {
            nlohmann::json j;
            j["cases"] = s.total();
            j["passed"] = s.passed;
            j["failed"] = s.failed;
            j["errors"] = s.errors;
            auto arr = nlohmann::json::array();
            for (const auto& o : s.outcomes) {
                nlohmann::json row{{"id", o.id}, {"status", to_string(o.status)}};
                if (!o.message.empty()) row["message"] = o.message;
                arr.push_back(std::move(row));
            }
            j["outcomes"] = std::move(arr);
            out_ << j.dump(2) << '\n';
        } else {
            for (const auto& o : s.outcomes)
                if (o.status != CaseStatus::pass) out_ << to_string(o.status) << ' ' << o.id << ": " << o.message << '\n';
            out_ << detail::plural(s.total(), "case", "cases") << ": " << s.passed << " passed, " << s.failed
                 << " failed, " << s.errors << " errors\n";
        }
        return s.failed || s.errors ? exit_failure : exit_ok;
    }

    int cmd_compare(const std::vector<std::string>& files, const std::optional<std::string>& manifest,
                    const CompareOptions& o, bool json) {
        std::vector<ComparePair> pairs;
        if (manifest) {
            if (!files.empty()) throw detail::IoError("give either two files or --manifest, not both");
            pairs = load_compare_manifest(*manifest);
        } else {
            if (files.size() != 2) throw detail::IoError("compare needs two files or --manifest");
            pairs.push_back({files[0] + " vs " + files[1], detail::read_file(files[0]), detail::read_file(files[1])});
        }
        auto report = batch_compare(pairs, o);
        if (json) {
            nlohmann::json j;
            auto rows = nlohmann::json::array();
            for (const auto& r : report.rows) {
                nlohmann::json row{{"id", r.id}};
                if (r.error) row["error"] = *r.error;
                else {
                    row["ted"] = r.ted;
                    row["f1"] = r.f1;
                    row["nodes_a"] = r.nodes_a;
                    row["nodes_b"] = r.nodes_b;
                }
                rows.push_back(std::move(row));
            }
            j["rows"] = std::move(rows);
            j["formula_count"] = report.formula_count;
            j["failed_count"] = report.failed_count;
            j["overall_ted"] = report.overall_ted;
            j["average_ted"] = report.average_ted;
            j["mean_f1"] = report.mean_f1;
            out_ << j.dump(2) << '\n';
        } else {
            std::size_t w = 2;
            for (const auto& r : report.rows) w = std::max(w, r.id.size());
            out_ << detail::pad("id", w) << "  ted  f1     nodes_a  nodes_b\n";
            for (const auto& r : report.rows) {
                out_ << detail::pad(r.id, w) << "  ";
                if (r.error) {
                    out_ << "error: " << *r.error << '\n';
                    continue;
                }
                out_ << detail::pad(std::to_string(r.ted), 3) << "  " << format_fixed(r.f1) << "  "
                     << detail::pad(std::to_string(r.nodes_a), 7) << "  " << r.nodes_b << '\n';
            }
            out_ << '\n';
            for (const auto& [k, v] : aggregate_rows(report)) out_ << detail::pad(k, 20) << "  " << v << '\n';
        }
        for (const auto& r : report.rows)
            if (r.error) err_ << "error: " << r.id << ": " << *r.error << '\n';
        return report.failed_count ? exit_failure : exit_ok;
    }

    int cmd_cache_purge() {
        std::size_t n = cache().purge();
        out_ << detail::plural(n, "entry", "entries") << " removed\n";
        return exit_ok;
    }

    int cmd_cache_stats() {
        auto s = cache().stats();
        out_ << detail::plural(s.entries, "entry", "entries") << ", " << detail::plural(s.bytes, "byte", "bytes") << '\n';
        return exit_ok;
    }
};

inline int run(int argc, const char* const* argv, std::istream& in = std::cin, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    return App(in, out, err).run(argc, argv);
}

/// Convenience for tests: args excludes the program name.
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"texmathc"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), in, out, err);
}

}  // namespace texmath::cli
