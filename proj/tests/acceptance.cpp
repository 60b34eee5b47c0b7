// Acceptance checks: one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>

#include <unistd.h>

#include "support.hpp"
#include "texmath/cli.hpp"
#include "texmath/coverage.hpp"

using namespace texmath;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

std::vector<CorpusCase> corpus(const std::string& name) { return load_corpus(testsupport::data_dir() / "corpus" / name); }

// --- 1 ---------------------------------------------------------------------

Outcome registry_coverage() {
    Outcome o;
    auto t0 = Clock::now();
    auto cases = coverage_corpus(default_registry());
    if (cases.size() != default_registry().commands().size()) o.fail("coverage corpus misses commands");
    std::size_t failures = 0;
    for (const auto& c : cases) {
        ConvertOptions opt;
        opt.chem = c.chem;
        auto r = convert(c.input, opt);
        std::string why;
        if (!r.ok()) {
            ++failures;
            o.fail(c.command + ": " + r.diagnostics.front().message);
        } else if (!testsupport::well_formed_xml(r.mathml, &why)) {
            ++failures;
            o.fail(c.command + ": " + why);
        }
    }
    double s = seconds_since(t0);
    if (s >= 10) o.fail("took " + std::to_string(s) + " s");
    if (o.pass)
        o.detail = std::to_string(cases.size()) + " commands, 0 failures, " + format_fixed(s, 2) + " s";
    else
        o.detail += " (" + std::to_string(failures) + " failures)";
    return o;
}

// --- 2 ---------------------------------------------------------------------

Outcome figure2() {
    Outcome o;
    auto cases = corpus("figure2.json");
    auto refs = nlohmann::json::parse(testsupport::slurp(testsupport::data_dir() / "fixtures" / "figure2_reference.json"));
    std::map<std::string, std::string> ref;
    for (const auto& r : refs) ref[r["id"].get<std::string>()] = r["mathml"].get<std::string>();
    if (cases.size() != 8) o.fail("expected 8 inputs, found " + std::to_string(cases.size()));
    CompareOptions cmp;
    cmp.ignore_inferred_mrow = true;
    cmp.ignore_all_attributes = true;
    for (const auto& c : cases) {
        auto r = convert(c.input, c.options);
        if (!r.ok()) {
            o.fail(c.id + " failed to convert");
            continue;
        }
        auto it = ref.find(c.id);
        if (it == ref.end()) {
            o.fail(c.id + " has no reference");
            continue;
        }
        if (!testsupport::well_formed_xml(it->second)) o.fail(c.id + " reference is not well-formed");
        double f1 = element_fscore(*r.tree, parse_xml(it->second), cmp).f1;
        if (f1 != 1.0) o.fail(c.id + " F1 " + format_fixed(f1));
    }
    if (o.pass) o.detail = "8/8 convert, F1 = 1.000 each";
    return o;
}

// --- 3 ---------------------------------------------------------------------

Outcome ted_correctness() {
    Outcome o;
    auto t0 = Clock::now();
    std::mt19937 rng(31337);
    const std::vector<std::string> labels{"a", "b", "c"};
    int mismatches = 0;
    for (int i = 0; i < 500; ++i) {
        auto a = testsupport::random_tree(rng, 6, labels);
        auto b = testsupport::random_tree(rng, 6, labels);
        auto got = tree_edit_distance(testsupport::mathml_from_otree(a), testsupport::mathml_from_otree(b)).distance;
        if (got != testsupport::ted_tai(a, b)) ++mismatches;
    }
    if (mismatches) o.fail(std::to_string(mismatches) + " oracle mismatches");
    int violations = 0;
    for (int i = 0; i < 1000; ++i) {
        auto x = testsupport::mathml_from_otree(testsupport::random_tree(rng, 8, labels));
        auto y = testsupport::mathml_from_otree(testsupport::random_tree(rng, 8, labels));
        auto z = testsupport::mathml_from_otree(testsupport::random_tree(rng, 8, labels));
        auto d = [](const MathMLNode& p, const MathMLNode& q) { return tree_edit_distance(p, q).distance; };
        auto xy = d(x, y), yx = d(y, x), yz = d(y, z), xz = d(x, z);
        if (d(x, x) != 0) ++violations;
        if ((xy == 0) != (x == y)) ++violations;
        if (xy != yx) ++violations;
        if (xz > xy + yz) ++violations;
    }
    if (violations) o.fail(std::to_string(violations) + " metric axiom violations");
    double s = seconds_since(t0);
    if (s >= 60) o.fail("took " + std::to_string(s) + " s");
    if (o.pass) o.detail = "500 trees, 0 mismatches; 1000 triples, 0 violations; " + format_fixed(s, 2) + " s";
    return o;
}

// --- 4 ---------------------------------------------------------------------

Outcome table_shape() {
    Outcome o;
    auto pairs = load_compare_manifest(testsupport::data_dir() / "fixtures" / "renderers" / "manifest.json");
    auto report = batch_compare(pairs);
    std::size_t oracle_sum = 0;
    for (const auto& p : pairs) {
        auto a = testsupport::otree_from_xml(p.a);
        auto b = testsupport::otree_from_xml(p.b);
        if (a.size() > 40 || b.size() > 40) o.fail(p.id + " exceeds 40 nodes");
        oracle_sum += testsupport::ted_forest(a, b);
    }
    if (report.failed_count) o.fail("XML failures in fixture corpus");
    if (report.formula_count != pairs.size()) o.fail("formula count mismatch");
    if (report.overall_ted != oracle_sum)
        o.fail("overall " + std::to_string(report.overall_ted) + " != oracle " + std::to_string(oracle_sum));
    double expected = pairs.empty() ? 0.0 : static_cast<double>(oracle_sum) / static_cast<double>(pairs.size());
    if (format_fixed(report.average_ted) != format_fixed(expected)) o.fail("average mismatch");
    if (aggregate_rows(report)[2].second != format_fixed(expected)) o.fail("table average mismatch");
    if (o.pass)
        o.detail = std::to_string(pairs.size()) + " pairs, overall " + std::to_string(oracle_sum) + ", average " +
                   format_fixed(expected);
    return o;
}

// --- 5 ---------------------------------------------------------------------

Outcome intent_grammar() {
    Outcome o;
    auto pos = testsupport::read_lines(testsupport::data_dir() / "corpus" / "intent_positive.txt");
    auto neg = testsupport::read_lines(testsupport::data_dir() / "corpus" / "intent_negative.txt");
    if (pos.size() < 50 || neg.size() < 50) o.fail("suite too small");
    std::set<intent::StructureKind> structures;
    std::set<intent::Hint> hints;
    std::function<void(const IntentExpr&)> scan = [&](const IntentExpr& e) {
        if (auto s = e.as<intent::Structure>()) structures.insert(s->kind);
        if (auto a = e.as<intent::Application>()) {
            if (a->hint) hints.insert(*a->hint);
            scan(*a->head);
            for (const auto& x : a->args) scan(x);
        }
    };
    std::size_t ok = 0, rejected = 0;
    bool has_example = false;
    for (const auto& s : pos) {
        has_example |= s == "open-interval($x,$y)";
        try {
            scan(parse_intent(s));
            ++ok;
        } catch (const Error& e) {
            o.fail("positive rejected: " + s);
        }
    }
    for (const auto& s : neg) {
        try {
            parse_intent(s);
            o.fail("negative accepted: " + s);
        } catch (const Error& e) {
            if (e.code() == "E_INTENT_SYNTAX") ++rejected;
            else o.fail("negative gave " + e.code() + ": " + s);
        }
    }
    if (!has_example) o.fail("suite lacks open-interval($x,$y)");
    if (structures.size() != 4) o.fail("suite covers " + std::to_string(structures.size()) + " of 4 structures");
    if (hints.size() != 7) o.fail("suite covers " + std::to_string(hints.size()) + " of 7 hints");
    if (o.pass)
        o.detail = std::to_string(ok) + "/" + std::to_string(pos.size()) + " positive, " + std::to_string(rejected) +
                   "/" + std::to_string(neg.size()) + " negative";
    return o;
}

// --- 6 ---------------------------------------------------------------------

const MathMLNode* find_node(const MathMLNode& n, const std::function<bool(const MathMLNode&)>& pred) {
    if (pred(n)) return &n;
    for (const auto& c : n.children)
        if (auto f = find_node(c, pred)) return f;
    return nullptr;
}

Outcome intent_injection() {
    Outcome o;
    auto annotated = convert("\\intent{(x,y)}{intent='open-interval(\\$x,\\$y)'}");
    auto plain = convert("(x,y)");
    if (!annotated.ok() || !plain.ok()) {
        o.fail("conversion failed");
        return o;
    }
    auto fence = find_node(*annotated.tree, [](const MathMLNode& n) { return n.attr("intent") != nullptr; });
    if (!fence || fence->element != "mrow" || *fence->attr("intent") != "open-interval($x,$y)")
        o.fail("intent attribute not on an mrow");
    else if (fence->children.empty() || fence->children.front().text != "(" || fence->children.back().text != ")")
        o.fail("intent mrow does not wrap the fence");
    for (std::string v : {"x", "y"}) {
        auto mi = find_node(*annotated.tree, [&](const MathMLNode& n) { return n.element == "mi" && n.text == v; });
        if (!mi || !mi->attr("arg") || *mi->attr("arg") != v) o.fail("mi " + v + " lacks arg=\"" + v + "\"");
    }
    CompareOptions cmp;
    cmp.ignore_all_attributes = true;
    cmp.ignore_inferred_mrow = true;
    auto ted = tree_edit_distance(*annotated.tree, *plain.tree, cmp).distance;
    if (ted != 0) o.fail("TED " + std::to_string(ted));
    if (o.pass) o.detail = "attributes present, TED 0";
    return o;
}

// --- 7 ---------------------------------------------------------------------

Outcome mhchem_subset() {
    Outcome o;
    auto cases = corpus("mhchem.json");
    if (cases.size() < 116) o.fail("only " + std::to_string(cases.size()) + " cases");
    std::set<ChemToken::Kind> kinds;
    for (const auto& c : cases) {
        try {
            std::string once = preprocess(c.input);
            if (preprocess(once) != once) o.fail(c.id + " preprocess is not idempotent");
            auto p = parse(once, default_registry(), ParseOptions{true});
            if (!p.ok() || !p.warnings.empty()) o.fail(c.id + " re-parse produced diagnostics");
            auto r = convert(c.input, c.options);
            if (!r.ok()) o.fail(c.id + " failed to convert");
            auto start = c.input.find("\\ce{");
            while (start != std::string::npos) {
                auto end = c.input.find('}', start);
                // Nested braces in isotopes: take the body up to the matching close.
                int level = 0;
                for (end = start + 3; end < c.input.size(); ++end) {
                    if (c.input[end] == '{') ++level;
                    else if (c.input[end] == '}' && --level == 0) break;
                }
                for (const auto& t : tokenize_ce(std::string_view(c.input).substr(start + 4, end - start - 4)))
                    kinds.insert(t.kind);
                start = c.input.find("\\ce{", end);
            }
        } catch (const Error& e) {
            o.fail(c.id + ": " + e.diagnostic().message);
        }
    }
    if (kinds.size() != 14) o.fail("suite covers " + std::to_string(kinds.size()) + " of 14 token kinds");
    if (o.pass) o.detail = std::to_string(cases.size()) + " cases, 14/14 token kinds, idempotent";
    return o;
}

// --- 8 ---------------------------------------------------------------------

Outcome robustness() {
    Outcome o;
    std::mt19937 rng(8088);
    std::vector<std::string> seeds;
    for (const auto& c : corpus("combined.json")) seeds.push_back(c.input);
    static const std::string alphabet = "\\{}^_&$#%~ ()[]|.,;:'!?=+-*/<>0123456789abcxyzAZ";
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    auto names = [] {
        std::vector<std::string> v;
        for (const auto& [name, _] : default_registry().commands()) v.push_back(name);
        return v;
    }();

    const int total = 100000;
    double worst = 0;
    std::size_t rejected = 0;
    for (int i = 0; i < total; ++i) {
        std::string s;
        if (i % 2 == 0) {
            std::size_t n = pick(64);
            for (std::size_t k = 0; k < n; ++k)
                s += i % 4 == 0 ? static_cast<char>(rng() & 0xFF) : alphabet[pick(alphabet.size())];
        } else {
            s = seeds[pick(seeds.size())];
            int edits = 1 + static_cast<int>(pick(4));
            for (int e = 0; e < edits; ++e) {
                std::size_t at = s.empty() ? 0 : pick(s.size() + 1);
                switch (pick(4)) {
                    case 0:
                        if (!s.empty() && at < s.size()) s.erase(at, 1);
                        break;
                    case 1: s.insert(at, 1, alphabet[pick(alphabet.size())]); break;
                    case 2: s.insert(at, "\\" + names[pick(names.size())]); break;
                    default: s.insert(at, std::string(1 + pick(40), pick(2) ? '{' : '}'));
                }
            }
        }
        ConvertOptions opt;
        opt.chem = i % 3 == 0;
        auto t0 = Clock::now();
        try {
            auto r = convert(s, opt);
            if (!r.ok()) ++rejected;
            std::optional<ParseResult> p;
            if (!opt.chem) {
                p = parse(s, default_registry());
            } else {
                try {
                    p = parse(preprocess(s), default_registry(), ParseOptions{true});
                } catch (const Error&) {
                }
            }
            if (p && p->ok())
                for_each_command(*p->ast, [&](std::string_view n) {
                    if (!default_registry().lookup(n)) o.fail("non-whitelisted \\" + std::string(n) + " in AST");
                });
        } catch (const std::exception& e) {
            o.fail(std::string("exception escaped: ") + e.what());
        } catch (...) {
            o.fail("unknown exception escaped");
        }
        double s_each = seconds_since(t0);
        worst = std::max(worst, s_each);
        if (s_each > 1.0) o.fail("input took " + format_fixed(s_each) + " s");
    }
    if (o.pass)
        o.detail = std::to_string(total) + " inputs, " + std::to_string(rejected) + " rejected, slowest " +
                   format_fixed(worst * 1000, 2) + " ms";
    return o;
}

// --- 9 ---------------------------------------------------------------------

Outcome round_trip() {
    Outcome o;
    std::size_t checked = 0;
    auto check = [&](const std::string& id, const std::string& input, bool chem) {
        std::string text = input;
        if (chem) {
            try {
                text = preprocess(input);
            } catch (const Error&) {
                return;
            }
        }
        auto a = parse(text, default_registry(), ParseOptions{chem});
        if (!a.ok()) return;
        auto b = parse(render_tex(*a.ast), default_registry(), ParseOptions{chem});
        ++checked;
        if (!b.ok() || !structurally_equal(*a.ast, *b.ast)) o.fail(id + " does not round-trip");
    };
    for (std::string name : {"figure2.json", "mhchem.json", "combined.json"})
        for (const auto& c : corpus(name)) check(c.id, c.input, c.options.chem);
    for (const auto& c : coverage_corpus(default_registry())) check("command-" + c.command, c.input, c.chem);
    if (o.pass) o.detail = std::to_string(checked) + " valid cases round-trip";
    return o;
}

// --- 10 --------------------------------------------------------------------

Outcome throughput() {
    Outcome o;
    auto cases = corpus("combined.json");
    if (cases.size() != 423) o.fail("combined corpus has " + std::to_string(cases.size()) + " cases");
    auto t0 = Clock::now();
    for (const auto& c : cases)
        if (!c.options.chem) validate(c.input, default_registry());
    auto summary = run_corpus(cases, default_registry());
    double s = seconds_since(t0);
    if (summary.passed != cases.size())
        o.fail(std::to_string(summary.failed) + " failed, " + std::to_string(summary.errors) + " errors");
    if (s >= 5) o.fail("took " + format_fixed(s, 2) + " s");
    if (o.pass) o.detail = std::to_string(cases.size()) + " cases in " + format_fixed(s, 3) + " s";
    return o;
}

// --- 11 --------------------------------------------------------------------

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
    std::istringstream in;
    std::ostringstream out, err;
    int code = cli::run(args, in, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> convert_args(const CorpusCase& c) {
    std::vector<std::string> a{"convert"};
    if (c.options.gen.display == Display::block) a.insert(a.end(), {"--display", "block"});
    if (c.options.chem) a.push_back("--chem");
    if (c.options.gen.wrap_semantics) a.push_back("--semantics");
    if (c.options.gen.annotate_tex) a.push_back("--annotate");
    a.push_back("--");
    a.push_back(c.input);
    return a;
}

Outcome cache_semantics() {
    Outcome o;
    auto dir = fs::temp_directory_path() / ("texmath-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    const std::vector<std::string> base{"--cache-dir", dir.string(), "-v"};
    auto with = [&](std::vector<std::string> rest) {
        auto a = base;
        a.insert(a.end(), rest.begin(), rest.end());
        return run_cli(a);
    };

    auto first = with({"convert", "x^2"});
    with({"cache", "purge"});
    auto second = with({"convert", "x^2"});
    auto third = with({"convert", "x^2"});
    with({"cache", "purge"});
    auto fourth = with({"convert", "x^2"});
    auto has = [](const CliRun& r, const char* w) { return r.err.find(w) != std::string::npos; };
    if (!(has(first, "cache miss") && has(second, "cache miss") && has(third, "cache hit") && has(fourth, "cache miss")))
        o.fail("miss/hit/miss pattern not observed");
    if (!(first.out == second.out && second.out == third.out && third.out == fourth.out))
        o.fail("outputs differ across purge");

    std::size_t compared = 0;
    for (const auto& c : corpus("combined.json")) {
        auto args = convert_args(c);
        auto cached1 = with(args);
        auto cached2 = with(args);
        auto nc = args;
        nc.insert(nc.begin() + 1, "--no-cache");
        auto plain = with(nc);
        ++compared;
        if (cached1.out != plain.out || cached2.out != plain.out || cached1.code != plain.code ||
            cached2.code != plain.code)
            o.fail(c.id + " differs between cached and uncached output");
        if (plain.code == 0 && !has(cached2, "cache hit")) o.fail(c.id + " was not served from the cache");
    }
    fs::remove_all(dir);
    if (o.pass) o.detail = "miss/hit/miss observed; " + std::to_string(compared) + " cases byte-identical";
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {"AC1 registry coverage", registry_coverage},
        {"AC2 figure 2 fixtures", figure2},
        {"AC3 TED metric correctness", ted_correctness},
        {"AC4 comparison table shape", table_shape},
        {"AC5 intent grammar conformance", intent_grammar},
        {"AC6 intent attribute injection", intent_injection},
        {"AC7 mhchem subset", mhchem_subset},
        {"AC8 robustness", robustness},
        {"AC9 round-trip normalization", round_trip},
        {"AC10 throughput", throughput},
        {"AC11 cache semantics", cache_semantics},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.name << ": " << o.detail << std::endl;
        if (!o.pass) ++failures;
    }
    return failures ? 1 : 0;
}
