#pragma once

// Structural comparison of MathML trees: normalization, an order-insensitive
// element F-score, and ordered tree edit distance (Zhang-Shasha, unit costs).

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "texmath/diagnostic.hpp"
#include "texmath/mathml.hpp"
#include "texmath/xml.hpp"

namespace texmath {

struct CompareOptions {
    bool ignore_inferred_mrow = false;
    bool ignore_all_attributes = false;
    std::set<std::string> ignored_attributes;
    std::set<std::string> strip_elements;
    bool require_semantics_wrapper = false;

    /// Everything the evaluation mode normalizes away.
    static CompareOptions full() {
        CompareOptions o;
        o.ignore_inferred_mrow = true;
        o.ignore_all_attributes = true;
        o.strip_elements = {"annotation", "semantics"};
        return o;
    }
};

namespace detail {

/// Elements whose content is an implicit mrow.
inline bool has_inferred_mrow(std::string_view e) {
    return e == "math" || e == "mrow" || e == "msqrt" || e == "mstyle" || e == "mpadded" || e == "mphantom" ||
           e == "menclose" || e == "mtd";
}

inline bool plain_mrow(const MathMLNode& n) { return n.element == "mrow" && n.attributes.empty(); }

inline MathMLNode normalize_rec(const MathMLNode& n, const CompareOptions& o) {
    MathMLNode out(n.element);
    out.text = n.text;
    if (!o.ignore_all_attributes)
        for (const auto& kv : n.attributes)
            if (!o.ignored_attributes.count(kv.first)) out.attributes.push_back(kv);

    for (const auto& c : n.children) {
        MathMLNode k = normalize_rec(c, o);
        if (o.strip_elements.count(k.element)) {
            for (auto& g : k.children) out.children.push_back(std::move(g));
            continue;
        }
        if (o.ignore_inferred_mrow && plain_mrow(k) && k.children.size() == 1) {
            out.children.push_back(std::move(k.children.front()));
            continue;
        }
        out.children.push_back(std::move(k));
    }
    if (o.ignore_inferred_mrow && has_inferred_mrow(out.element) && out.children.size() == 1 &&
        plain_mrow(out.children.front())) {
        auto inner = std::move(out.children.front().children);
        out.children = std::move(inner);
    }
    // Splicing a stripped wrapper can leave a single-child mrow behind.
    if (o.ignore_inferred_mrow) {
        for (auto& c : out.children)
            while (plain_mrow(c) && c.children.size() == 1) {
                MathMLNode g = std::move(c.children.front());
                c = std::move(g);
            }
    }
    return out;
}

}  // namespace detail

/// Applies `options`; idempotent.
inline MathMLNode normalize(const MathMLNode& tree, const CompareOptions& options) {
    MathMLNode t = tree;
    if (options.require_semantics_wrapper && t.element == "math" &&
        !(t.children.size() == 1 && t.children.front().element == "semantics")) {
        MathMLNode content = t.children.size() == 1 ? std::move(t.children.front()) : MathMLNode("mrow", std::move(t.children));
        t.children.clear();
        t.children.push_back(MathMLNode("semantics", {std::move(content)}));
    }
    MathMLNode out = detail::normalize_rec(t, options);
    if (options.ignore_inferred_mrow)
        while (detail::plain_mrow(out) && out.children.size() == 1) {
            MathMLNode g = std::move(out.children.front());
            out = std::move(g);
        }
    return out;
}

// --- element F-score ------------------------------------------------------

struct FScoreReport {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    std::size_t matched_count = 0;
    std::size_t count_a = 0;
    std::size_t count_b = 0;
    std::vector<std::pair<std::string, std::size_t>> matched;  // item description, multiplicity
    std::vector<std::pair<std::string, std::size_t>> only_in_a;
    std::vector<std::pair<std::string, std::size_t>> only_in_b;
};

namespace detail {

/// `name`, `name:text` for tokens, then sorted ` key=value` pairs.
inline std::string element_item(const MathMLNode& n) {
    std::string s = n.element;
    if (n.is_token()) s += ":" + n.text;
    auto attrs = n.attributes;
    std::sort(attrs.begin(), attrs.end());
    for (const auto& [k, v] : attrs) s += " " + k + "=" + v;
    return s;
}

inline void collect_items(const MathMLNode& n, std::map<std::string, std::size_t>& out) {
    ++out[element_item(n)];
    for (const auto& c : n.children) collect_items(c, out);
}

}  // namespace detail

inline FScoreReport element_fscore(const MathMLNode& a, const MathMLNode& b, const CompareOptions& options = {}) {
    std::map<std::string, std::size_t> ia, ib;
    detail::collect_items(normalize(a, options), ia);
    detail::collect_items(normalize(b, options), ib);
    FScoreReport r;
    for (const auto& [k, n] : ia) r.count_a += n;
    for (const auto& [k, n] : ib) r.count_b += n;
    for (const auto& [k, n] : ia) {
        auto it = ib.find(k);
        std::size_t m = it == ib.end() ? 0 : std::min(n, it->second);
        if (m) r.matched.emplace_back(k, m);
        if (n > m) r.only_in_a.emplace_back(k, n - m);
        r.matched_count += m;
    }
    for (const auto& [k, n] : ib) {
        auto it = ia.find(k);
        std::size_t m = it == ia.end() ? 0 : std::min(n, it->second);
        if (n > m) r.only_in_b.emplace_back(k, n - m);
    }
    r.precision = r.count_a ? static_cast<double>(r.matched_count) / static_cast<double>(r.count_a) : 0.0;
    r.recall = r.count_b ? static_cast<double>(r.matched_count) / static_cast<double>(r.count_b) : 0.0;
    r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

// --- tree edit distance ---------------------------------------------------

struct TedResult {
    std::size_t distance = 0;
    std::size_t node_count_a = 0;
    std::size_t node_count_b = 0;
};

/// Node label used by TED: element name, plus text for token elements.
inline std::string ted_label(const MathMLNode& n) { return n.is_token() ? n.element + ":" + n.text : n.element; }

namespace detail {

/// Postorder view of a tree: labels, leftmost-leaf indices and keyroots.
struct PostorderTree {
    std::vector<int> label;  // interned
    std::vector<int> lml;    // leftmost leaf descendant (postorder index)
    std::vector<int> keyroots;

    int size() const { return static_cast<int>(label.size()); }
};

inline int build_postorder(const MathMLNode& n, PostorderTree& t, std::map<std::string, int>& intern) {
    int first = -1;
    for (const auto& c : n.children) {
        int idx = build_postorder(c, t, intern);
        if (first < 0) first = t.lml[idx];
    }
    int me = t.size();
    auto [it, _] = intern.emplace(ted_label(n), static_cast<int>(intern.size()));
    t.label.push_back(it->second);
    t.lml.push_back(first < 0 ? me : first);
    return me;
}

inline void compute_keyroots(PostorderTree& t) {
    // A keyroot is the highest node with a given leftmost leaf.
    std::map<int, int> highest;
    for (int i = 0; i < t.size(); ++i) highest[t.lml[i]] = i;
    for (const auto& [leaf, node] : highest) t.keyroots.push_back(node);
    std::sort(t.keyroots.begin(), t.keyroots.end());
}

inline std::size_t zhang_shasha(const PostorderTree& a, const PostorderTree& b) {
    const int n = a.size();
    const int m = b.size();
    std::vector<std::vector<int>> td(n, std::vector<int>(m, 0));
    std::vector<std::vector<int>> fd(n + 1, std::vector<int>(m + 1, 0));
    for (int i : a.keyroots) {
        for (int j : b.keyroots) {
            const int li = a.lml[i];
            const int lj = b.lml[j];
            // fd[x][y]: distance between forests a[li..li+x-1] and b[lj..lj+y-1].
            fd[0][0] = 0;
            for (int x = 1; x <= i - li + 1; ++x) fd[x][0] = fd[x - 1][0] + 1;
            for (int y = 1; y <= j - lj + 1; ++y) fd[0][y] = fd[0][y - 1] + 1;
            for (int x = 1; x <= i - li + 1; ++x) {
                const int ai = li + x - 1;
                for (int y = 1; y <= j - lj + 1; ++y) {
                    const int bj = lj + y - 1;
                    const int del = fd[x - 1][y] + 1;
                    const int ins = fd[x][y - 1] + 1;
                    if (a.lml[ai] == li && b.lml[bj] == lj) {
                        const int ren = fd[x - 1][y - 1] + (a.label[ai] == b.label[bj] ? 0 : 1);
                        fd[x][y] = std::min({del, ins, ren});
                        td[ai][bj] = fd[x][y];
                    } else {
                        const int px = a.lml[ai] - li;
                        const int py = b.lml[bj] - lj;
                        fd[x][y] = std::min({del, ins, fd[px][py] + td[ai][bj]});
                    }
                }
            }
        }
    }
    return static_cast<std::size_t>(td[n - 1][m - 1]);
}

}  // namespace detail

/// Exact ordered tree edit distance with unit insert, delete and rename
/// costs. Attributes do not take part in labels.
inline TedResult tree_edit_distance(const MathMLNode& a, const MathMLNode& b, const CompareOptions& options = {}) {
    MathMLNode na = normalize(a, options);
    MathMLNode nb = normalize(b, options);
    std::map<std::string, int> intern;
    detail::PostorderTree ta, tb;
    detail::build_postorder(na, ta, intern);
    detail::build_postorder(nb, tb, intern);
    detail::compute_keyroots(ta);
    detail::compute_keyroots(tb);
    return {detail::zhang_shasha(ta, tb), static_cast<std::size_t>(ta.size()), static_cast<std::size_t>(tb.size())};
}

// --- corpus comparison ----------------------------------------------------

struct ComparePair {
    std::string id;
    std::string a;  // serialized MathML
    std::string b;
};

struct CompareRow {
    std::string id;
    std::size_t ted = 0;
    double f1 = 0;
    std::size_t nodes_a = 0;
    std::size_t nodes_b = 0;
    std::optional<std::string> error;  // XML failure; row excluded from aggregates
};

struct CorpusReport {
    std::size_t formula_count = 0;  // pairs that compared successfully
    std::size_t failed_count = 0;
    std::size_t overall_ted = 0;
    double average_ted = 0;
    double mean_f1 = 0;
    std::vector<CompareRow> rows;  // input order
};

inline CorpusReport batch_compare(const std::vector<ComparePair>& pairs, const CompareOptions& options = {}) {
    CorpusReport report;
    double f1_sum = 0;
    for (const auto& p : pairs) {
        CompareRow row;
        row.id = p.id;
        try {
            MathMLNode a = parse_xml(p.a);
            MathMLNode b = parse_xml(p.b);
            auto ted = tree_edit_distance(a, b, options);
            row.ted = ted.distance;
            row.nodes_a = ted.node_count_a;
            row.nodes_b = ted.node_count_b;
            row.f1 = element_fscore(a, b, options).f1;
            ++report.formula_count;
            report.overall_ted += row.ted;
            f1_sum += row.f1;
        } catch (const Error& e) {
            row.error = e.diagnostic().message;
            ++report.failed_count;
        }
        report.rows.push_back(std::move(row));
    }
    if (report.formula_count) {
        report.average_ted = static_cast<double>(report.overall_ted) / static_cast<double>(report.formula_count);
        report.mean_f1 = f1_sum / static_cast<double>(report.formula_count);
    }
    return report;
}

inline std::string format_fixed(double v, int decimals = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

/// The four aggregate rows of the comparison table.
inline std::vector<std::pair<std::string, std::string>> aggregate_rows(const CorpusReport& r) {
    return {
        {"Number of formulas", std::to_string(r.formula_count)},
        {"Overall TED", std::to_string(r.overall_ted)},
        {"Average TED", format_fixed(r.average_ted)},
        {"Mean element F1", format_fixed(r.mean_f1)},
    };
}

}  // namespace texmath
