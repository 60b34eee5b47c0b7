#pragma once

// Test-only oracles and generators. Nothing here calls into the similarity
// or XML code of the library.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "texmath/mathml.hpp"

namespace testsupport {

inline std::filesystem::path data_dir() { return TEXMATH_TEST_DATA_DIR; }

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<std::string> read_lines(const std::filesystem::path& p) {
    std::vector<std::string> out;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        out.push_back(line);
    }
    return out;
}

// ---- independent XML reading (Boost.PropertyTree) ------------------------

/// Plain labeled ordered tree.
struct OTree {
    std::string label;
    std::vector<OTree> kids;

    std::size_t size() const {
        std::size_t n = 1;
        for (const auto& k : kids) n += k.size();
        return n;
    }
};

inline bool well_formed_xml(const std::string& text, std::string* why = nullptr) {
    try {
        std::istringstream in(text);
        boost::property_tree::ptree pt;
        boost::property_tree::read_xml(in, pt);
        return !pt.empty();
    } catch (const std::exception& e) {
        if (why) *why = e.what();
        return false;
    }
}

inline bool is_token_name(const std::string& n) {
    return n == "mi" || n == "mo" || n == "mn" || n == "mtext" || n == "ms" || n == "annotation";
}

inline std::string trim_collapse(const std::string& s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            space = !out.empty();
            continue;
        }
        if (space) out += ' ';
        space = false;
        out += c;
    }
    return out;
}

inline OTree otree_from_ptree(const std::string& name, const boost::property_tree::ptree& pt) {
    OTree t;
    t.label = name;
    if (is_token_name(name)) t.label += ":" + trim_collapse(pt.data());
    for (const auto& [k, v] : pt) {
        if (k == "<xmlattr>" || k == "<xmlcomment>") continue;
        t.kids.push_back(otree_from_ptree(k, v));
    }
    return t;
}

/// Element labels are the element name, plus ":text" for token elements.
inline OTree otree_from_xml(const std::string& text) {
    std::istringstream in(text);
    boost::property_tree::ptree pt;
    boost::property_tree::read_xml(in, pt);
    if (pt.size() != 1) throw std::runtime_error("expected one root element");
    const auto& [name, root] = *pt.begin();
    return otree_from_ptree(name, root);
}

inline OTree otree_from_mathml(const texmath::MathMLNode& n) {
    OTree t;
    t.label = n.is_token() ? n.element + ":" + n.text : n.element;
    for (const auto& c : n.children) t.kids.push_back(otree_from_mathml(c));
    return t;
}

inline texmath::MathMLNode mathml_from_otree(const OTree& t) {
    texmath::MathMLNode n(t.label);
    for (const auto& k : t.kids) n.children.push_back(mathml_from_otree(k));
    return n;
}

// ---- TED oracle 1: Tai mapping enumeration ------------------------------
//
// The edit distance equals the minimum over all valid mappings M of
// renames(M) + (|T1| - |M|) + (|T2| - |M|), where a valid mapping is a
// one-to-one node correspondence that preserves ancestry and left-to-right
// order. Exponential; only for tiny trees.

struct Flat {
    std::vector<std::string> label;  // preorder
    std::vector<int> end;            // one past the last descendant, preorder
};

inline void flatten(const OTree& t, Flat& f) {
    int me = static_cast<int>(f.label.size());
    f.label.push_back(t.label);
    f.end.push_back(0);
    for (const auto& k : t.kids) flatten(k, f);
    f.end[me] = static_cast<int>(f.label.size());
}

inline bool is_ancestor(const Flat& f, int a, int d) { return a < d && d < f.end[a]; }

inline std::size_t ted_tai(const OTree& a, const OTree& b) {
    Flat fa, fb;
    flatten(a, fa);
    flatten(b, fb);
    const int n = static_cast<int>(fa.label.size());
    const int m = static_cast<int>(fb.label.size());
    std::vector<int> map(n, -1);
    std::vector<bool> used(m, false);
    std::size_t best = std::numeric_limits<std::size_t>::max();

    std::function<void(int, std::size_t, int)> go = [&](int i, std::size_t renames, int mapped) {
        if (i == n) {
            best = std::min(best, renames + static_cast<std::size_t>(n - mapped) + static_cast<std::size_t>(m - mapped));
            return;
        }
        go(i + 1, renames, mapped);
        for (int j = 0; j < m; ++j) {
            if (used[j]) continue;
            bool ok = true;
            for (int p = 0; p < i && ok; ++p) {
                if (map[p] < 0) continue;
                // p precedes i in preorder: either p is an ancestor of i or p is to its left.
                bool anc1 = is_ancestor(fa, p, i);
                bool anc2 = is_ancestor(fb, map[p], j);
                bool left2 = map[p] < j && !anc2;
                if (anc1 != anc2) ok = false;
                else if (!anc1 && !left2) ok = false;
            }
            if (!ok) continue;
            map[i] = j;
            used[j] = true;
            go(i + 1, renames + (fa.label[i] == fb.label[j] ? 0 : 1), mapped + 1);
            used[j] = false;
            map[i] = -1;
        }
    };
    go(0, 0, 0);
    return best;
}

// ---- TED oracle 2: memoized forest recursion ----------------------------
//
// d(F, G) over postorder intervals, splitting on the rightmost roots:
//   min( d(F - v, G) + 1,
//        d(F, G - w) + 1,
//        d(F(v), G(w)) + d(F - T(v), G - T(w)) + [label(v) != label(w)] )

struct Post {
    std::vector<std::string> label;
    std::vector<int> lml;
};

inline int postorder(const OTree& t, Post& p) {
    int first = -1;
    for (const auto& k : t.kids) {
        int idx = postorder(k, p);
        if (first < 0) first = p.lml[idx];
    }
    int me = static_cast<int>(p.label.size());
    p.label.push_back(t.label);
    p.lml.push_back(first < 0 ? me : first);
    return me;
}

inline std::size_t ted_forest(const OTree& a, const OTree& b) {
    Post pa, pb;
    postorder(a, pa);
    postorder(b, pb);
    const int n = static_cast<int>(pa.label.size());
    const int m = static_cast<int>(pb.label.size());
    const int s = std::max(n, m) + 1;
    // Empty interval: hi < lo. Indices are shifted by one so -1 fits.
    std::vector<int> memo(static_cast<std::size_t>(s + 1) * (s + 1) * (s + 1) * (s + 1), -1);
    auto at = [&](int l1, int r1, int l2, int r2) -> int& {
        auto k = ((static_cast<std::size_t>(l1) * (s + 1) + (r1 + 1)) * (s + 1) + l2) * (s + 1) + (r2 + 1);
        return memo[k];
    };
    std::function<int(int, int, int, int)> d = [&](int l1, int r1, int l2, int r2) -> int {
        bool e1 = r1 < l1, e2 = r2 < l2;
        if (e1 && e2) return 0;
        if (e1) return r2 - l2 + 1;
        if (e2) return r1 - l1 + 1;
        int& slot = at(l1, r1, l2, r2);
        if (slot >= 0) return slot;
        int v = r1, w = r2;
        int best = d(l1, r1 - 1, l2, r2) + 1;
        best = std::min(best, d(l1, r1, l2, r2 - 1) + 1);
        int sub = d(pa.lml[v], v - 1, pb.lml[w], w - 1);
        int rest = d(l1, pa.lml[v] - 1, l2, pb.lml[w] - 1);
        best = std::min(best, sub + rest + (pa.label[v] == pb.label[w] ? 0 : 1));
        slot = best;
        return best;
    };
    return static_cast<std::size_t>(d(0, n - 1, 0, m - 1));
}

// ---- generators ----------------------------------------------------------

/// Random ordered tree: node i > 0 becomes the last child of a uniformly
/// chosen earlier node.
inline OTree random_tree(std::mt19937& rng, int max_nodes, const std::vector<std::string>& alphabet) {
    int n = std::uniform_int_distribution<int>(1, max_nodes)(rng);
    std::vector<std::vector<int>> kids(n);
    std::vector<std::string> labels(n);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    for (int i = 0; i < n; ++i) {
        labels[i] = alphabet[pick(rng)];
        if (i > 0) kids[std::uniform_int_distribution<int>(0, i - 1)(rng)].push_back(i);
    }
    std::function<OTree(int)> build = [&](int i) {
        OTree t{labels[i], {}};
        for (int k : kids[i]) t.kids.push_back(build(k));
        return t;
    };
    return build(0);
}

}  // namespace testsupport
