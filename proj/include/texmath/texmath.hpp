#pragma once

// Umbrella header and the end-to-end conversion pipeline.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "texmath/ast.hpp"
#include "texmath/diagnostic.hpp"
#include "texmath/generator.hpp"
#include "texmath/intent.hpp"
#include "texmath/intent_expr.hpp"
#include "texmath/mathml.hpp"
#include "texmath/mhchem.hpp"
#include "texmath/parser.hpp"
#include "texmath/registry.hpp"
#include "texmath/similarity.hpp"
#include "texmath/xml.hpp"

namespace texmath {

struct ConvertOptions {
    bool chem = false;  // run the mhchem preprocessor and allow chem-only commands
    GenOptions gen;
};

struct ConvertResult {
    std::optional<MathMLNode> tree;
    std::string mathml;  // serialized tree; empty on failure
    std::vector<Diagnostic> diagnostics;  // spans refer to the original input

    bool ok() const { return tree.has_value(); }
};

/// Preprocess (optional), parse, generate and serialize. Every failure is
/// reported as a diagnostic; nothing throws.
inline ConvertResult convert(std::string_view input, const Registry& registry, const ConvertOptions& options = {}) {
    ConvertResult result;
    PreprocessResult pre;
    std::string_view source = input;
    if (options.chem) {
        try {
            pre = preprocess_mapped(input);
        } catch (const Error& e) {
            result.diagnostics.push_back(e.diagnostic());
            return result;
        }
        source = pre.text;
    }
    auto remap = [&](Diagnostic d) {
        if (options.chem) d.span = pre.map_to_input(d.span);
        return d;
    };

    ParseResult parsed = parse(source, registry, ParseOptions{options.chem});
    for (const auto& d : parsed.diagnostics()) result.diagnostics.push_back(remap(d));
    if (!parsed.ok()) return result;
    try {
        result.tree = to_mathml(*parsed.ast, registry, options.gen);
        result.mathml = serialize(*result.tree);
    } catch (const Error& e) {
        result.diagnostics.insert(result.diagnostics.begin(), remap(e.diagnostic()));
    }
    return result;
}

inline ConvertResult convert(std::string_view input, const ConvertOptions& options = {}) {
    return convert(input, default_registry(), options);
}

}  // namespace texmath
