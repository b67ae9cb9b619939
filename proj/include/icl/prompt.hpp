#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "icl/corpus.hpp"

namespace icl {

/// Deterministic prompt rendering. Placeholders: {source} and {target} fill
/// per demonstration, {src_lang}/{tgt_lang} resolve through lang_names using
/// the run's language pair. No other brace sequences are special.
struct PromptTemplate {
    std::string demo_pattern;   // must contain {source} and {target} exactly once
    std::string query_pattern;  // must contain {source} exactly once, never {target}
    std::string joiner;
    // pair tag -> (source language name, target language name)
    std::map<std::string, std::pair<std::string, std::string>> lang_names;
};

PromptTemplate default_template();

/// JSON template file; absent fields fall back to the defaults.
PromptTemplate load_template(const std::string& path);

/// Throws DataError when placeholder counts are off.
void validate_template(const PromptTemplate& tmpl);

/// Names for a pair tag. Unknown tags split on '-' and use the raw pieces,
/// so "xx-yy" renders as languages "xx" and "yy".
std::pair<std::string, std::string> language_names(const PromptTemplate& tmpl,
                                                   const std::string& lang_pair);

std::string render_demonstrations(const PromptTemplate& tmpl, const std::string& lang_pair,
                                  const std::vector<const Demonstration*>& demos);

/// demonstrations + joiner + query block; the query block alone when demos is
/// empty. Always ends at the target-side cue.
std::string render_prompt(const PromptTemplate& tmpl, const std::string& lang_pair,
                          const std::vector<const Demonstration*>& demos,
                          const TestInput& x);

inline constexpr std::size_t kDefaultMaxPromptChars = 65536;

/// Template plus the per-run rendering settings the selection engine needs.
struct PromptContext {
    const PromptTemplate* tmpl = nullptr;
    std::string lang_pair;
    std::size_t max_prompt_chars = kDefaultMaxPromptChars;

    std::string demos_text(const std::vector<const Demonstration*>& demos) const;
    /// Renders the full prompt and enforces the character guard, naming the
    /// test id on overflow.
    std::string prompt_text(const std::vector<const Demonstration*>& demos,
                            const TestInput& x) const;
};

} // namespace icl
