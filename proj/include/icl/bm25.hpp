#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "icl/corpus.hpp"

namespace icl {

/// Lowercased word tokens split on non-alphanumeric codepoints; CJK text
/// falls back to one token per codepoint. No stemming, no stopwords.
std::vector<std::string> tokenize(std::string_view text);

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

/// Okapi BM25 over demonstration source sentences.
/// idf(t) = ln(1 + (N - n_t + 0.5) / (n_t + 0.5)), which keeps scores
/// non-negative. Repeated query terms count once (set semantics).
class Bm25Index {
public:
    struct Posting {
        std::uint32_t doc;
        std::uint32_t tf;
    };
    struct ScoredDoc {
        std::size_t ordinal;
        double score;
    };

    static Bm25Index build(const Corpus& corpus, Bm25Params params = {});

    double score(std::string_view query, std::size_t doc_ordinal) const;
    double score_terms(const std::vector<std::string>& distinct_terms,
                       std::size_t doc_ordinal) const;

    /// Top-k ordinals by descending score, ties by ascending ordinal.
    /// k greater than the corpus returns the full ranking.
    std::vector<std::size_t> topk(std::string_view query, std::size_t k) const;
    std::vector<ScoredDoc> topk_scored(std::string_view query, std::size_t k) const;

    std::size_t n_docs() const { return doc_lengths_.size(); }
    double avg_doc_length() const { return avg_doc_length_; }
    const std::vector<std::size_t>& doc_lengths() const { return doc_lengths_; }
    const Bm25Params& params() const { return params_; }

    /// Postings for one term, ordered by ascending doc ordinal; nullptr when
    /// the term indexes nothing.
    const std::vector<Posting>* postings(const std::string& term) const;

    /// Query tokens deduplicated to first occurrence, in query order.
    static std::vector<std::string> distinct_query_terms(std::string_view query);

private:
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::vector<std::size_t> doc_lengths_;
    double avg_doc_length_ = 0.0;
    Bm25Params params_;
};

} // namespace icl
