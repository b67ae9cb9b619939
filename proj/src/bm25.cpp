#include "icl/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "icl/errors.hpp"
#include "icl/utf8.hpp"

namespace icl {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (const char32_t cp : utf8::decode(text)) {
        if (utf8::is_cjk(cp)) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
            tokens.push_back(utf8::encode(utf8::fold(cp)));
        } else if (utf8::is_word(cp)) {
            current += utf8::encode(utf8::fold(cp));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

Bm25Index Bm25Index::build(const Corpus& corpus, Bm25Params params) {
    if (corpus.size() == 0) {
        throw DataError("cannot build BM25 index over an empty corpus");
    }
    if (params.k1 <= 0.0) {
        throw UsageError("bm25 k1 must be > 0");
    }
    if (params.b < 0.0 || params.b > 1.0) {
        throw UsageError("bm25 b must be in [0, 1]");
    }
    Bm25Index index;
    index.params_ = params;
    index.doc_lengths_.reserve(corpus.size());
    std::size_t total_tokens = 0;
    for (std::size_t doc = 0; doc < corpus.size(); ++doc) {
        const auto tokens = tokenize(corpus.at(doc).source);
        index.doc_lengths_.push_back(tokens.size());
        total_tokens += tokens.size();
        std::unordered_map<std::string, std::uint32_t> tf;
        for (const auto& token : tokens) {
            ++tf[token];
        }
        for (auto& [term, count] : tf) {
            // docs arrive in corpus order, so postings stay sorted by ordinal
            index.postings_[term].push_back(
                {static_cast<std::uint32_t>(doc), count});
        }
    }
    index.avg_doc_length_ =
        static_cast<double>(total_tokens) / static_cast<double>(corpus.size());
    return index;
}

std::vector<std::string> Bm25Index::distinct_query_terms(std::string_view query) {
    std::vector<std::string> distinct;
    std::unordered_set<std::string> seen;
    for (auto& token : tokenize(query)) {
        if (seen.insert(token).second) {
            distinct.push_back(std::move(token));
        }
    }
    return distinct;
}

const std::vector<Bm25Index::Posting>* Bm25Index::postings(const std::string& term) const {
    const auto it = postings_.find(term);
    return it == postings_.end() ? nullptr : &it->second;
}

double Bm25Index::score_terms(const std::vector<std::string>& distinct_terms,
                              std::size_t doc_ordinal) const {
    if (doc_ordinal >= doc_lengths_.size()) {
        throw DataError("document ordinal " + std::to_string(doc_ordinal) +
                        " out of range for BM25 index of " +
                        std::to_string(doc_lengths_.size()) + " docs");
    }
    const double n_total = static_cast<double>(doc_lengths_.size());
    const double len = static_cast<double>(doc_lengths_[doc_ordinal]);
    double score = 0.0;
    for (const auto& term : distinct_terms) {
        const auto* plist = postings(term);
        if (plist == nullptr) {
            continue;
        }
        const auto it = std::lower_bound(
            plist->begin(), plist->end(), doc_ordinal,
            [](const Posting& p, std::size_t doc) { return p.doc < doc; });
        if (it == plist->end() || it->doc != doc_ordinal) {
            continue;
        }
        const double tf = static_cast<double>(it->tf);
        const double df = static_cast<double>(plist->size());
        const double idf = std::log1p((n_total - df + 0.5) / (df + 0.5));
        const double norm = params_.k1 * (1.0 - params_.b +
                                          params_.b * len / avg_doc_length_);
        score += idf * tf * (params_.k1 + 1.0) / (tf + norm);
    }
    return score;
}

double Bm25Index::score(std::string_view query, std::size_t doc_ordinal) const {
    return score_terms(distinct_query_terms(query), doc_ordinal);
}

std::vector<Bm25Index::ScoredDoc> Bm25Index::topk_scored(std::string_view query,
                                                         std::size_t k) const {
    if (k == 0) {
        throw UsageError("bm25 top-k requires k >= 1");
    }
    const auto terms = distinct_query_terms(query);
    const std::size_t n = doc_lengths_.size();
    std::vector<double> scores(n, 0.0);
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (count >= 256)
    for (std::int64_t doc = 0; doc < count; ++doc) {
        scores[doc] = score_terms(terms, static_cast<std::size_t>(doc));
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&scores](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) {
            return scores[a] > scores[b];
        }
        return a < b;
    });
    const std::size_t take = std::min(k, n);
    std::vector<ScoredDoc> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        out.push_back({order[i], scores[order[i]]});
    }
    return out;
}

std::vector<std::size_t> Bm25Index::topk(std::string_view query, std::size_t k) const {
    std::vector<std::size_t> out;
    for (const auto& scored : topk_scored(query, k)) {
        out.push_back(scored.ordinal);
    }
    return out;
}

} // namespace icl
