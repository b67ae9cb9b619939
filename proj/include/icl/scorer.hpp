#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace icl {

/// Total negative log-likelihood of a text (natural log, summed over tokens).
struct ScoreResponse {
    double nll = 0.0;
    std::int64_t token_count = 0;

    bool operator==(const ScoreResponse&) const = default;
};

/// Language-model scoring abstraction. Implementations must be deterministic
/// per text: equal texts yield equal scores, so results may be cached.
class ScorerInterface {
public:
    virtual ~ScorerInterface() = default;

    virtual ScoreResponse score_nll(const std::string& text) = 0;

    /// Scores many texts; results are positional, independent of evaluation
    /// order. The default loops over score_nll.
    virtual std::vector<ScoreResponse> score_batch(const std::vector<std::string>& texts);
};

/// Cross-entropy delta of a prompt against its demonstrations-only prefix:
/// nll(prompt_text) - nll(demos_text). Any sign is possible.
double cone_delta(ScorerInterface& scorer, const std::string& prompt_text,
                  const std::string& demos_text);

/// Table- or rule-backed scorer for tests and desk-scale runs. A table hit
/// wins; otherwise the rule applies; with neither, scoring is an error.
class MockScorer : public ScorerInterface {
public:
    static MockScorer from_table(std::map<std::string, double> table);
    /// nll = rate * codepoint count.
    static MockScorer char_count(double rate);
    /// nll = scale * u with u in [0,1) hashed deterministically from the text.
    static MockScorer hashed(std::uint64_t seed, double scale = 10.0);

    /// JSON file: {"table": {text: nll, ...}, "rule": {"kind": "char_count",
    /// "rate": r} | {"kind": "hash", "seed": s, "scale": c}}. At least one of
    /// the two keys must be present.
    static MockScorer load(const std::string& path);

    ScoreResponse score_nll(const std::string& text) override;

private:
    enum class Rule { none, char_count, hash };

    MockScorer() = default;

    std::map<std::string, double> table_;
    Rule rule_ = Rule::none;
    double rate_ = 0.0;
    std::uint64_t seed_ = 0;
    double scale_ = 10.0;
};

/// Client for an NLL scoring server:
///   POST {endpoint}/v1/nll        {"text": ...} -> {"nll": r, "token_count": n}
///   POST {endpoint}/v1/nll_batch  {"texts": [...]} -> {"results": [...]} in order
/// Batches are chunked to max_in_flight texts per request.
class HttpScorer : public ScorerInterface {
public:
    struct Options {
        std::string endpoint;
        int max_in_flight = 8;
        double timeout_seconds = 30.0;
        int retries = 2;
    };

    explicit HttpScorer(Options options);
    ~HttpScorer() override;

    HttpScorer(const HttpScorer&) = delete;
    HttpScorer& operator=(const HttpScorer&) = delete;

    ScoreResponse score_nll(const std::string& text) override;
    std::vector<ScoreResponse> score_batch(const std::vector<std::string>& texts) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Exact-text memo in front of any scorer. Never changes results, only cost.
class CachingScorer : public ScorerInterface {
public:
    explicit CachingScorer(ScorerInterface& inner) : inner_(inner) {}

    ScoreResponse score_nll(const std::string& text) override;
    std::vector<ScoreResponse> score_batch(const std::vector<std::string>& texts) override;

    std::size_t hits() const;
    std::size_t misses() const;

private:
    ScorerInterface& inner_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, ScoreResponse> cache_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

} // namespace icl
