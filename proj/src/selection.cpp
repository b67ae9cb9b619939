#include "icl/selection.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iostream>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "icl/errors.hpp"
#include "icl/kernels.hpp"
#include "icl/rng.hpp"

namespace icl {

namespace {

using ordered_json = nlohmann::ordered_json;

// Lexicographic successor of a k-combination of {0..n-1}.
bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    const std::size_t k = idx.size();
    for (std::size_t i = k; i-- > 0;) {
        if (idx[i] < n - k + i) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    return false;
}

// C(n, k), saturating just above `cap`.
std::size_t combinations_capped(std::size_t n, std::size_t k, std::size_t cap) {
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    std::size_t result = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        const double approx =
            static_cast<double>(result) * static_cast<double>(n - k + i) / static_cast<double>(i);
        if (approx > 2.0 * static_cast<double>(cap)) {
            return cap + 1;
        }
        result = result * (n - k + i) / i;
    }
    return result;
}

std::vector<const Demonstration*> gather_demos(const Corpus& corpus,
                                               std::span<const Candidate> candidates,
                                               const std::vector<std::size_t>& positions) {
    std::vector<const Demonstration*> demos;
    demos.reserve(positions.size());
    for (const std::size_t pos : positions) {
        demos.push_back(&corpus.at(candidates[pos].ordinal));
    }
    return demos;
}

// Scores the prompt/demos text pair for each extension; on a data error,
// re-scores serially to name the offending candidate.
std::vector<ScoreResponse> score_round(ScorerInterface& scorer, const Corpus& corpus,
                                       std::span<const Candidate> candidates,
                                       const std::vector<std::size_t>& remaining,
                                       const std::vector<std::string>& texts,
                                       const TestInput& x) {
    try {
        return scorer.score_batch(texts);
    } catch (const TransportError& e) {
        throw TransportError(std::string(e.what()) + " (while scoring test \"" + x.id + "\")");
    } catch (const DataError&) {
        for (std::size_t c = 0; c < remaining.size(); ++c) {
            try {
                scorer.score_nll(texts[2 * c]);
                scorer.score_nll(texts[2 * c + 1]);
            } catch (const std::exception& inner) {
                const auto& id = corpus.at(candidates[remaining[c]].ordinal).id;
                throw DataError("scoring failed for candidate \"" + id + "\" (test \"" +
                                x.id + "\"): " + inner.what());
            }
        }
        throw;
    }
}

} // namespace

std::string to_string(Strategy strategy) {
    switch (strategy) {
        case Strategy::random: return "random";
        case Strategy::bm25: return "bm25";
        case Strategy::topk: return "topk";
        case Strategy::cone: return "cone";
        case Strategy::diversecone: return "diversecone";
    }
    throw UsageError("unknown strategy");
}

Strategy strategy_from_string(const std::string& name) {
    if (name == "random") return Strategy::random;
    if (name == "bm25") return Strategy::bm25;
    if (name == "topk") return Strategy::topk;
    if (name == "cone") return Strategy::cone;
    if (name == "diversecone") return Strategy::diversecone;
    throw UsageError("unknown strategy \"" + name +
                     "\" (expected random|bm25|topk|cone|diversecone)");
}

std::string to_string(Stage stage) {
    switch (stage) {
        case Stage::topk: return "topk";
        case Stage::cone: return "cone";
        case Stage::diversity: return "diversity";
        case Stage::random: return "random";
        case Stage::bm25: return "bm25";
    }
    throw UsageError("unknown stage");
}

Stage stage_from_string(const std::string& name) {
    if (name == "topk") return Stage::topk;
    if (name == "cone") return Stage::cone;
    if (name == "diversity") return Stage::diversity;
    if (name == "random") return Stage::random;
    if (name == "bm25") return Stage::bm25;
    throw DataError("unknown selection stage \"" + name + "\"");
}

std::vector<Candidate> topk_select(const EmbeddingStore& store, const Corpus& corpus,
                                   const TestInput& x, std::size_t K) {
    if (K == 0) {
        throw UsageError("top-k retrieval requires K >= 1");
    }
    if (K > corpus.size()) {
        std::cerr << "warning: top-K pool " << K << " clamped to corpus size "
                  << corpus.size() << "\n";
        K = corpus.size();
    }
    std::vector<std::size_t> rows(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        rows[i] = store.row_index(corpus.at(i).id);
    }
    const kernels::MatrixView matrix{store.data(), store.size(), store.dim()};
    std::vector<double> scores(corpus.size());
    try {
        kernels::cosine_scores(matrix, rows, store.vector_of(x.id), scores);
    } catch (const DataError& e) {
        throw DataError(std::string(e.what()) + " (test \"" + x.id + "\")");
    }
    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&scores](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) {
            return scores[a] > scores[b];
        }
        return a < b;
    });
    std::vector<Candidate> out;
    out.reserve(K);
    for (std::size_t i = 0; i < K; ++i) {
        out.push_back({order[i], scores[order[i]]});
    }
    return out;
}

std::vector<ChosenDemo> random_select(const Corpus& corpus, std::size_t k,
                                      std::uint64_t seed) {
    if (k > corpus.size()) {
        throw UsageError("cannot sample " + std::to_string(k) + " demonstrations from a corpus of " +
                         std::to_string(corpus.size()));
    }
    std::vector<std::size_t> ordinals(corpus.size());
    std::iota(ordinals.begin(), ordinals.end(), std::size_t{0});
    rng::Engine engine(seed);
    std::vector<ChosenDemo> out;
    out.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t pick = j + rng::bounded(engine, ordinals.size() - j);
        std::swap(ordinals[j], ordinals[pick]);
        out.push_back({corpus.at(ordinals[j]).id, Stage::random, 0.0});
    }
    return out;
}

std::vector<ChosenDemo> bm25_select(const Bm25Index& index, const Corpus& corpus,
                                    const TestInput& x, std::size_t k) {
    std::vector<ChosenDemo> out;
    for (const auto& scored : index.topk_scored(x.source, k)) {
        out.push_back({corpus.at(scored.ordinal).id, Stage::bm25, scored.score});
    }
    return out;
}

std::vector<ChosenDemo> cone_select(ScorerInterface& scorer, const PromptContext& prompts,
                                    const Corpus& corpus, std::span<const Candidate> candidates,
                                    const TestInput& x, std::size_t k) {
    if (candidates.empty()) {
        throw UsageError("contrastive selection requires a non-empty candidate pool");
    }
    if (k > candidates.size()) {
        throw UsageError("cannot pick " + std::to_string(k) + " shots from " +
                         std::to_string(candidates.size()) + " candidates");
    }
    std::vector<std::size_t> selected;
    std::vector<std::size_t> remaining(candidates.size());
    std::iota(remaining.begin(), remaining.end(), std::size_t{0});
    std::vector<ChosenDemo> out;
    out.reserve(k);
    for (std::size_t round = 0; round < k; ++round) {
        std::vector<std::string> texts;
        texts.reserve(2 * remaining.size());
        for (const std::size_t pos : remaining) {
            auto positions = selected;
            positions.push_back(pos);
            const auto demos = gather_demos(corpus, candidates, positions);
            texts.push_back(prompts.prompt_text(demos, x));
            texts.push_back(prompts.demos_text(demos));
        }
        const auto scores = score_round(scorer, corpus, candidates, remaining, texts, x);
        std::size_t best = 0;
        double best_delta = scores[0].nll - scores[1].nll;
        for (std::size_t c = 1; c < remaining.size(); ++c) {
            const double delta = scores[2 * c].nll - scores[2 * c + 1].nll;
            if (delta < best_delta) {
                best_delta = delta;
                best = c;
            }
        }
        const std::size_t pos = remaining[best];
        out.push_back({corpus.at(candidates[pos].ordinal).id, Stage::cone, best_delta});
        selected.push_back(pos);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    }
    return out;
}

std::vector<ChosenDemo> cone_select_bruteforce(ScorerInterface& scorer,
                                               const PromptContext& prompts,
                                               const Corpus& corpus,
                                               std::span<const Candidate> candidates,
                                               const TestInput& x, std::size_t k) {
    if (candidates.empty()) {
        throw UsageError("contrastive selection requires a non-empty candidate pool");
    }
    if (k == 0 || k > candidates.size()) {
        throw UsageError("exact search needs 1 <= k <= candidate count");
    }
    const std::size_t subsets = combinations_capped(candidates.size(), k, kExactSearchBudget);
    if (subsets > kExactSearchBudget) {
        throw UsageError("C(" + std::to_string(candidates.size()) + ", " + std::to_string(k) +
                         ") exceeds exact-search budget of " + std::to_string(kExactSearchBudget));
    }

    std::vector<std::vector<std::size_t>> all_subsets;
    all_subsets.reserve(subsets);
    std::vector<std::string> texts;
    texts.reserve(2 * subsets);
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    do {
        const auto demos = gather_demos(corpus, candidates, idx);
        texts.push_back(prompts.prompt_text(demos, x));
        texts.push_back(prompts.demos_text(demos));
        all_subsets.push_back(idx);
    } while (next_combination(idx, candidates.size()));

    std::vector<std::size_t> dummy;
    const auto scores = score_round(scorer, corpus, candidates, dummy, texts, x);
    std::size_t best_subset = 0;
    double best_delta = scores[0].nll - scores[1].nll;
    for (std::size_t s = 1; s < all_subsets.size(); ++s) {
        const double delta = scores[2 * s].nll - scores[2 * s + 1].nll;
        if (delta < best_delta) { // strict: ties keep the lexicographically smallest subset
            best_delta = delta;
            best_subset = s;
        }
    }
    std::vector<ChosenDemo> out;
    out.reserve(k);
    for (const std::size_t pos : all_subsets[best_subset]) {
        out.push_back({corpus.at(candidates[pos].ordinal).id, Stage::cone, best_delta});
    }
    return out;
}

std::vector<ChosenDemo> diversecone_select(const EmbeddingStore& store,
                                           ScorerInterface& scorer,
                                           const PromptContext& prompts, const Corpus& corpus,
                                           std::span<const Candidate> candidates,
                                           const TestInput& x, std::size_t k,
                                           std::size_t cone_shots, bool recenter,
                                           bool exact) {
    if (cone_shots == 0 || cone_shots > k) {
        throw UsageError("diversecone requires 1 <= cone_shots <= k");
    }
    if (k > candidates.size()) {
        throw UsageError("cannot pick " + std::to_string(k) + " shots from " +
                         std::to_string(candidates.size()) + " candidates");
    }
    auto chosen = exact
        ? cone_select_bruteforce(scorer, prompts, corpus, candidates, x, cone_shots)
        : cone_select(scorer, prompts, corpus, candidates, x, cone_shots);

    std::vector<std::size_t> remaining;
    for (std::size_t pos = 0; pos < candidates.size(); ++pos) {
        const auto& id = corpus.at(candidates[pos].ordinal).id;
        const bool taken = std::any_of(chosen.begin(), chosen.end(),
                                       [&id](const ChosenDemo& c) { return c.id == id; });
        if (!taken) {
            remaining.push_back(pos);
        }
    }

    std::vector<std::span<const double>> selected_vecs;
    for (const auto& c : chosen) {
        selected_vecs.push_back(store.vector_of(c.id));
    }
    const std::vector<double> cone_centroid =
        k > cone_shots ? centroid(selected_vecs) : std::vector<double>{};

    const kernels::MatrixView matrix{store.data(), store.size(), store.dim()};
    for (std::size_t round = cone_shots; round < k; ++round) {
        const std::vector<double> center =
            recenter ? centroid(selected_vecs) : cone_centroid;
        std::vector<std::size_t> rows;
        rows.reserve(remaining.size());
        for (const std::size_t pos : remaining) {
            rows.push_back(store.row_index(corpus.at(candidates[pos].ordinal).id));
        }
        std::vector<double> distances(remaining.size());
        kernels::euclidean_distances(matrix, rows, center, distances);
        std::size_t best = 0;
        for (std::size_t c = 1; c < remaining.size(); ++c) {
            if (distances[c] > distances[best]) { // ties keep the earliest position
                best = c;
            }
        }
        const std::size_t pos = remaining[best];
        const auto& id = corpus.at(candidates[pos].ordinal).id;
        chosen.push_back({id, Stage::diversity, distances[best]});
        selected_vecs.push_back(store.vector_of(id));
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    }
    return chosen;
}

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw UsageError(message);
    }
}

void validate_run(const SelectionInputs& inputs, const SelectionConfig& config) {
    require(inputs.corpus != nullptr, "selection requires a corpus");
    require(config.k_shots >= 1, "k must be >= 1");
    require(config.k_shots <= inputs.corpus->size(),
            "k = " + std::to_string(config.k_shots) + " exceeds corpus size " +
                std::to_string(inputs.corpus->size()));
    const bool needs_embeddings = config.strategy == Strategy::topk ||
                                  config.strategy == Strategy::cone ||
                                  config.strategy == Strategy::diversecone;
    if (needs_embeddings) {
        require(inputs.store != nullptr, "this strategy requires embeddings");
        const std::size_t pool = std::min(config.topk_pool, inputs.corpus->size());
        require(pool >= 1, "top-K pool must be >= 1");
        require(config.k_shots <= pool,
                "k = " + std::to_string(config.k_shots) + " exceeds the top-K pool of " +
                    std::to_string(pool));
    }
    if (config.strategy == Strategy::bm25) {
        require(inputs.bm25 != nullptr, "bm25 strategy requires a built index");
    }
    if (config.strategy == Strategy::cone || config.strategy == Strategy::diversecone) {
        require(inputs.scorer != nullptr, "this strategy requires a scorer");
        require(inputs.prompts != nullptr, "this strategy requires a prompt template");
    }
    if (config.strategy == Strategy::diversecone) {
        require(config.cone_shots >= 1 && config.cone_shots <= config.k_shots,
                "diversecone requires 1 <= cone_shots <= k");
    }
}

} // namespace

SelectionResult select_for_test(const SelectionInputs& inputs, const SelectionConfig& config,
                                const TestInput& x) {
    validate_run(inputs, config);
    const Corpus& corpus = *inputs.corpus;
    SelectionResult result;
    result.test_id = x.id;
    result.strategy = config.strategy;
    switch (config.strategy) {
        case Strategy::random: {
            // per-test stream: mixing the test id keeps selections independent
            // of test order while staying reproducible from the run seed
            const std::uint64_t seed = config.seed ^ rng::fnv1a64(x.id);
            result.chosen = random_select(corpus, config.k_shots, seed);
            break;
        }
        case Strategy::bm25:
            result.chosen = bm25_select(*inputs.bm25, corpus, x, config.k_shots);
            break;
        case Strategy::topk: {
            const auto candidates = topk_select(*inputs.store, corpus, x, config.topk_pool);
            for (std::size_t i = 0; i < config.k_shots; ++i) {
                result.chosen.push_back(
                    {corpus.at(candidates[i].ordinal).id, Stage::topk, candidates[i].similarity});
            }
            break;
        }
        case Strategy::cone: {
            const auto candidates = topk_select(*inputs.store, corpus, x, config.topk_pool);
            result.chosen = config.exact_cone
                ? cone_select_bruteforce(*inputs.scorer, *inputs.prompts, corpus, candidates,
                                         x, config.k_shots)
                : cone_select(*inputs.scorer, *inputs.prompts, corpus, candidates, x,
                              config.k_shots);
            break;
        }
        case Strategy::diversecone: {
            const auto candidates = topk_select(*inputs.store, corpus, x, config.topk_pool);
            result.chosen = diversecone_select(*inputs.store, *inputs.scorer, *inputs.prompts,
                                               corpus, candidates, x, config.k_shots,
                                               config.cone_shots, config.recenter,
                                               config.exact_cone);
            break;
        }
    }
    return result;
}

std::vector<SelectionResult> run_selection(const SelectionInputs& inputs,
                                           const SelectionConfig& config,
                                           const TestSet& tests) {
    validate_run(inputs, config);
    SelectionConfig effective = config;
    if (inputs.store != nullptr && effective.topk_pool > inputs.corpus->size()) {
        std::cerr << "warning: top-K pool " << effective.topk_pool
                  << " clamped to corpus size " << inputs.corpus->size() << "\n";
        effective.topk_pool = inputs.corpus->size();
    }
    const auto n = static_cast<std::int64_t>(tests.inputs.size());
    std::vector<SelectionResult> results(tests.inputs.size());
    std::vector<std::exception_ptr> failures(tests.inputs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            results[i] = select_for_test(inputs, effective, tests.inputs[i]);
        } catch (...) {
            failures[i] = std::current_exception();
        }
    }
    // report the first failure in test order, independent of scheduling
    for (const auto& failure : failures) {
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
    return results;
}

void write_selections(const std::vector<SelectionResult>& results, std::ostream& out) {
    for (const auto& result : results) {
        ordered_json record;
        record["test_id"] = result.test_id;
        record["strategy"] = to_string(result.strategy);
        record["chosen"] = ordered_json::array();
        for (const auto& chosen : result.chosen) {
            ordered_json item;
            item["id"] = chosen.id;
            item["stage"] = to_string(chosen.stage);
            item["score"] = chosen.score;
            record["chosen"].push_back(std::move(item));
        }
        out << record.dump() << '\n';
    }
}

std::vector<SelectionResult> read_selections(std::istream& in, const std::string& path) {
    std::vector<SelectionResult> results;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        bool blank = true;
        for (const char c : line) {
            if (!std::isspace(static_cast<unsigned char>(c))) {
                blank = false;
                break;
            }
        }
        if (blank) {
            continue;
        }
        ordered_json record;
        try {
            record = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": malformed selection record: " + e.what());
        }
        if (!record.is_object() || !record.contains("test_id") || !record.contains("strategy") ||
            !record.contains("chosen") || !record["chosen"].is_array()) {
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": selection record needs test_id, strategy and chosen[]");
        }
        SelectionResult result;
        result.test_id = record["test_id"].get<std::string>();
        try {
            result.strategy = strategy_from_string(record["strategy"].get<std::string>());
        } catch (const UsageError& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        for (const auto& item : record["chosen"]) {
            if (!item.is_object() || !item.contains("id") || !item.contains("stage") ||
                !item.contains("score")) {
                throw DataError(path + ":" + std::to_string(line_no) +
                                ": chosen entries need id, stage and score");
            }
            result.chosen.push_back({item["id"].get<std::string>(),
                                     stage_from_string(item["stage"].get<std::string>()),
                                     item["score"].get<double>()});
        }
        results.push_back(std::move(result));
    }
    return results;
}

} // namespace icl
