#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "icl/bm25.hpp"
#include "icl/corpus.hpp"
#include "icl/embedding.hpp"
#include "icl/prompt.hpp"
#include "icl/scorer.hpp"

namespace icl {

enum class Strategy { random, bm25, topk, cone, diversecone };
enum class Stage { topk, cone, diversity, random, bm25 };

std::string to_string(Strategy strategy);
Strategy strategy_from_string(const std::string& name);
std::string to_string(Stage stage);
Stage stage_from_string(const std::string& name);

struct SelectionConfig {
    Strategy strategy = Strategy::topk;
    std::size_t k_shots = 3;       // demonstrations per prompt
    std::size_t topk_pool = 32;    // retrieval pool size, clamped to the corpus
    std::size_t cone_shots = 1;    // contrastive picks inside diversecone
    std::uint64_t seed = 0;        // random strategy only
    bool recenter = true;          // recompute the centroid after each diversity pick
    bool exact_cone = false;       // exhaustive subset search instead of greedy
};

struct ChosenDemo {
    std::string id;
    Stage stage = Stage::topk;
    double score = 0.0;
};

struct SelectionResult {
    std::string test_id;
    Strategy strategy = Strategy::topk;
    std::vector<ChosenDemo> chosen; // prompt order; length k_shots; ids distinct
};

/// One retrieval-pool entry: a corpus ordinal plus its cosine similarity to
/// the test input. Candidate order is the tie-break order everywhere below.
struct Candidate {
    std::size_t ordinal = 0;
    double similarity = 0.0;
};

/// The K most cosine-similar demonstrations, descending, ties by ascending
/// corpus ordinal. K larger than the corpus is clamped with a warning.
std::vector<Candidate> topk_select(const EmbeddingStore& store, const Corpus& corpus,
                                   const TestInput& x, std::size_t K);

/// k distinct demonstrations, uniform without replacement. Reproducible:
/// mt19937_64 seeded with `seed` drives a partial Fisher-Yates shuffle whose
/// bounded draws use plain modulo.
std::vector<ChosenDemo> random_select(const Corpus& corpus, std::size_t k,
                                      std::uint64_t seed);

std::vector<ChosenDemo> bm25_select(const Bm25Index& index, const Corpus& corpus,
                                    const TestInput& x, std::size_t k);

/// Greedy contrastive selection: k rounds, each keeping the extension with
/// the minimal prompt-vs-demonstrations NLL delta. Ties go to the earliest
/// candidate position.
std::vector<ChosenDemo> cone_select(ScorerInterface& scorer, const PromptContext& prompts,
                                    const Corpus& corpus, std::span<const Candidate> candidates,
                                    const TestInput& x, std::size_t k);

inline constexpr std::size_t kExactSearchBudget = 10000;

/// Exact argmin of the delta over all k-subsets (demonstrations keep candidate
/// order inside each subset; ties pick the lexicographically smallest subset).
/// Test oracle for cone_select and the engine's exact mode; refuses when
/// C(n, k) exceeds kExactSearchBudget.
std::vector<ChosenDemo> cone_select_bruteforce(ScorerInterface& scorer,
                                               const PromptContext& prompts,
                                               const Corpus& corpus,
                                               std::span<const Candidate> candidates,
                                               const TestInput& x, std::size_t k);

/// cone_shots contrastive picks, then k - cone_shots diversity picks: each
/// round takes the remaining candidate farthest (L2) from the centroid of the
/// source embeddings selected so far. With recenter=false the centroid stays
/// the one computed from the contrastive picks.
std::vector<ChosenDemo> diversecone_select(const EmbeddingStore& store,
                                           ScorerInterface& scorer,
                                           const PromptContext& prompts, const Corpus& corpus,
                                           std::span<const Candidate> candidates,
                                           const TestInput& x, std::size_t k,
                                           std::size_t cone_shots, bool recenter,
                                           bool exact = false);

/// Everything a full selection run needs; entries unused by the strategy may
/// stay null and are validated up front.
struct SelectionInputs {
    const Corpus* corpus = nullptr;
    const EmbeddingStore* store = nullptr;
    const Bm25Index* bm25 = nullptr;
    ScorerInterface* scorer = nullptr;
    const PromptContext* prompts = nullptr;
};

SelectionResult select_for_test(const SelectionInputs& inputs, const SelectionConfig& config,
                                const TestInput& x);

/// Runs selection for every test input. Test inputs are processed in
/// parallel; results always come back in test order.
std::vector<SelectionResult> run_selection(const SelectionInputs& inputs,
                                           const SelectionConfig& config,
                                           const TestSet& tests);

void write_selections(const std::vector<SelectionResult>& results, std::ostream& out);
std::vector<SelectionResult> read_selections(std::istream& in, const std::string& path);

} // namespace icl
