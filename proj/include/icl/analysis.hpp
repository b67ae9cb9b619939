#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "icl/corpus.hpp"
#include "icl/embedding.hpp"
#include "icl/selection.hpp"

namespace icl {

/// Mean over unordered pairs of (1 - cosine similarity), in [0, 2].
/// Needs at least two vectors with nonzero norms.
double avg_pairwise_cosine_distance(const std::vector<std::span<const double>>& vs);
double avg_pairwise_cosine_distance(const EmbeddingStore& store,
                                    const std::vector<std::string>& ids);

/// Per-strategy diversity of selected demonstration sets: for each strategy,
/// the mean over test inputs of the selected set's average pairwise cosine
/// distance between source embeddings.
struct DiversityReport {
    std::vector<std::pair<std::string, double>> per_strategy; // sorted by name
    std::size_t n_tests = 0;
    std::size_t k_shots = 0;
};

/// Groups selection records by strategy. All records must share one k >= 2
/// and every strategy must cover the same number of test inputs.
DiversityReport build_diversity_report(const std::vector<SelectionResult>& selections,
                                       const EmbeddingStore& store);

void write_report(const DiversityReport& report, std::ostream& out);
void print_report_table(const DiversityReport& report, std::ostream& out);

struct SyntheticConfig {
    std::size_t n_demos = 100;
    std::size_t dim = 16;
    std::size_t n_clusters = 4;
    double spread = 0.1;
    std::uint64_t seed = 0;
    std::size_t n_tests = 10;
    std::string lang_pair = "xx-yy";
};

struct SyntheticData {
    Corpus corpus;
    EmbeddingStore store; // demo and test embeddings together
    TestSet tests;
};

/// Clustered toy data for desk-scale runs: cluster centers drawn uniformly on
/// the unit sphere, members assigned round-robin, embeddings = center +
/// spread * gaussian noise. Byte-deterministic per seed.
SyntheticData generate_synthetic_corpus(const SyntheticConfig& config);

} // namespace icl
