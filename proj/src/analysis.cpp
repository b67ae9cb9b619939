#include "icl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "icl/errors.hpp"
#include "icl/kernels.hpp"
#include "icl/rng.hpp"

namespace icl {

namespace {

using ordered_json = nlohmann::ordered_json;

} // namespace

double avg_pairwise_cosine_distance(const std::vector<std::span<const double>>& vs) {
    if (vs.size() < 2) {
        throw DataError("average pairwise cosine distance needs at least 2 vectors");
    }
    const std::size_t dim = vs.front().size();
    std::vector<double> flat;
    flat.reserve(vs.size() * dim);
    for (const auto& v : vs) {
        if (v.size() != dim) {
            throw DataError("vector dimension mismatch in pairwise distance");
        }
        flat.insert(flat.end(), v.begin(), v.end());
    }
    std::vector<std::size_t> rows(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) {
        rows[i] = i;
    }
    const kernels::MatrixView matrix{flat.data(), vs.size(), dim};
    return kernels::pairwise_cosine_distance_mean(matrix, rows);
}

double avg_pairwise_cosine_distance(const EmbeddingStore& store,
                                    const std::vector<std::string>& ids) {
    if (ids.size() < 2) {
        throw DataError("average pairwise cosine distance needs at least 2 vectors");
    }
    std::vector<std::size_t> rows;
    rows.reserve(ids.size());
    for (const auto& id : ids) {
        rows.push_back(store.row_index(id));
    }
    const kernels::MatrixView matrix{store.data(), store.size(), store.dim()};
    return kernels::pairwise_cosine_distance_mean(matrix, rows);
}

DiversityReport build_diversity_report(const std::vector<SelectionResult>& selections,
                                       const EmbeddingStore& store) {
    if (selections.empty()) {
        throw DataError("no selection records to report on");
    }
    const std::size_t k = selections.front().chosen.size();
    if (k < 2) {
        throw UsageError("diversity undefined for k < 2");
    }
    std::map<std::string, std::vector<double>> per_strategy;
    for (const auto& selection : selections) {
        if (selection.chosen.size() != k) {
            throw DataError("selection records mix shot counts: test \"" + selection.test_id +
                            "\" has " + std::to_string(selection.chosen.size()) +
                            " picks, expected " + std::to_string(k));
        }
        std::vector<std::string> ids;
        ids.reserve(selection.chosen.size());
        for (const auto& chosen : selection.chosen) {
            ids.push_back(chosen.id);
        }
        per_strategy[to_string(selection.strategy)].push_back(
            avg_pairwise_cosine_distance(store, ids));
    }
    const std::size_t n_tests = per_strategy.begin()->second.size();
    DiversityReport report;
    report.n_tests = n_tests;
    report.k_shots = k;
    for (const auto& [strategy, distances] : per_strategy) {
        if (distances.size() != n_tests) {
            throw DataError("strategy \"" + strategy + "\" covers " +
                            std::to_string(distances.size()) + " tests, expected " +
                            std::to_string(n_tests));
        }
        double total = 0.0;
        for (const double d : distances) {
            total += d;
        }
        report.per_strategy.emplace_back(strategy, total / static_cast<double>(n_tests));
    }
    return report;
}

void write_report(const DiversityReport& report, std::ostream& out) {
    for (const auto& [strategy, distance] : report.per_strategy) {
        ordered_json record;
        record["strategy"] = strategy;
        record["avg_pairwise_cosine_distance"] = distance;
        record["n_tests"] = report.n_tests;
        record["k_shots"] = report.k_shots;
        out << record.dump() << '\n';
    }
}

void print_report_table(const DiversityReport& report, std::ostream& out) {
    std::size_t width = std::string("strategy").size();
    for (const auto& [strategy, _] : report.per_strategy) {
        width = std::max(width, strategy.size());
    }
    out << "strategy";
    out << std::string(width - 8 + 2, ' ') << "avg_pairwise_cosine_distance\n";
    for (const auto& [strategy, distance] : report.per_strategy) {
        std::ostringstream value;
        value.setf(std::ios::fixed);
        value.precision(4);
        value << distance;
        out << strategy << std::string(width - strategy.size() + 2, ' ') << value.str() << '\n';
    }
    out << "(" << report.n_tests << " test inputs, k=" << report.k_shots << ")\n";
}

SyntheticData generate_synthetic_corpus(const SyntheticConfig& config) {
    if (config.n_demos == 0) {
        throw UsageError("synthetic corpus needs at least one demonstration");
    }
    if (config.n_clusters == 0 || config.n_clusters > config.n_demos) {
        throw UsageError("synthetic corpus needs 1 <= clusters <= demos");
    }
    if (config.dim < 2) {
        throw UsageError("synthetic corpus needs dim >= 2");
    }
    if (config.spread < 0.0 || !std::isfinite(config.spread)) {
        throw UsageError("synthetic spread must be finite and >= 0");
    }
    rng::Engine engine(config.seed);

    std::vector<std::vector<double>> centers(config.n_clusters,
                                             std::vector<double>(config.dim));
    for (auto& center : centers) {
        double norm_sq = 0.0;
        for (double& component : center) {
            component = rng::gaussian(engine);
            norm_sq += component * component;
        }
        if (norm_sq == 0.0) {
            center[0] = 1.0;
            norm_sq = 1.0;
        }
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (double& component : center) {
            component *= inv;
        }
    }

    const auto pad_id = [](char prefix, std::size_t i) {
        std::string digits = std::to_string(i + 1);
        return std::string(1, prefix) +
               std::string(digits.size() < 6 ? 6 - digits.size() : 0, '0') + digits;
    };

    std::vector<Demonstration> demos;
    std::vector<std::string> ids;
    std::vector<double> data;
    demos.reserve(config.n_demos);
    data.reserve((config.n_demos + config.n_tests) * config.dim);
    for (std::size_t i = 0; i < config.n_demos; ++i) {
        const std::size_t cluster = i % config.n_clusters;
        Demonstration d;
        d.id = pad_id('d', i);
        d.source = "synthetic source " + d.id + " cluster " + std::to_string(cluster);
        d.target = "synthetic target " + d.id;
        demos.push_back(std::move(d));
        ids.push_back(demos.back().id);
        for (std::size_t c = 0; c < config.dim; ++c) {
            data.push_back(centers[cluster][c] + config.spread * rng::gaussian(engine));
        }
    }

    TestSet tests;
    tests.lang_pair = config.lang_pair;
    for (std::size_t i = 0; i < config.n_tests; ++i) {
        const std::size_t cluster = i % config.n_clusters;
        TestInput t;
        t.id = pad_id('t', i);
        t.source = "synthetic query " + t.id + " cluster " + std::to_string(cluster);
        tests.inputs.push_back(std::move(t));
        ids.push_back(tests.inputs.back().id);
        for (std::size_t c = 0; c < config.dim; ++c) {
            data.push_back(centers[cluster][c] + config.spread * rng::gaussian(engine));
        }
    }

    SyntheticData out{
        Corpus(std::move(demos), config.lang_pair),
        EmbeddingStore::make(config.dim, std::move(ids), std::move(data)),
        std::move(tests),
    };
    return out;
}

} // namespace icl
