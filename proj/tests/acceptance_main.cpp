// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Usage: icl_acceptance <path-to-icl-select-binary>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "icl/analysis.hpp"
#include "icl/bm25.hpp"
#include "icl/corpus.hpp"
#include "icl/embedding.hpp"
#include "icl/kernels.hpp"
#include "icl/prompt.hpp"
#include "icl/rng.hpp"
#include "icl/scorer.hpp"
#include "icl/selection.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct Criterion {
    int number;
    std::string name;
    bool passed;
    double seconds;
    std::string detail;
};

std::vector<Criterion> g_results;

void record(int number, const std::string& name, bool passed, double seconds,
            const std::string& detail = "") {
    g_results.push_back({number, name, passed, seconds, detail});
}

struct Stopwatch {
    Clock::time_point start = Clock::now();
    double seconds() const {
        return std::chrono::duration<double>(Clock::now() - start).count();
    }
};

bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

// ---- independent oracles (no shared code with the library paths under test)

double oracle_cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    const double sim = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::min(1.0, std::max(-1.0, sim));
}

std::vector<double> oracle_centroid(const std::vector<std::vector<double>>& vs) {
    std::vector<double> mean(vs.front().size(), 0.0);
    for (const auto& v : vs) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            mean[i] += v[i];
        }
    }
    for (double& m : mean) {
        m /= static_cast<double>(vs.size());
    }
    return mean;
}

double oracle_euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return std::sqrt(acc);
}

double oracle_avg_pairwise(const std::vector<std::vector<double>>& vs) {
    double total = 0.0;
    int pairs = 0;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        for (std::size_t j = i + 1; j < vs.size(); ++j) {
            total += 1.0 - oracle_cosine(vs[i], vs[j]);
            ++pairs;
        }
    }
    return total / pairs;
}

std::vector<double> random_unit_free_vector(icl::rng::Engine& engine, std::size_t dim) {
    std::vector<double> v(dim);
    bool nonzero = false;
    for (double& c : v) {
        c = icl::rng::gaussian(engine);
        nonzero = nonzero || c != 0.0;
    }
    if (!nonzero) {
        v[0] = 1.0;
    }
    return v;
}

// ---- criterion 1: vector-math oracle suite

void criterion_vector_math() {
    Stopwatch watch;
    icl::rng::Engine engine(1001);
    int failures = 0;
    for (int round = 0; round < 1000; ++round) {
        const std::size_t dim = 2 + icl::rng::bounded(engine, 63);
        const auto a = random_unit_free_vector(engine, dim);
        const auto b = random_unit_free_vector(engine, dim);
        if (!close(icl::cosine_similarity(a, b), oracle_cosine(a, b), 1e-9)) {
            ++failures;
        }
        if (!close(icl::euclidean_distance(a, b), oracle_euclidean(a, b), 1e-9)) {
            ++failures;
        }

        const std::size_t count = 2 + icl::rng::bounded(engine, 7);
        std::vector<std::vector<double>> vs;
        for (std::size_t i = 0; i < count; ++i) {
            vs.push_back(random_unit_free_vector(engine, dim));
        }
        std::vector<std::span<const double>> spans(vs.begin(), vs.end());
        const auto mean = icl::centroid(spans);
        const auto oracle_mean = oracle_centroid(vs);
        for (std::size_t i = 0; i < dim; ++i) {
            if (!close(mean[i], oracle_mean[i], 1e-9)) {
                ++failures;
                break;
            }
        }
        if (!close(icl::avg_pairwise_cosine_distance(spans), oracle_avg_pairwise(vs), 1e-9)) {
            ++failures;
        }
    }
    const double elapsed = watch.seconds();
    record(1, "vector-math oracle suite (1000 inputs, tol 1e-9, < 5 s)",
           failures == 0 && elapsed < 5.0, elapsed,
           failures == 0 ? "" : std::to_string(failures) + " mismatches");
}

// ---- criterion 2: topk oracle equivalence

void criterion_topk_oracle() {
    Stopwatch watch;
    icl::rng::Engine engine(2002);
    int failures = 0;
    for (int round = 0; round < 200; ++round) {
        const std::size_t n = 1 + icl::rng::bounded(engine, 1000);
        const std::size_t dim = 4 + icl::rng::bounded(engine, 509);
        std::vector<std::string> ids;
        std::vector<double> data;
        std::vector<std::vector<double>> raw(n);
        std::vector<icl::Demonstration> demos;
        for (std::size_t i = 0; i < n; ++i) {
            raw[i] = random_unit_free_vector(engine, dim);
            // plant exact ties by duplicating an earlier row now and then
            if (i > 0 && icl::rng::bounded(engine, 5) == 0) {
                raw[i] = raw[icl::rng::bounded(engine, i)];
            }
            const std::string id = "d" + std::to_string(i);
            ids.push_back(id);
            demos.push_back({id, "s " + id, "t " + id});
            data.insert(data.end(), raw[i].begin(), raw[i].end());
        }
        const auto query = random_unit_free_vector(engine, dim);
        ids.push_back("q");
        data.insert(data.end(), query.begin(), query.end());
        const auto store = icl::EmbeddingStore::make(dim, ids, data);
        const icl::Corpus corpus(std::move(demos), "xx-yy");
        const std::size_t k = 1 + icl::rng::bounded(engine, n);

        const auto got = icl::topk_select(store, corpus, {"q", "query"}, k);

        std::vector<double> sims(n);
        for (std::size_t i = 0; i < n; ++i) {
            sims[i] = oracle_cosine(query, raw[i]);
        }
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&sims](std::size_t a, std::size_t b) {
            if (sims[a] != sims[b]) {
                return sims[a] > sims[b];
            }
            return a < b;
        });
        bool match = got.size() == k;
        for (std::size_t i = 0; match && i < k; ++i) {
            match = got[i].ordinal == order[i];
        }
        if (!match) {
            ++failures;
        }
    }
    const double elapsed = watch.seconds();
    record(2, "topk_select equals the full-sort oracle (200 corpora)", failures == 0, elapsed,
           failures == 0 ? "" : std::to_string(failures) + " corpora mismatched");
}

// ---- criterion 3: cone exactness

void criterion_cone_exactness() {
    Stopwatch watch;
    icl::rng::Engine engine(3003);
    const auto tmpl = icl::default_template();
    const icl::PromptContext prompts{&tmpl, "xx-yy", icl::kDefaultMaxPromptChars};
    const icl::TestInput x{"t", "the query sentence"};
    int failures = 0;

    // greedy k=1 equals the exhaustive argmin on random hashed scorers
    for (int round = 0; round < 100; ++round) {
        const std::size_t n = 1 + icl::rng::bounded(engine, 50);
        std::vector<icl::Demonstration> demos;
        std::vector<icl::Candidate> candidates;
        for (std::size_t i = 0; i < n; ++i) {
            const std::string id = "d" + std::to_string(i);
            demos.push_back({id, "src " + id + " w" + std::to_string(engine() % 97), "tgt " + id});
            candidates.push_back({i, 0.0});
        }
        const icl::Corpus corpus(std::move(demos), "xx-yy");
        auto scorer = icl::MockScorer::hashed(engine());
        const auto greedy = icl::cone_select(scorer, prompts, corpus, candidates, x, 1);
        const auto exact = icl::cone_select_bruteforce(scorer, prompts, corpus, candidates, x, 1);
        if (greedy.size() != 1 || exact.size() != 1 || greedy[0].id != exact[0].id) {
            ++failures;
        }
    }

    // greedy k=2 on additive-delta fixtures, which exhaustive provably shares
    for (int round = 0; round < 20; ++round) {
        const std::size_t n = 4 + icl::rng::bounded(engine, 5);
        std::vector<icl::Demonstration> demos;
        std::vector<icl::Candidate> candidates;
        for (std::size_t i = 0; i < n; ++i) {
            const std::string id = "c" + std::to_string(i);
            demos.push_back({id, "fixture source " + id, "fixture target " + id});
            candidates.push_back({i, 0.0});
        }
        const icl::Corpus corpus(std::move(demos), "xx-yy");
        std::vector<double> weights(n);
        for (double& w : weights) {
            w = 1.0 + icl::rng::unit_double(engine);
        }
        // delta(S) = sum of per-candidate weights: greedy and exhaustive agree
        std::map<std::string, double> table;
        const auto add_set = [&](const std::vector<std::size_t>& positions) {
            std::vector<const icl::Demonstration*> set;
            double delta = 0.0;
            for (const std::size_t pos : positions) {
                set.push_back(&corpus.at(pos));
                delta += weights[pos];
            }
            table[prompts.demos_text(set)] = 10.0;
            table[prompts.prompt_text(set, x)] = 10.0 + delta;
        };
        for (std::size_t i = 0; i < n; ++i) {
            add_set({i});
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) {
                    add_set({i, j});
                }
            }
        }
        auto scorer = icl::MockScorer::from_table(table);
        const auto greedy = icl::cone_select(scorer, prompts, corpus, candidates, x, 2);
        const auto exact = icl::cone_select_bruteforce(scorer, prompts, corpus, candidates, x, 2);
        std::set<std::string> greedy_ids{greedy[0].id, greedy[1].id};
        std::set<std::string> exact_ids{exact[0].id, exact[1].id};
        if (greedy_ids != exact_ids) {
            ++failures;
        }
    }

    const double elapsed = watch.seconds();
    record(3, "cone greedy/exhaustive agreement (k=1 x100, k=2 fixtures, < 10 s)",
           failures == 0 && elapsed < 10.0, elapsed,
           failures == 0 ? "" : std::to_string(failures) + " disagreements");
}

// ---- criterion 4: diversity-pick optimality

void criterion_diversity_optimality() {
    Stopwatch watch;
    icl::rng::Engine engine(4004);
    const auto tmpl = icl::default_template();
    int failures = 0;
    for (int round = 0; round < 100; ++round) {
        icl::SyntheticConfig config;
        config.n_demos = 20 + icl::rng::bounded(engine, 81);
        config.dim = 4 + icl::rng::bounded(engine, 29);
        config.n_clusters = 1 + icl::rng::bounded(engine, 5);
        config.spread = 0.05 + 0.3 * icl::rng::unit_double(engine);
        config.seed = engine();
        config.n_tests = 1;
        const auto data = generate_synthetic_corpus(config);

        const std::size_t k = 3 + icl::rng::bounded(engine, 3);
        const std::size_t cone_shots = 1 + icl::rng::bounded(engine, k - 1);
        const std::size_t pool = std::min<std::size_t>(config.n_demos, 16 + icl::rng::bounded(engine, 17));
        auto scorer = icl::MockScorer::char_count(0.1);
        const icl::PromptContext prompts{&tmpl, "xx-yy", icl::kDefaultMaxPromptChars};
        const auto& x = data.tests.inputs.front();
        const auto candidates = icl::topk_select(data.store, data.corpus, x, pool);
        const auto picks = icl::diversecone_select(data.store, scorer, prompts, data.corpus,
                                                   candidates, x, k, cone_shots, true);

        // replay every diversity round with independent math
        std::vector<std::string> selected;
        for (std::size_t p = 0; p < picks.size(); ++p) {
            if (picks[p].stage != icl::Stage::diversity) {
                selected.push_back(picks[p].id);
                continue;
            }
            std::vector<std::vector<double>> chosen_vecs;
            for (const auto& id : selected) {
                const auto v = data.store.vector_of(id);
                chosen_vecs.emplace_back(v.begin(), v.end());
            }
            const auto center = oracle_centroid(chosen_vecs);

            double best_distance = -1.0;
            std::string best_id;
            for (const auto& candidate : candidates) {
                const auto& id = data.corpus.at(candidate.ordinal).id;
                if (std::find(selected.begin(), selected.end(), id) != selected.end()) {
                    continue;
                }
                const auto v = data.store.vector_of(id);
                const double distance =
                    oracle_euclidean({v.begin(), v.end()}, center);
                if (distance > best_distance) { // first maximizer wins ties
                    best_distance = distance;
                    best_id = id;
                }
            }
            if (picks[p].id != best_id ||
                !close(picks[p].score, best_distance, 1e-12)) {
                ++failures;
            }
            selected.push_back(picks[p].id);
        }
    }
    const double elapsed = watch.seconds();
    record(4, "diversity picks maximize centroid distance (100 runs, exact)",
           failures == 0, elapsed,
           failures == 0 ? "" : std::to_string(failures) + " non-optimal picks");
}

// ---- criterion 5: desk-scale diversity ordering

void criterion_diversity_ordering() {
    Stopwatch watch;
    const auto tmpl = icl::default_template();
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        icl::SyntheticConfig config;
        config.n_demos = 100;
        config.dim = 16;
        config.n_clusters = 4;
        config.spread = 0.1;
        config.seed = seed;
        config.n_tests = 10;
        const auto data = generate_synthetic_corpus(config);

        auto scorer = icl::MockScorer::char_count(0.1);
        icl::CachingScorer cached(scorer);
        const icl::PromptContext prompts{&tmpl, "xx-yy", icl::kDefaultMaxPromptChars};

        icl::SelectionInputs inputs;
        inputs.corpus = &data.corpus;
        inputs.store = &data.store;
        inputs.scorer = &cached;
        inputs.prompts = &prompts;

        icl::SelectionConfig topk_config;
        topk_config.strategy = icl::Strategy::topk;
        topk_config.k_shots = 3;
        topk_config.topk_pool = 32;

        icl::SelectionConfig diverse_config = topk_config;
        diverse_config.strategy = icl::Strategy::diversecone;
        diverse_config.cone_shots = 1;

        auto selections = icl::run_selection(inputs, topk_config, data.tests);
        const auto diverse = icl::run_selection(inputs, diverse_config, data.tests);
        selections.insert(selections.end(), diverse.begin(), diverse.end());

        const auto report = icl::build_diversity_report(selections, data.store);
        double diverse_score = 0.0;
        double topk_score = 0.0;
        for (const auto& [strategy, value] : report.per_strategy) {
            if (strategy == "diversecone") {
                diverse_score = value;
            } else if (strategy == "topk") {
                topk_score = value;
            }
        }
        if (diverse_score > topk_score) {
            ++wins;
        }
    }
    const double elapsed = watch.seconds();
    record(5, "diversecone out-diversifies topk on clustered data (>= 95/100 seeds, < 60 s)",
           wins >= 95 && elapsed < 60.0, elapsed, std::to_string(wins) + "/100 seeds");
}

// ---- criterion 6: bm25 reference values and oracle equivalence

void criterion_bm25() {
    Stopwatch watch;
    int failures = 0;

    {
        std::vector<icl::Demonstration> demos = {{"d1", "the cat", "t"}};
        const icl::Corpus corpus(std::move(demos), "xx-yy");
        const auto index = icl::Bm25Index::build(corpus, {1.2, 0.75});
        if (!close(index.score("cat", 0), 0.28768207, 1e-6)) {
            ++failures;
        }
        if (index.score("zebra", 0) != 0.0) {
            ++failures;
        }
    }

    icl::rng::Engine engine(6006);
    const std::vector<std::string> vocab = {
        "sun", "moon", "star", "wind", "rain", "snow", "tree", "leaf", "stone", "river",
        "cloud", "fire", "sand", "wave", "bird"};
    for (int round = 0; round < 100 && failures == 0; ++round) {
        const std::size_t n = 1 + icl::rng::bounded(engine, 200);
        std::vector<icl::Demonstration> demos;
        for (std::size_t d = 0; d < n; ++d) {
            std::string source;
            const std::size_t words = 1 + icl::rng::bounded(engine, 10);
            for (std::size_t w = 0; w < words; ++w) {
                if (w > 0) {
                    source += ' ';
                }
                source += vocab[icl::rng::bounded(engine, vocab.size())];
            }
            demos.push_back({"d" + std::to_string(d), source, "t"});
        }
        const icl::Corpus corpus(std::move(demos), "xx-yy");
        const auto index = icl::Bm25Index::build(corpus);

        std::string query;
        for (std::size_t w = 0; w < 1 + icl::rng::bounded(engine, 4); ++w) {
            if (w > 0) {
                query += ' ';
            }
            query += vocab[icl::rng::bounded(engine, vocab.size())];
        }
        const std::size_t k = 1 + icl::rng::bounded(engine, n);
        const auto got = index.topk(query, k);

        // independent per-doc scan using the declared formula
        const auto terms = icl::Bm25Index::distinct_query_terms(query);
        std::vector<double> scores(n, 0.0);
        for (std::size_t d = 0; d < n; ++d) {
            const auto doc_tokens = icl::tokenize(corpus.at(d).source);
            double score = 0.0;
            for (const auto& term : terms) {
                const double tf = static_cast<double>(
                    std::count(doc_tokens.begin(), doc_tokens.end(), term));
                if (tf == 0.0) {
                    continue;
                }
                std::size_t df = 0;
                for (std::size_t other = 0; other < n; ++other) {
                    const auto other_tokens = icl::tokenize(corpus.at(other).source);
                    if (std::count(other_tokens.begin(), other_tokens.end(), term) > 0) {
                        ++df;
                    }
                }
                const double idf = std::log1p((static_cast<double>(n) - df + 0.5) / (df + 0.5));
                const double len = static_cast<double>(doc_tokens.size());
                const double norm =
                    1.2 * (1.0 - 0.75 + 0.75 * len / index.avg_doc_length());
                score += idf * tf * (1.2 + 1.0) / (tf + norm);
            }
            scores[d] = score;
        }
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&scores](std::size_t a, std::size_t b) {
            if (scores[a] != scores[b]) {
                return scores[a] > scores[b];
            }
            return a < b;
        });
        order.resize(std::min(k, n));
        if (got != order) {
            ++failures;
        }
    }
    const double elapsed = watch.seconds();
    record(6, "bm25 hand value (1e-6) and full-scan oracle (100 corpora)", failures == 0,
           elapsed, failures == 0 ? "" : std::to_string(failures) + " mismatches");
}

// ---- criterion 7: end-to-end determinism and the prompt prefix law

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void criterion_determinism(const std::string& cli) {
    Stopwatch watch;
    const auto dir = std::filesystem::temp_directory_path() /
                     ("icl_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const auto file = [&dir](const std::string& name) { return (dir / name).string(); };

    bool ok = true;
    std::string detail;

    const auto shell = [](const std::string& command) {
        const int status = std::system((command + " >/dev/null 2>&1").c_str());
        return WIFEXITED(status) && WEXITSTATUS(status) == 0;
    };

    if (!shell(cli + " synth --n-demos 60 --dim 8 --clusters 4 --spread 0.1 --seed 21"
                     " --n-tests 6 --lang-pair xx-yy"
                     " --out-corpus " + file("corpus.jsonl") +
                     " --out-tests " + file("tests.jsonl") +
                     " --out-embeddings " + file("emb.jsonl"))) {
        ok = false;
        detail = "synth failed";
    }
    {
        std::ofstream mock(file("mock.json"));
        mock << R"({"rule":{"kind":"char_count","rate":0.1}})";
    }

    const std::vector<std::string> strategies = {"random", "bm25", "topk", "cone", "diversecone"};
    for (const auto& strategy : strategies) {
        if (!ok) {
            break;
        }
        std::string args = cli + " select --corpus " + file("corpus.jsonl") + " --tests " +
                           file("tests.jsonl") + " --lang-pair xx-yy --strategy " + strategy +
                           " --k 3 --topk 16 --seed 5";
        if (strategy == "topk" || strategy == "cone" || strategy == "diversecone") {
            args += " --embeddings " + file("emb.jsonl");
        }
        if (strategy == "cone" || strategy == "diversecone") {
            args += " --mock-scorer " + file("mock.json");
        }
        if (!shell(args + " --out " + file(strategy + "_1.jsonl")) ||
            !shell(args + " --out " + file(strategy + "_2.jsonl"))) {
            ok = false;
            detail = strategy + " run failed";
            break;
        }
        const auto first = slurp(file(strategy + "_1.jsonl"));
        if (first.empty() || first != slurp(file(strategy + "_2.jsonl"))) {
            ok = false;
            detail = strategy + " output not byte-identical";
            break;
        }
    }

    // prefix law over randomized templates and demo lists
    icl::rng::Engine engine(7007);
    const std::vector<std::string> fillers = {"", " ", "\n", "== ", "Q:", "答え", "|"};
    const std::vector<std::string> words = {"alpha", "beta", "你好", "мир", "Straße", "x"};
    int law_failures = 0;
    for (int round = 0; round < 1000; ++round) {
        icl::PromptTemplate tmpl;
        const auto filler = [&] { return fillers[icl::rng::bounded(engine, fillers.size())]; };
        tmpl.demo_pattern = filler() + "{source}" + filler() + "{target}" + filler();
        tmpl.query_pattern = filler() + "{source}" + filler();
        tmpl.joiner = filler();
        std::vector<icl::Demonstration> storage;
        const std::size_t n = 1 + icl::rng::bounded(engine, 4);
        for (std::size_t i = 0; i < n; ++i) {
            storage.push_back({"d" + std::to_string(i),
                               words[icl::rng::bounded(engine, words.size())],
                               words[icl::rng::bounded(engine, words.size())]});
        }
        std::vector<const icl::Demonstration*> demos;
        for (const auto& d : storage) {
            demos.push_back(&d);
        }
        const icl::TestInput x{"t", words[icl::rng::bounded(engine, words.size())]};
        const auto demos_text = icl::render_demonstrations(tmpl, "xx-yy", demos);
        const auto prompt = icl::render_prompt(tmpl, "xx-yy", demos, x);
        if (prompt.rfind(demos_text + tmpl.joiner, 0) != 0) {
            ++law_failures;
        }
    }
    if (law_failures > 0) {
        ok = false;
        detail = std::to_string(law_failures) + " prefix-law violations";
    }

    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
    record(7, "cmd_select byte-determinism (5 strategies) and prefix law (1000 combos)", ok,
           watch.seconds(), detail);
}

// ---- criterion 8: performance envelope

void criterion_performance() {
    Stopwatch watch;
    bool ok = true;
    std::string detail;

    // topk over 10k demos at 384 dims, single-threaded
    {
        icl::rng::Engine engine(8008);
        const std::size_t n = 10000;
        const std::size_t dim = 384;
        std::vector<std::string> ids;
        std::vector<double> data;
        data.reserve((n + 1) * dim);
        std::vector<icl::Demonstration> demos;
        for (std::size_t i = 0; i < n; ++i) {
            const std::string id = "d" + std::to_string(i);
            ids.push_back(id);
            demos.push_back({id, "s" + id, "t" + id});
            for (std::size_t c = 0; c < dim; ++c) {
                data.push_back(icl::rng::gaussian(engine));
            }
        }
        ids.push_back("q");
        for (std::size_t c = 0; c < dim; ++c) {
            data.push_back(icl::rng::gaussian(engine));
        }
        const auto store = icl::EmbeddingStore::make(dim, ids, data);
        const icl::Corpus corpus(std::move(demos), "xx-yy");

#ifdef _OPENMP
        const int prior_threads = omp_get_max_threads();
        omp_set_num_threads(1);
#endif
        const Stopwatch scan;
        const auto candidates = icl::topk_select(store, corpus, {"q", "query"}, 32);
        const double scan_seconds = scan.seconds();
#ifdef _OPENMP
        omp_set_num_threads(prior_threads);
#endif
        if (candidates.size() != 32 || scan_seconds >= 1.0) {
            ok = false;
        }
        detail = "topk 10k x 384: " + std::to_string(scan_seconds * 1000.0) + " ms";
    }

    // diversecone per test input on the desk-scale synthetic corpus
    {
        icl::SyntheticConfig config;
        config.n_demos = 100;
        config.dim = 16;
        config.n_clusters = 4;
        config.spread = 0.1;
        config.seed = 88;
        config.n_tests = 20;
        const auto data = generate_synthetic_corpus(config);
        auto scorer = icl::MockScorer::char_count(0.1);
        icl::CachingScorer cached(scorer);
        const auto tmpl = icl::default_template();
        const icl::PromptContext prompts{&tmpl, "xx-yy", icl::kDefaultMaxPromptChars};

        icl::SelectionInputs inputs;
        inputs.corpus = &data.corpus;
        inputs.store = &data.store;
        inputs.scorer = &cached;
        inputs.prompts = &prompts;

        icl::SelectionConfig config_run;
        config_run.strategy = icl::Strategy::diversecone;
        config_run.k_shots = 3;
        config_run.topk_pool = 32;
        config_run.cone_shots = 1;

        const Stopwatch run;
        double per_test_ms = 0.0;
        for (const auto& test : data.tests.inputs) {
            (void)icl::select_for_test(inputs, config_run, test);
        }
        per_test_ms = run.seconds() * 1000.0 / static_cast<double>(data.tests.inputs.size());
        if (per_test_ms >= 50.0) {
            ok = false;
        }
        detail += "; diversecone: " + std::to_string(per_test_ms) + " ms/test";
    }

    record(8, "performance envelope (topk < 1 s, diversecone < 50 ms/test)", ok,
           watch.seconds(), detail);
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: icl_acceptance <path-to-icl-select>\n";
        return 2;
    }
    const std::string cli = argv[1];

    criterion_vector_math();
    criterion_topk_oracle();
    criterion_cone_exactness();
    criterion_diversity_optimality();
    criterion_diversity_ordering();
    criterion_bm25();
    criterion_determinism(cli);
    criterion_performance();

    bool all_passed = true;
    for (const auto& result : g_results) {
        const bool passed = result.passed;
        all_passed = all_passed && passed;
        std::cout << (passed ? "[PASS] " : "[FAIL] ") << result.number << ". " << result.name;
        if (!result.detail.empty()) {
            std::cout << " [" << result.detail << "]";
        }
        std::cout << " (" << result.seconds << " s)\n";
    }
    return all_passed ? 0 : 1;
}
