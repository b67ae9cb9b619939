// icl-select: demonstration selection for in-context machine translation.
// Subcommands: select, report, synth, export-prompts.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <unordered_map>

#include <CLI11.hpp>
#include <json.hpp>

#include "icl/analysis.hpp"
#include "icl/bm25.hpp"
#include "icl/corpus.hpp"
#include "icl/embedding.hpp"
#include "icl/errors.hpp"
#include "icl/prompt.hpp"
#include "icl/scorer.hpp"
#include "icl/selection.hpp"

namespace {

using icl::DataError;
using icl::TransportError;
using icl::UsageError;

struct OutputFile {
    std::ofstream file;
    std::ostream* stream = nullptr;

    explicit OutputFile(const std::string& path) {
        if (path == "-") {
            stream = &std::cout;
            return;
        }
        file.open(path, std::ios::binary);
        if (!file) {
            throw DataError("cannot open output file: " + path);
        }
        stream = &file;
    }

    std::ostream& out() { return *stream; }
};

struct SelectArgs {
    std::string corpus_path;
    std::string tests_path;
    std::string embeddings_path;
    std::string out_path = "-";
    std::string lang_pair = "en-zh";
    std::string strategy = "topk";
    std::size_t k = 3;
    std::size_t topk_pool = 32;
    std::size_t cone_shots = 1;
    std::uint64_t seed = 0;
    std::string scorer_url;
    std::string mock_scorer_path;
    std::string template_path;
    double bm25_k1 = 1.2;
    double bm25_b = 0.75;
    bool normalize_embeddings = false;
    bool recenter = true;
    bool exact = false;
    std::size_t max_prompt_chars = icl::kDefaultMaxPromptChars;
    int max_in_flight = 8;
    double timeout_seconds = 30.0;
    int retries = 2;
};

std::unique_ptr<icl::ScorerInterface> make_scorer(const SelectArgs& args) {
    std::string url = args.scorer_url;
    if (url.empty()) {
        if (const char* env = std::getenv("ICL_SELECT_SCORER_URL")) {
            url = env;
        }
    }
    if (!args.mock_scorer_path.empty() && !url.empty()) {
        throw UsageError("pass either --mock-scorer or --scorer-url, not both");
    }
    if (!args.mock_scorer_path.empty()) {
        return std::make_unique<icl::MockScorer>(icl::MockScorer::load(args.mock_scorer_path));
    }
    if (!url.empty()) {
        icl::HttpScorer::Options options;
        options.endpoint = url;
        options.max_in_flight = args.max_in_flight;
        options.timeout_seconds = args.timeout_seconds;
        options.retries = args.retries;
        return std::make_unique<icl::HttpScorer>(std::move(options));
    }
    throw UsageError("strategy \"" + args.strategy +
                     "\" needs a scorer: --mock-scorer, --scorer-url or ICL_SELECT_SCORER_URL");
}

int cmd_select(const SelectArgs& args) {
    icl::SelectionConfig config;
    config.strategy = icl::strategy_from_string(args.strategy);
    config.k_shots = args.k;
    config.topk_pool = args.topk_pool;
    config.cone_shots = args.cone_shots;
    config.seed = args.seed;
    config.recenter = args.recenter;
    config.exact_cone = args.exact;

    const auto corpus = icl::load_corpus(args.corpus_path, args.lang_pair);
    const auto tests = icl::load_test_set(args.tests_path, args.lang_pair);

    icl::SelectionInputs inputs;
    inputs.corpus = &corpus;

    std::optional<icl::EmbeddingStore> store;
    const bool needs_embeddings = config.strategy == icl::Strategy::topk ||
                                  config.strategy == icl::Strategy::cone ||
                                  config.strategy == icl::Strategy::diversecone;
    if (needs_embeddings) {
        if (args.embeddings_path.empty()) {
            throw UsageError("strategy \"" + args.strategy + "\" requires --embeddings");
        }
        std::vector<std::string> expected;
        for (const auto& d : corpus.demonstrations()) {
            expected.push_back(d.id);
        }
        for (const auto& t : tests.inputs) {
            expected.push_back(t.id);
        }
        store.emplace(
            icl::EmbeddingStore::load(args.embeddings_path, expected, args.normalize_embeddings));
        inputs.store = &*store;
    }

    std::optional<icl::Bm25Index> bm25;
    if (config.strategy == icl::Strategy::bm25) {
        bm25.emplace(icl::Bm25Index::build(corpus, {args.bm25_k1, args.bm25_b}));
        inputs.bm25 = &*bm25;
    }

    std::unique_ptr<icl::ScorerInterface> scorer_backend;
    std::optional<icl::CachingScorer> scorer;
    icl::PromptTemplate tmpl;
    icl::PromptContext prompts;
    if (config.strategy == icl::Strategy::cone || config.strategy == icl::Strategy::diversecone) {
        scorer_backend = make_scorer(args);
        scorer.emplace(*scorer_backend);
        inputs.scorer = &*scorer;
        tmpl = args.template_path.empty() ? icl::default_template()
                                          : icl::load_template(args.template_path);
        prompts.tmpl = &tmpl;
        prompts.lang_pair = args.lang_pair;
        prompts.max_prompt_chars = args.max_prompt_chars;
        inputs.prompts = &prompts;
    }

    const auto results = icl::run_selection(inputs, config, tests);
    OutputFile out(args.out_path);
    icl::write_selections(results, out.out());
    return icl::kExitOk;
}

struct ReportArgs {
    std::string embeddings_path;
    std::vector<std::string> selections_paths;
    std::string out_path;
    bool normalize_embeddings = false;
};

int cmd_report(const ReportArgs& args) {
    std::vector<icl::SelectionResult> selections;
    for (const auto& path : args.selections_paths) {
        std::ifstream in(path);
        if (!in) {
            throw DataError("cannot open selections file: " + path);
        }
        auto loaded = icl::read_selections(in, path);
        selections.insert(selections.end(), std::make_move_iterator(loaded.begin()),
                          std::make_move_iterator(loaded.end()));
    }
    if (selections.empty()) {
        throw DataError("no selection records found in the given files");
    }
    std::vector<std::string> expected;
    for (const auto& selection : selections) {
        for (const auto& chosen : selection.chosen) {
            expected.push_back(chosen.id);
        }
    }
    const auto store =
        icl::EmbeddingStore::load(args.embeddings_path, expected, args.normalize_embeddings);
    const auto report = icl::build_diversity_report(selections, store);
    if (!args.out_path.empty()) {
        OutputFile out(args.out_path);
        icl::write_report(report, out.out());
    }
    icl::print_report_table(report, std::cout);
    return icl::kExitOk;
}

struct SynthArgs {
    icl::SyntheticConfig config;
    std::string out_corpus = "corpus.jsonl";
    std::string out_tests = "tests.jsonl";
    std::string out_embeddings = "embeddings.jsonl";
    std::string embeddings_format = "text";
};

int cmd_synth(const SynthArgs& args) {
    if (args.embeddings_format != "text" && args.embeddings_format != "binary") {
        throw UsageError("--embeddings-format must be text or binary");
    }
    const auto data = icl::generate_synthetic_corpus(args.config);
    {
        OutputFile out(args.out_corpus);
        icl::write_corpus(data.corpus, out.out());
    }
    {
        OutputFile out(args.out_tests);
        icl::write_test_set(data.tests, out.out());
    }
    {
        OutputFile out(args.out_embeddings);
        if (args.embeddings_format == "binary") {
            data.store.write_binary(out.out());
        } else {
            data.store.write_text(out.out());
        }
    }
    std::cerr << "wrote " << data.corpus.size() << " demonstrations, "
              << data.tests.inputs.size() << " test inputs, "
              << data.store.size() << " embeddings (dim " << data.store.dim() << ")\n";
    return icl::kExitOk;
}

struct ExportArgs {
    std::string corpus_path;
    std::string tests_path;
    std::string selections_path;
    std::string template_path;
    std::string lang_pair = "en-zh";
    std::string out_path = "-";
    std::size_t max_prompt_chars = icl::kDefaultMaxPromptChars;
};

int cmd_export_prompts(const ExportArgs& args) {
    const auto corpus = icl::load_corpus(args.corpus_path, args.lang_pair);
    const auto tests = icl::load_test_set(args.tests_path, args.lang_pair);
    std::ifstream in(args.selections_path);
    if (!in) {
        throw DataError("cannot open selections file: " + args.selections_path);
    }
    const auto selections = icl::read_selections(in, args.selections_path);

    std::unordered_map<std::string, const icl::SelectionResult*> by_test;
    for (const auto& selection : selections) {
        by_test[selection.test_id] = &selection;
    }
    std::unordered_map<std::string, const icl::Demonstration*> by_id;
    for (const auto& d : corpus.demonstrations()) {
        by_id[d.id] = &d;
    }

    const icl::PromptTemplate tmpl = args.template_path.empty()
                                         ? icl::default_template()
                                         : icl::load_template(args.template_path);
    icl::PromptContext prompts{&tmpl, args.lang_pair, args.max_prompt_chars};

    OutputFile out(args.out_path);
    for (const auto& test : tests.inputs) {
        const auto it = by_test.find(test.id);
        if (it == by_test.end()) {
            throw DataError("no selection record for test \"" + test.id + "\" in " +
                            args.selections_path);
        }
        std::vector<const icl::Demonstration*> demos;
        for (const auto& chosen : it->second->chosen) {
            const auto demo_it = by_id.find(chosen.id);
            if (demo_it == by_id.end()) {
                throw DataError("selection for test \"" + test.id +
                                "\" references unknown demonstration \"" + chosen.id + "\"");
            }
            demos.push_back(demo_it->second);
        }
        nlohmann::ordered_json record;
        record["test_id"] = test.id;
        record["prompt"] = prompts.prompt_text(demos, test);
        out.out() << record.dump() << '\n';
    }
    return icl::kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"demonstration selection for in-context machine translation"};
    app.require_subcommand(1);

    SelectArgs select_args;
    auto* select = app.add_subcommand("select", "select demonstrations per test input");
    select->add_option("--corpus", select_args.corpus_path, "demonstration pool (jsonl)")
        ->required();
    select->add_option("--tests", select_args.tests_path, "test inputs (jsonl)")->required();
    select->add_option("--embeddings", select_args.embeddings_path,
                       "embedding store (text jsonl or binary)");
    select->add_option("--out", select_args.out_path, "selections output, - for stdout");
    select->add_option("--lang-pair", select_args.lang_pair, "language pair tag, e.g. en-zh");
    select->add_option("--strategy", select_args.strategy,
                       "random|bm25|topk|cone|diversecone")
        ->required();
    select->add_option("--k", select_args.k, "shots per prompt");
    select->add_option("--topk", select_args.topk_pool, "retrieval pool size K");
    select->add_option("--cone-shots", select_args.cone_shots,
                       "contrastive picks inside diversecone");
    select->add_option("--seed", select_args.seed, "seed for the random strategy");
    select->add_option("--scorer-url", select_args.scorer_url,
                       "NLL scoring endpoint (or ICL_SELECT_SCORER_URL)");
    select->add_option("--mock-scorer", select_args.mock_scorer_path,
                       "mock scorer table/rule file (json)");
    select->add_option("--template", select_args.template_path, "prompt template file (json)");
    select->add_option("--bm25-k1", select_args.bm25_k1, "BM25 k1");
    select->add_option("--bm25-b", select_args.bm25_b, "BM25 b");
    select->add_flag("--normalize-embeddings", select_args.normalize_embeddings,
                     "unit-normalize embeddings after loading");
    select->add_flag("--recenter,!--no-recenter", select_args.recenter,
                     "recompute the centroid after each diversity pick");
    select->add_flag("--exact", select_args.exact,
                     "exhaustive contrastive search instead of greedy");
    select->add_option("--max-prompt-chars", select_args.max_prompt_chars,
                       "reject prompts longer than this");
    select->add_option("--max-in-flight", select_args.max_in_flight,
                       "texts per scoring batch request");
    select->add_option("--timeout", select_args.timeout_seconds, "scorer timeout in seconds");
    select->add_option("--retries", select_args.retries, "scorer retry count");

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "diversity report over selections files");
    report->add_option("--embeddings", report_args.embeddings_path, "embedding store")
        ->required();
    report->add_option("--selections", report_args.selections_paths,
                       "selections files (repeatable)")
        ->required()
        ->expected(-1);
    report->add_option("--out", report_args.out_path, "also write report records here");
    report->add_flag("--normalize-embeddings", report_args.normalize_embeddings,
                     "unit-normalize embeddings after loading");

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate a clustered synthetic corpus");
    synth->add_option("--n-demos", synth_args.config.n_demos, "demonstration count");
    synth->add_option("--dim", synth_args.config.dim, "embedding dimension");
    synth->add_option("--clusters", synth_args.config.n_clusters, "cluster count");
    synth->add_option("--spread", synth_args.config.spread, "gaussian noise scale");
    synth->add_option("--seed", synth_args.config.seed, "generator seed");
    synth->add_option("--n-tests", synth_args.config.n_tests, "test input count");
    synth->add_option("--lang-pair", synth_args.config.lang_pair, "language pair tag");
    synth->add_option("--out-corpus", synth_args.out_corpus, "corpus output path");
    synth->add_option("--out-tests", synth_args.out_tests, "tests output path");
    synth->add_option("--out-embeddings", synth_args.out_embeddings, "embeddings output path");
    synth->add_option("--embeddings-format", synth_args.embeddings_format, "text|binary");

    ExportArgs export_args;
    auto* exportp = app.add_subcommand("export-prompts", "render prompts from selections");
    exportp->add_option("--corpus", export_args.corpus_path, "demonstration pool")->required();
    exportp->add_option("--tests", export_args.tests_path, "test inputs")->required();
    exportp->add_option("--selections", export_args.selections_path, "selections file")
        ->required();
    exportp->add_option("--template", export_args.template_path, "prompt template file");
    exportp->add_option("--lang-pair", export_args.lang_pair, "language pair tag");
    exportp->add_option("--out", export_args.out_path, "prompts output, - for stdout");
    exportp->add_option("--max-prompt-chars", export_args.max_prompt_chars,
                        "reject prompts longer than this");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? icl::kExitOk : icl::kExitUsage;
    }

    try {
        if (select->parsed()) {
            return cmd_select(select_args);
        }
        if (report->parsed()) {
            return cmd_report(report_args);
        }
        if (synth->parsed()) {
            return cmd_synth(synth_args);
        }
        if (exportp->parsed()) {
            return cmd_export_prompts(export_args);
        }
        std::cerr << "error: no subcommand\n";
        return icl::kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return icl::kExitUsage;
    } catch (const TransportError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return icl::kExitTransport;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return icl::kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return icl::kExitData;
    }
}
