#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "icl/errors.hpp"
#include "icl/scorer.hpp"
#include "icl/utf8.hpp"
#include "test_support.hpp"

using namespace icl;
using icltest::TempDir;
using icltest::write_file;

TEST_CASE("mock scorer table lookup") {
    auto scorer = MockScorer::from_table({{"ab", 2.0}});
    CHECK(scorer.score_nll("ab").nll == 2.0);
    CHECK(scorer.score_nll("ab").token_count == 2);
    CHECK_THROWS_AS(scorer.score_nll("unknown"), DataError);
    CHECK_THROWS_AS(scorer.score_nll(""), UsageError);
}

TEST_CASE("mock scorer char-count rule") {
    auto scorer = MockScorer::char_count(0.1);
    CHECK(scorer.score_nll("abcd").nll == doctest::Approx(0.4).epsilon(1e-12));
    // codepoints, not bytes
    CHECK(scorer.score_nll("你好").nll == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("mock scorer hash rule is deterministic and in range") {
    auto a = MockScorer::hashed(7, 10.0);
    auto b = MockScorer::hashed(7, 10.0);
    auto other_seed = MockScorer::hashed(8, 10.0);
    const auto r1 = a.score_nll("some text");
    CHECK(r1.nll == b.score_nll("some text").nll);
    CHECK(r1.nll >= 0.0);
    CHECK(r1.nll < 10.0);
    CHECK(other_seed.score_nll("some text").nll != r1.nll);
}

TEST_CASE("mock scorer file loading") {
    TempDir dir;
    const auto path = dir.file("mock.json");

    SUBCASE("table plus rule fallback") {
        write_file(path, R"({"table": {"special": 1.25},
                             "rule": {"kind": "char_count", "rate": 0.5}})");
        auto scorer = MockScorer::load(path);
        CHECK(scorer.score_nll("special").nll == 1.25);
        CHECK(scorer.score_nll("xy").nll == doctest::Approx(1.0));
    }
    SUBCASE("hash rule") {
        write_file(path, R"({"rule": {"kind": "hash", "seed": 3, "scale": 2.0}})");
        auto scorer = MockScorer::load(path);
        const double v = scorer.score_nll("abc").nll;
        CHECK(v >= 0.0);
        CHECK(v < 2.0);
    }
    SUBCASE("neither table nor rule is an error") {
        write_file(path, R"({})");
        CHECK_THROWS_AS(MockScorer::load(path), DataError);
    }
    SUBCASE("negative table nll is an error") {
        write_file(path, R"({"table": {"x": -1.0}})");
        CHECK_THROWS_AS(MockScorer::load(path), DataError);
    }
    SUBCASE("unknown rule kind is an error") {
        write_file(path, R"({"rule": {"kind": "quadratic"}})");
        CHECK_THROWS_AS(MockScorer::load(path), DataError);
    }
}

TEST_CASE("cone_delta") {
    SUBCASE("plain subtraction") {
        auto scorer = MockScorer::from_table({{"prompt", 5.0}, {"demos", 3.0}});
        CHECK(cone_delta(scorer, "prompt", "demos") == 2.0);
    }
    SUBCASE("identical texts give zero") {
        auto scorer = MockScorer::char_count(0.3);
        CHECK(cone_delta(scorer, "same text", "same text") == 0.0);
    }
    SUBCASE("char-count rule: 40 vs 25 chars at 0.1") {
        auto scorer = MockScorer::char_count(0.1);
        const std::string prompt(40, 'p');
        const std::string demos(25, 'd');
        CHECK(cone_delta(scorer, prompt, demos) == doctest::Approx(1.5).epsilon(1e-12));
    }
    SUBCASE("invariant under a constant shift of both nll values") {
        auto base = MockScorer::from_table({{"p", 5.0}, {"d", 3.0}});
        auto shifted = MockScorer::from_table({{"p", 105.0}, {"d", 103.0}});
        CHECK(cone_delta(base, "p", "d") == cone_delta(shifted, "p", "d"));
    }
}

TEST_CASE("caching scorer returns identical results and counts hits") {
    auto inner = MockScorer::char_count(0.25);
    CachingScorer cached(inner);
    const auto first = cached.score_nll("hello");
    const auto second = cached.score_nll("hello");
    CHECK(first == second);
    CHECK(cached.hits() == 1);
    CHECK(cached.misses() == 1);

    // batch path: mixed hits and misses, results keyed by position
    const auto batch = cached.score_batch({"hello", "other", "hello", "other"});
    CHECK(batch[0] == first);
    CHECK(batch[2] == first);
    CHECK(batch[1] == batch[3]);
    CHECK(batch[1].nll == doctest::Approx(0.25 * 5));

    // cached and uncached scorers agree on everything
    auto fresh = MockScorer::char_count(0.25);
    for (const std::string text : {"a", "bb", "ccc", "hello"}) {
        CHECK(cached.score_nll(text).nll == fresh.score_nll(text).nll);
    }
}

namespace {

struct ScoringServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::atomic<int> batch_calls{0};

    explicit ScoringServer(double rate = 0.1, bool misbehave = false) {
        server.Post("/v1/nll", [rate, misbehave](const httplib::Request& req,
                                                 httplib::Response& res) {
            const auto body = nlohmann::json::parse(req.body);
            const std::string text = body["text"].get<std::string>();
            nlohmann::json out;
            if (misbehave) {
                out["nll"] = "not a number";
                out["token_count"] = 1;
            } else {
                out["nll"] = rate * static_cast<double>(utf8::count_codepoints(text));
                out["token_count"] = utf8::count_codepoints(text);
            }
            res.set_content(out.dump(), "application/json");
        });
        server.Post("/v1/nll_batch", [this, rate](const httplib::Request& req,
                                                  httplib::Response& res) {
            ++batch_calls;
            const auto body = nlohmann::json::parse(req.body);
            nlohmann::json results = nlohmann::json::array();
            for (const auto& text : body["texts"]) {
                nlohmann::json one;
                const auto s = text.get<std::string>();
                one["nll"] = rate * static_cast<double>(utf8::count_codepoints(s));
                one["token_count"] = utf8::count_codepoints(s);
                results.push_back(one);
            }
            nlohmann::json out;
            out["results"] = results;
            res.set_content(out.dump(), "application/json");
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~ScoringServer() {
        server.stop();
        thread.join();
    }

    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port); }
};

} // namespace

TEST_CASE("http scorer single and batch endpoints") {
    ScoringServer server(0.1);
    HttpScorer::Options options;
    options.endpoint = server.endpoint();
    options.max_in_flight = 3;
    options.retries = 0;
    HttpScorer scorer(options);

    auto reference = MockScorer::char_count(0.1);
    CHECK(scorer.score_nll("abcd").nll == doctest::Approx(reference.score_nll("abcd").nll));
    CHECK(scorer.score_nll("你好").token_count == 2);

    const std::vector<std::string> texts = {"a", "bb", "ccc", "dddd", "eeeee", "ffffff", "g"};
    const auto batch = scorer.score_batch(texts);
    REQUIRE(batch.size() == texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        CHECK(batch[i].nll == doctest::Approx(reference.score_nll(texts[i]).nll));
    }
    // 7 texts at max_in_flight 3 -> 3 chunked requests
    CHECK(server.batch_calls.load() == 3);
}

TEST_CASE("http scorer transport failures") {
    SUBCASE("unreachable endpoint fails after retries") {
        HttpScorer::Options options;
        options.endpoint = "http://127.0.0.1:1"; // nothing listens there
        options.retries = 1;
        options.timeout_seconds = 0.5;
        HttpScorer scorer(options);
        CHECK_THROWS_AS(scorer.score_nll("x"), TransportError);
    }
    SUBCASE("non-numeric nll is a transport error") {
        ScoringServer server(0.1, /*misbehave=*/true);
        HttpScorer::Options options;
        options.endpoint = server.endpoint();
        options.retries = 0;
        HttpScorer scorer(options);
        CHECK_THROWS_AS(scorer.score_nll("x"), TransportError);
    }
    SUBCASE("empty endpoint rejected") {
        CHECK_THROWS_AS(HttpScorer(HttpScorer::Options{}), UsageError);
    }
}
