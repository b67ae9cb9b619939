#include <doctest.h>

#include <sstream>

#include "icl/corpus.hpp"
#include "icl/errors.hpp"
#include "icl/rng.hpp"
#include "test_support.hpp"

using namespace icl;
using icltest::TempDir;
using icltest::write_file;

TEST_CASE("load_corpus keeps file order") {
    TempDir dir;
    const auto path = dir.file("corpus.jsonl");
    write_file(path,
               R"({"id":"a","source":"one","target":"eins"})" "\n"
               R"({"id":"b","source":"two","target":"zwei"})" "\n"
               R"({"id":"c","source":"three","target":"drei"})" "\n");
    const auto corpus = load_corpus(path, "en-de");
    REQUIRE(corpus.size() == 3);
    CHECK(corpus.at(0).id == "a");
    CHECK(corpus.at(1).id == "b");
    CHECK(corpus.at(2).id == "c");
    CHECK(corpus.lang_pair() == "en-de");
    CHECK(corpus.at(1).target == "zwei");
}

TEST_CASE("load_corpus rejects duplicate ids naming id and line") {
    TempDir dir;
    const auto path = dir.file("corpus.jsonl");
    write_file(path,
               R"({"id":"d1","source":"s1","target":"t1"})" "\n"
               R"({"id":"d2","source":"s2","target":"t2"})" "\n"
               R"({"id":"d3","source":"s3","target":"t3"})" "\n"
               R"({"id":"d1","source":"s4","target":"t4"})" "\n");
    try {
        load_corpus(path, "en-zh");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string what = e.what();
        CHECK(what.find("d1") != std::string::npos);
        CHECK(what.find(":4") != std::string::npos);
    }
}

TEST_CASE("load_corpus error cases") {
    TempDir dir;
    const auto path = dir.file("corpus.jsonl");

    SUBCASE("missing target field names the line") {
        write_file(path, R"({"id":"d1","source":"s1"})" "\n");
        try {
            load_corpus(path, "en-zh");
            FAIL("expected DataError");
        } catch (const DataError& e) {
            const std::string what = e.what();
            CHECK(what.find("target") != std::string::npos);
            CHECK(what.find(":1") != std::string::npos);
        }
    }
    SUBCASE("empty file") {
        write_file(path, "");
        CHECK_THROWS_AS(load_corpus(path, "en-zh"), DataError);
    }
    SUBCASE("whitespace-only source is rejected") {
        write_file(path, R"({"id":"d1","source":"  \t ","target":"t1"})" "\n");
        CHECK_THROWS_AS(load_corpus(path, "en-zh"), DataError);
    }
    SUBCASE("malformed json names the line") {
        write_file(path,
                   R"({"id":"d1","source":"s1","target":"t1"})" "\n"
                   "{not json\n");
        try {
            load_corpus(path, "en-zh");
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find(":2") != std::string::npos);
        }
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_corpus(dir.file("nope.jsonl"), "en-zh"), DataError);
    }
}

TEST_CASE("load_test_set basics") {
    TempDir dir;
    const auto path = dir.file("tests.jsonl");

    SUBCASE("well-formed") {
        write_file(path,
                   R"({"id":"t1","source":"hello"})" "\n"
                   R"({"id":"t2","source":"world"})" "\n");
        const auto tests = load_test_set(path, "en-zh");
        REQUIRE(tests.inputs.size() == 2);
        CHECK(tests.inputs[0].id == "t1");
        CHECK(tests.inputs[1].id == "t2");
    }
    SUBCASE("empty file is an error") {
        write_file(path, "\n\n");
        try {
            load_test_set(path, "en-zh");
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("empty test set") != std::string::npos);
        }
    }
    SUBCASE("blank source is an error at its line") {
        write_file(path,
                   R"({"id":"t1","source":"ok"})" "\n"
                   R"({"id":"t2","source":" "})" "\n");
        try {
            load_test_set(path, "en-zh");
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find(":2") != std::string::npos);
        }
    }
}

TEST_CASE("corpus write/reload round-trip") {
    // random corpora with unicode and json-hostile characters
    rng::Engine engine(99);
    const std::vector<std::string> pieces = {
        "hello", "你好世界", "Привет", "quote\"inside", "back\\slash", "tab\there",
        "newline escape", "ümlaut ßtraße", "ź ż ó",
    };
    for (int round = 0; round < 20; ++round) {
        std::vector<Demonstration> demos;
        const std::size_t n = 1 + rng::bounded(engine, 12);
        for (std::size_t i = 0; i < n; ++i) {
            Demonstration d;
            d.id = "d" + std::to_string(i);
            d.source = pieces[rng::bounded(engine, pieces.size())] + " " + std::to_string(i);
            d.target = pieces[rng::bounded(engine, pieces.size())];
            demos.push_back(std::move(d));
        }
        const Corpus corpus(std::move(demos), "en-zh");

        TempDir dir;
        const auto path = dir.file("roundtrip.jsonl");
        {
            std::ofstream out(path, std::ios::binary);
            write_corpus(corpus, out);
        }
        const auto reloaded = load_corpus(path, "en-zh");
        REQUIRE(reloaded == corpus);
    }
}
