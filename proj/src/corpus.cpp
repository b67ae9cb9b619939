#include "icl/corpus.hpp"

#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "icl/errors.hpp"

namespace icl {

namespace {

using ordered_json = nlohmann::ordered_json;

bool is_blank(const std::string& line) {
    for (const char c : line) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

std::string location(const std::string& path, std::size_t line_no) {
    return path + ":" + std::to_string(line_no);
}

std::string require_string_field(const ordered_json& record, const char* field,
                                 const std::string& path, std::size_t line_no) {
    const auto it = record.find(field);
    if (it == record.end()) {
        throw DataError(location(path, line_no) + ": missing field \"" + field + "\"");
    }
    if (!it->is_string()) {
        throw DataError(location(path, line_no) + ": field \"" + field + "\" must be a string");
    }
    return it->get<std::string>();
}

ordered_json parse_record(const std::string& line, const std::string& path,
                          std::size_t line_no) {
    ordered_json record;
    try {
        record = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(location(path, line_no) + ": malformed record: " + e.what());
    }
    if (!record.is_object()) {
        throw DataError(location(path, line_no) + ": record must be an object");
    }
    return record;
}

} // namespace

bool has_content(const std::string& text) {
    return !is_blank(text);
}

Corpus::Corpus(std::vector<Demonstration> demos, std::string lang_pair)
    : demos_(std::move(demos)), lang_pair_(std::move(lang_pair)) {}

const Demonstration& Corpus::at(std::size_t ordinal) const {
    if (ordinal >= demos_.size()) {
        throw DataError("demonstration ordinal " + std::to_string(ordinal) +
                        " out of range (corpus size " + std::to_string(demos_.size()) + ")");
    }
    return demos_[ordinal];
}

Corpus load_corpus(const std::string& path, const std::string& lang_pair) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open corpus file: " + path);
    }
    std::vector<Demonstration> demos;
    std::unordered_map<std::string, std::size_t> seen; // id -> first line
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) {
            continue;
        }
        const auto record = parse_record(line, path, line_no);
        Demonstration d;
        d.id = require_string_field(record, "id", path, line_no);
        d.source = require_string_field(record, "source", path, line_no);
        d.target = require_string_field(record, "target", path, line_no);
        if (d.id.empty()) {
            throw DataError(location(path, line_no) + ": empty id");
        }
        if (!has_content(d.source)) {
            throw DataError(location(path, line_no) + ": empty source for id \"" + d.id + "\"");
        }
        if (!has_content(d.target)) {
            throw DataError(location(path, line_no) + ": empty target for id \"" + d.id + "\"");
        }
        const auto [it, inserted] = seen.emplace(d.id, line_no);
        if (!inserted) {
            throw DataError(location(path, line_no) + ": duplicate id \"" + d.id +
                            "\" (first seen at line " + std::to_string(it->second) + ")");
        }
        demos.push_back(std::move(d));
    }
    if (demos.empty()) {
        throw DataError("empty corpus: " + path);
    }
    return Corpus(std::move(demos), lang_pair);
}

TestSet load_test_set(const std::string& path, const std::string& lang_pair) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open test file: " + path);
    }
    TestSet tests;
    tests.lang_pair = lang_pair;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) {
            continue;
        }
        const auto record = parse_record(line, path, line_no);
        TestInput t;
        t.id = require_string_field(record, "id", path, line_no);
        t.source = require_string_field(record, "source", path, line_no);
        if (t.id.empty()) {
            throw DataError(location(path, line_no) + ": empty id");
        }
        if (!has_content(t.source)) {
            throw DataError(location(path, line_no) + ": empty source for id \"" + t.id + "\"");
        }
        if (!seen.insert(t.id).second) {
            throw DataError(location(path, line_no) + ": duplicate id \"" + t.id + "\"");
        }
        tests.inputs.push_back(std::move(t));
    }
    if (tests.inputs.empty()) {
        throw DataError("empty test set: " + path);
    }
    return tests;
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
    for (const auto& d : corpus.demonstrations()) {
        ordered_json record;
        record["id"] = d.id;
        record["source"] = d.source;
        record["target"] = d.target;
        out << record.dump() << '\n';
    }
}

void write_test_set(const TestSet& tests, std::ostream& out) {
    for (const auto& t : tests.inputs) {
        ordered_json record;
        record["id"] = t.id;
        record["source"] = t.source;
        out << record.dump() << '\n';
    }
}

} // namespace icl
