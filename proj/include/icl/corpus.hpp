#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace icl {

/// One (source, target) translation pair from the demonstration pool.
struct Demonstration {
    std::string id;
    std::string source;
    std::string target;

    bool operator==(const Demonstration&) const = default;
};

/// A source sentence awaiting translation.
struct TestInput {
    std::string id;
    std::string source;

    bool operator==(const TestInput&) const = default;
};

/// Immutable demonstration pool. File order is preserved and doubles as the
/// global tie-break order for every downstream selection strategy.
class Corpus {
public:
    Corpus(std::vector<Demonstration> demos, std::string lang_pair);

    const std::vector<Demonstration>& demonstrations() const { return demos_; }
    const Demonstration& at(std::size_t ordinal) const;
    std::size_t size() const { return demos_.size(); }
    const std::string& lang_pair() const { return lang_pair_; }

    bool operator==(const Corpus&) const = default;

private:
    std::vector<Demonstration> demos_;
    std::string lang_pair_;
};

struct TestSet {
    std::vector<TestInput> inputs;
    std::string lang_pair;
};

/// Loads a corpus from a line-delimited file: one {"id","source","target"}
/// object per line. Rejects duplicate ids, blank sentences and malformed
/// lines, reporting the offending line number.
Corpus load_corpus(const std::string& path, const std::string& lang_pair);

/// Same record format minus the "target" field.
TestSet load_test_set(const std::string& path, const std::string& lang_pair);

void write_corpus(const Corpus& corpus, std::ostream& out);
void write_test_set(const TestSet& tests, std::ostream& out);

/// True when the string has at least one non-whitespace byte.
bool has_content(const std::string& text);

} // namespace icl
