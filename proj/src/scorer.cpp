#include "icl/scorer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "icl/errors.hpp"
#include "icl/rng.hpp"
#include "icl/utf8.hpp"

namespace icl {

namespace {

void require_nonempty(const std::string& text) {
    if (text.empty()) {
        throw UsageError("cannot score an empty text");
    }
}

std::int64_t token_count_of(const std::string& text) {
    const auto count = utf8::count_codepoints(text);
    return count == 0 ? 1 : static_cast<std::int64_t>(count);
}

} // namespace

std::vector<ScoreResponse> ScorerInterface::score_batch(const std::vector<std::string>& texts) {
    std::vector<ScoreResponse> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        out.push_back(score_nll(text));
    }
    return out;
}

double cone_delta(ScorerInterface& scorer, const std::string& prompt_text,
                  const std::string& demos_text) {
    return scorer.score_nll(prompt_text).nll - scorer.score_nll(demos_text).nll;
}

MockScorer MockScorer::from_table(std::map<std::string, double> table) {
    MockScorer scorer;
    scorer.table_ = std::move(table);
    for (const auto& [text, nll] : scorer.table_) {
        if (!std::isfinite(nll) || nll < 0.0) {
            throw DataError("mock table nll for \"" + text + "\" must be finite and >= 0");
        }
    }
    return scorer;
}

MockScorer MockScorer::char_count(double rate) {
    if (!std::isfinite(rate) || rate < 0.0) {
        throw UsageError("char_count rate must be finite and >= 0");
    }
    MockScorer scorer;
    scorer.rule_ = Rule::char_count;
    scorer.rate_ = rate;
    return scorer;
}

MockScorer MockScorer::hashed(std::uint64_t seed, double scale) {
    if (!std::isfinite(scale) || scale < 0.0) {
        throw UsageError("hash scale must be finite and >= 0");
    }
    MockScorer scorer;
    scorer.rule_ = Rule::hash;
    scorer.seed_ = seed;
    scorer.scale_ = scale;
    return scorer;
}

MockScorer MockScorer::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open mock scorer file: " + path);
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": malformed mock scorer file: " + e.what());
    }
    if (!doc.is_object() || (!doc.contains("table") && !doc.contains("rule"))) {
        throw DataError(path + ": mock scorer file needs a \"table\" and/or a \"rule\"");
    }
    MockScorer scorer;
    if (doc.contains("table")) {
        if (!doc["table"].is_object()) {
            throw DataError(path + ": \"table\" must map texts to nll values");
        }
        std::map<std::string, double> table;
        for (const auto& [text, value] : doc["table"].items()) {
            if (!value.is_number()) {
                throw DataError(path + ": nll for \"" + text + "\" must be a number");
            }
            table[text] = value.get<double>();
        }
        scorer = from_table(std::move(table));
    }
    if (doc.contains("rule")) {
        const auto& rule = doc["rule"];
        if (!rule.is_object() || !rule.contains("kind")) {
            throw DataError(path + ": \"rule\" needs a \"kind\"");
        }
        const auto kind = rule["kind"].get<std::string>();
        if (kind == "char_count") {
            scorer.rule_ = Rule::char_count;
            scorer.rate_ = rule.value("rate", 0.1);
            if (!std::isfinite(scorer.rate_) || scorer.rate_ < 0.0) {
                throw DataError(path + ": char_count rate must be finite and >= 0");
            }
        } else if (kind == "hash") {
            scorer.rule_ = Rule::hash;
            scorer.seed_ = rule.value("seed", 0ull);
            scorer.scale_ = rule.value("scale", 10.0);
            if (!std::isfinite(scorer.scale_) || scorer.scale_ < 0.0) {
                throw DataError(path + ": hash scale must be finite and >= 0");
            }
        } else {
            throw DataError(path + ": unknown mock rule kind \"" + kind + "\"");
        }
    }
    return scorer;
}

ScoreResponse MockScorer::score_nll(const std::string& text) {
    require_nonempty(text);
    const auto it = table_.find(text);
    if (it != table_.end()) {
        return {it->second, token_count_of(text)};
    }
    switch (rule_) {
        case Rule::char_count:
            return {rate_ * static_cast<double>(utf8::count_codepoints(text)),
                    token_count_of(text)};
        case Rule::hash: {
            const double u =
                static_cast<double>(rng::fnv1a64(text, seed_) >> 11) * 0x1.0p-53;
            return {scale_ * u, token_count_of(text)};
        }
        case Rule::none:
            break;
    }
    const std::string preview = text.size() > 60 ? text.substr(0, 60) + "..." : text;
    throw DataError("unscored text in mock scorer table: \"" + preview + "\"");
}

struct HttpScorer::Impl {
    Options options;
    httplib::Client client;
    std::mutex mutex; // httplib clients are not reentrant

    explicit Impl(Options opts) : options(std::move(opts)), client(options.endpoint) {
        const auto timeout = std::chrono::duration<double>(options.timeout_seconds);
        const auto usec = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
        client.set_connection_timeout(usec.count() / 1000000, usec.count() % 1000000);
        client.set_read_timeout(usec.count() / 1000000, usec.count() % 1000000);
        client.set_write_timeout(usec.count() / 1000000, usec.count() % 1000000);
    }

    nlohmann::json post_json(const std::string& path, const nlohmann::json& body) {
        std::string last_error;
        for (int attempt = 0; attempt <= options.retries; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
            }
            httplib::Result res;
            {
                std::lock_guard<std::mutex> lock(mutex);
                res = client.Post(path, body.dump(), "application/json");
            }
            if (!res) {
                last_error = "transport failure: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status != 200) {
                last_error = "status " + std::to_string(res->status);
                continue;
            }
            try {
                return nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::exception& e) {
                last_error = std::string("unparseable response: ") + e.what();
            }
        }
        throw TransportError("scorer endpoint " + options.endpoint + path + " failed after " +
                             std::to_string(options.retries + 1) + " attempt(s): " + last_error);
    }

    ScoreResponse parse_result(const nlohmann::json& value) const {
        if (!value.is_object() || !value.contains("nll") || !value.contains("token_count") ||
            !value["nll"].is_number() || !value["token_count"].is_number_integer()) {
            throw TransportError("scorer response lacks numeric \"nll\"/\"token_count\"");
        }
        ScoreResponse response;
        response.nll = value["nll"].get<double>();
        response.token_count = value["token_count"].get<std::int64_t>();
        if (!std::isfinite(response.nll) || response.nll < 0.0) {
            throw TransportError("scorer returned a non-finite or negative nll");
        }
        if (response.token_count < 1) {
            throw TransportError("scorer returned token_count < 1");
        }
        return response;
    }
};

HttpScorer::HttpScorer(Options options) {
    if (options.endpoint.empty()) {
        throw UsageError("http scorer requires an endpoint");
    }
    if (options.max_in_flight < 1) {
        throw UsageError("max_in_flight must be >= 1");
    }
    impl_ = std::make_unique<Impl>(std::move(options));
}

HttpScorer::~HttpScorer() = default;

ScoreResponse HttpScorer::score_nll(const std::string& text) {
    require_nonempty(text);
    nlohmann::json body;
    body["text"] = text;
    const auto response = impl_->post_json("/v1/nll", body);
    return impl_->parse_result(response);
}

std::vector<ScoreResponse> HttpScorer::score_batch(const std::vector<std::string>& texts) {
    std::vector<ScoreResponse> out;
    out.reserve(texts.size());
    const auto chunk = static_cast<std::size_t>(impl_->options.max_in_flight);
    for (std::size_t begin = 0; begin < texts.size(); begin += chunk) {
        const std::size_t end = std::min(begin + chunk, texts.size());
        nlohmann::json body;
        body["texts"] = nlohmann::json::array();
        for (std::size_t i = begin; i < end; ++i) {
            require_nonempty(texts[i]);
            body["texts"].push_back(texts[i]);
        }
        const auto response = impl_->post_json("/v1/nll_batch", body);
        if (!response.is_object() || !response.contains("results") ||
            !response["results"].is_array() || response["results"].size() != end - begin) {
            throw TransportError("scorer batch response size mismatch");
        }
        for (const auto& result : response["results"]) {
            out.push_back(impl_->parse_result(result));
        }
    }
    return out;
}

ScoreResponse CachingScorer::score_nll(const std::string& text) {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto it = cache_.find(text);
        if (it != cache_.end()) {
            ++hits_;
            return it->second;
        }
    }
    const auto response = inner_.score_nll(text);
    std::lock_guard<std::mutex> lock(mutex_);
    ++misses_;
    cache_.emplace(text, response);
    return response;
}

std::vector<ScoreResponse> CachingScorer::score_batch(const std::vector<std::string>& texts) {
    std::vector<ScoreResponse> out(texts.size());
    std::vector<std::size_t> miss_positions;
    std::vector<std::string> miss_texts;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        for (std::size_t i = 0; i < texts.size(); ++i) {
            const auto it = cache_.find(texts[i]);
            if (it != cache_.end()) {
                ++hits_;
                out[i] = it->second;
            } else {
                miss_positions.push_back(i);
                miss_texts.push_back(texts[i]);
            }
        }
    }
    if (!miss_texts.empty()) {
        const auto scored = inner_.score_batch(miss_texts);
        std::lock_guard<std::mutex> lock(mutex_);
        for (std::size_t i = 0; i < miss_positions.size(); ++i) {
            out[miss_positions[i]] = scored[i];
            cache_.emplace(miss_texts[i], scored[i]);
            ++misses_;
        }
    }
    return out;
}

std::size_t CachingScorer::hits() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return hits_;
}

std::size_t CachingScorer::misses() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return misses_;
}

} // namespace icl
