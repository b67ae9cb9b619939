#include "icl/prompt.hpp"

#include <fstream>

#include <json.hpp>

#include "icl/errors.hpp"

namespace icl {

namespace {

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

std::string replace_all(std::string text, const std::string& needle,
                        const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), value);
        pos += value.size();
    }
    return text;
}

std::string expand(const std::string& pattern, const std::string& src_lang,
                   const std::string& tgt_lang, const std::string& source,
                   const std::string* target) {
    std::string out = replace_all(pattern, "{src_lang}", src_lang);
    out = replace_all(out, "{tgt_lang}", tgt_lang);
    out = replace_all(out, "{source}", source);
    if (target != nullptr) {
        out = replace_all(out, "{target}", *target);
    }
    return out;
}

} // namespace

PromptTemplate default_template() {
    PromptTemplate tmpl;
    tmpl.demo_pattern =
        "Translate {src_lang} to {tgt_lang}:\n{src_lang}: {source}\n{tgt_lang}: {target}";
    tmpl.query_pattern =
        "Translate {src_lang} to {tgt_lang}:\n{src_lang}: {source}\n{tgt_lang}:";
    tmpl.joiner = "\n\n";
    tmpl.lang_names = {
        {"en-zh", {"English", "Chinese"}},
        {"zh-en", {"Chinese", "English"}},
        {"ru-de", {"Russian", "German"}},
        {"de-ru", {"German", "Russian"}},
        {"en-de", {"English", "German"}},
        {"de-en", {"German", "English"}},
        {"en-ru", {"English", "Russian"}},
        {"ru-en", {"Russian", "English"}},
    };
    return tmpl;
}

PromptTemplate load_template(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open template file: " + path);
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": malformed template file: " + e.what());
    }
    if (!doc.is_object()) {
        throw DataError(path + ": template file must hold a JSON object");
    }
    PromptTemplate tmpl = default_template();
    if (doc.contains("demo_pattern")) {
        tmpl.demo_pattern = doc["demo_pattern"].get<std::string>();
    }
    if (doc.contains("query_pattern")) {
        tmpl.query_pattern = doc["query_pattern"].get<std::string>();
    }
    if (doc.contains("joiner")) {
        tmpl.joiner = doc["joiner"].get<std::string>();
    }
    if (doc.contains("lang_names")) {
        const auto& names = doc["lang_names"];
        if (!names.is_object()) {
            throw DataError(path + ": \"lang_names\" must map pair tags to [src, tgt] names");
        }
        for (const auto& [tag, value] : names.items()) {
            if (!value.is_array() || value.size() != 2) {
                throw DataError(path + ": lang_names[\"" + tag +
                                "\"] must be a two-element array");
            }
            tmpl.lang_names[tag] = {value[0].get<std::string>(), value[1].get<std::string>()};
        }
    }
    validate_template(tmpl);
    return tmpl;
}

void validate_template(const PromptTemplate& tmpl) {
    if (count_occurrences(tmpl.demo_pattern, "{source}") != 1) {
        throw DataError("demo_pattern must contain {source} exactly once");
    }
    if (count_occurrences(tmpl.demo_pattern, "{target}") != 1) {
        throw DataError("demo_pattern must contain {target} exactly once");
    }
    if (count_occurrences(tmpl.query_pattern, "{source}") != 1) {
        throw DataError("query_pattern must contain {source} exactly once");
    }
    if (count_occurrences(tmpl.query_pattern, "{target}") != 0) {
        throw DataError("query_pattern must not contain {target}");
    }
}

std::pair<std::string, std::string> language_names(const PromptTemplate& tmpl,
                                                   const std::string& lang_pair) {
    const auto it = tmpl.lang_names.find(lang_pair);
    if (it != tmpl.lang_names.end()) {
        return it->second;
    }
    const auto dash = lang_pair.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == lang_pair.size()) {
        throw DataError("language pair tag must look like \"src-tgt\": \"" + lang_pair + "\"");
    }
    return {lang_pair.substr(0, dash), lang_pair.substr(dash + 1)};
}

std::string render_demonstrations(const PromptTemplate& tmpl, const std::string& lang_pair,
                                  const std::vector<const Demonstration*>& demos) {
    validate_template(tmpl);
    if (demos.empty()) {
        return "";
    }
    const auto [src_lang, tgt_lang] = language_names(tmpl, lang_pair);
    std::string out;
    for (std::size_t i = 0; i < demos.size(); ++i) {
        if (i > 0) {
            out += tmpl.joiner;
        }
        out += expand(tmpl.demo_pattern, src_lang, tgt_lang, demos[i]->source,
                      &demos[i]->target);
    }
    return out;
}

std::string render_prompt(const PromptTemplate& tmpl, const std::string& lang_pair,
                          const std::vector<const Demonstration*>& demos,
                          const TestInput& x) {
    validate_template(tmpl);
    const auto [src_lang, tgt_lang] = language_names(tmpl, lang_pair);
    const std::string query = expand(tmpl.query_pattern, src_lang, tgt_lang, x.source, nullptr);
    if (demos.empty()) {
        return query;
    }
    return render_demonstrations(tmpl, lang_pair, demos) + tmpl.joiner + query;
}

std::string PromptContext::demos_text(const std::vector<const Demonstration*>& demos) const {
    return render_demonstrations(*tmpl, lang_pair, demos);
}

std::string PromptContext::prompt_text(const std::vector<const Demonstration*>& demos,
                                       const TestInput& x) const {
    std::string prompt = render_prompt(*tmpl, lang_pair, demos, x);
    if (prompt.size() > max_prompt_chars) {
        throw DataError("prompt for test \"" + x.id + "\" exceeds the " +
                        std::to_string(max_prompt_chars) + "-character guard (" +
                        std::to_string(prompt.size()) + " characters)");
    }
    return prompt;
}

} // namespace icl
