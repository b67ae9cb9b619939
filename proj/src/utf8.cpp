#include "icl/utf8.hpp"

namespace icl::utf8 {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

bool in_range(char32_t cp, char32_t lo, char32_t hi) {
    return cp >= lo && cp <= hi;
}

} // namespace

std::vector<char32_t> decode(std::string_view text) {
    std::vector<char32_t> out;
    out.reserve(text.size());
    std::size_t i = 0;
    const auto n = text.size();
    while (i < n) {
        const auto b0 = static_cast<unsigned char>(text[i]);
        std::size_t len = 0;
        char32_t cp = 0;
        if (b0 < 0x80) {
            len = 1;
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        } else {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        if (i + len > n) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        bool valid = true;
        for (std::size_t j = 1; j < len; ++j) {
            const auto bj = static_cast<unsigned char>(text[i + j]);
            if ((bj & 0xC0) != 0x80) {
                valid = false;
                break;
            }
            cp = (cp << 6) | (bj & 0x3F);
        }
        // reject overlong forms and surrogate range
        if (valid) {
            if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
                (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
                (cp >= 0xD800 && cp <= 0xDFFF)) {
                valid = false;
            }
        }
        if (!valid) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::string encode(char32_t cp) {
    std::string out;
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
    return out;
}

std::size_t count_codepoints(std::string_view text) {
    std::size_t count = 0;
    for (const char c : text) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
            ++count;
        }
    }
    return count;
}

char32_t fold(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z') {
        return cp + 0x20;
    }
    // Latin-1 supplement, skipping the multiplication sign
    if (in_range(cp, 0xC0, 0xDE) && cp != 0xD7) {
        return cp + 0x20;
    }
    // Greek capitals
    if (in_range(cp, 0x391, 0x3A9) && cp != 0x3A2) {
        return cp + 0x20;
    }
    // Cyrillic: А..Я then Ѐ..Џ
    if (in_range(cp, 0x410, 0x42F)) {
        return cp + 0x20;
    }
    if (in_range(cp, 0x400, 0x40F)) {
        return cp + 0x50;
    }
    return cp;
}

bool is_cjk(char32_t cp) {
    return in_range(cp, 0x3040, 0x30FF)     // hiragana, katakana
        || in_range(cp, 0x3400, 0x4DBF)     // CJK extension A
        || in_range(cp, 0x4E00, 0x9FFF)     // CJK unified
        || in_range(cp, 0xF900, 0xFAFF)     // CJK compatibility
        || in_range(cp, 0xAC00, 0xD7AF)     // hangul syllables
        || in_range(cp, 0x20000, 0x2FFFF);  // CJK extensions B..F
}

bool is_word(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= U'0' && cp <= U'9') || (cp >= U'a' && cp <= U'z') ||
               (cp >= U'A' && cp <= U'Z');
    }
    // Non-ASCII: treat as a word codepoint unless it falls in a known
    // punctuation/symbol block. Approximate but deterministic.
    if (cp <= 0xBF || cp == 0xD7 || cp == 0xF7) {
        return false;
    }
    if (in_range(cp, 0x2000, 0x206F)     // general punctuation
        || in_range(cp, 0x2E00, 0x2E7F)  // supplemental punctuation
        || in_range(cp, 0x3000, 0x303F)  // CJK symbols and punctuation
        || in_range(cp, 0xFE30, 0xFE4F)  // CJK compatibility forms
        || in_range(cp, 0xFE50, 0xFE6F)  // small form variants
        || in_range(cp, 0xFF01, 0xFF0F)  // fullwidth punctuation
        || in_range(cp, 0xFF1A, 0xFF20)
        || in_range(cp, 0xFF3B, 0xFF40)
        || in_range(cp, 0xFF5B, 0xFF65)) {
        return false;
    }
    return true;
}

} // namespace icl::utf8
