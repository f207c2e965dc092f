#include "sftkit/text.hpp"

#include <algorithm>

namespace sftkit::text {

namespace {

bool is_space_cp(char32_t cp) {
    switch (cp) {
        case U' ':
        case U'\t':
        case U'\n':
        case U'\r':
        case 0x000Bu:
        case 0x000Cu:
        case 0x00A0u:  // NBSP
        case 0x3000u:  // ideographic space
            return true;
        default:
            return false;
    }
}

bool is_word_char(char32_t cp) {
    if (cp >= U'0' && cp <= U'9') return true;
    if (cp >= U'A' && cp <= U'Z') return true;
    if (cp >= U'a' && cp <= U'z') return true;
    // Latin-1 supplement letters through Latin Extended-B.
    if (cp >= 0x00C0u && cp <= 0x024Fu && cp != 0x00D7u && cp != 0x00F7u) return true;
    return false;
}

}  // namespace

bool decode_utf8(const std::string& s, std::vector<char32_t>& out,
                 std::size_t* error_offset) {
    out.clear();
    out.reserve(s.size());
    const auto* p = reinterpret_cast<const unsigned char*>(s.data());
    const std::size_t n = s.size();
    std::size_t i = 0;
    while (i < n) {
        const unsigned char b0 = p[i];
        char32_t cp = 0;
        std::size_t len = 0;
        if (b0 < 0x80u) {
            cp = b0;
            len = 1;
        } else if ((b0 & 0xE0u) == 0xC0u) {
            cp = b0 & 0x1Fu;
            len = 2;
        } else if ((b0 & 0xF0u) == 0xE0u) {
            cp = b0 & 0x0Fu;
            len = 3;
        } else if ((b0 & 0xF8u) == 0xF0u) {
            cp = b0 & 0x07u;
            len = 4;
        } else {
            if (error_offset) *error_offset = i;
            return false;
        }
        if (i + len > n) {
            if (error_offset) *error_offset = i;
            return false;
        }
        for (std::size_t k = 1; k < len; ++k) {
            const unsigned char c = p[i + k];
            if ((c & 0xC0u) != 0x80u) {
                if (error_offset) *error_offset = i;
                return false;
            }
            cp = (cp << 6) | (c & 0x3Fu);
        }
        // Overlong forms, surrogates, out-of-range.
        const bool overlong = (len == 2 && cp < 0x80u) ||
                              (len == 3 && cp < 0x800u) ||
                              (len == 4 && cp < 0x10000u);
        if (overlong || cp > 0x10FFFFu || (cp >= 0xD800u && cp <= 0xDFFFu)) {
            if (error_offset) *error_offset = i;
            return false;
        }
        out.push_back(cp);
        i += len;
    }
    return true;
}

bool is_valid_utf8(const std::string& s) {
    std::vector<char32_t> tmp;
    return decode_utf8(s, tmp);
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80u) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800u) {
        out.push_back(static_cast<char>(0xC0u | (cp >> 6)));
        out.push_back(static_cast<char>(0x80u | (cp & 0x3Fu)));
    } else if (cp < 0x10000u) {
        out.push_back(static_cast<char>(0xE0u | (cp >> 12)));
        out.push_back(static_cast<char>(0x80u | ((cp >> 6) & 0x3Fu)));
        out.push_back(static_cast<char>(0x80u | (cp & 0x3Fu)));
    } else {
        out.push_back(static_cast<char>(0xF0u | (cp >> 18)));
        out.push_back(static_cast<char>(0x80u | ((cp >> 12) & 0x3Fu)));
        out.push_back(static_cast<char>(0x80u | ((cp >> 6) & 0x3Fu)));
        out.push_back(static_cast<char>(0x80u | (cp & 0x3Fu)));
    }
}

std::string encode_utf8(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size() * 3);
    for (char32_t cp : cps) append_utf8(out, cp);
    return out;
}

bool is_cjk(char32_t cp) {
    return (cp >= 0x4E00u && cp <= 0x9FFFu) ||
           (cp >= 0x3400u && cp <= 0x4DBFu) ||
           (cp >= 0xF900u && cp <= 0xFAFFu);
}

std::vector<std::string> word_tokens(const std::string& s) {
    std::vector<char32_t> cps;
    decode_utf8(s, cps);
    std::vector<std::string> tokens;
    std::vector<char32_t> run;
    bool run_has_word_char = false;
    auto flush_run = [&] {
        if (!run.empty() && run_has_word_char) tokens.push_back(encode_utf8(run));
        run.clear();
        run_has_word_char = false;
    };
    for (char32_t cp : cps) {
        if (is_space_cp(cp)) {
            flush_run();
        } else if (is_cjk(cp)) {
            flush_run();
            tokens.push_back(encode_utf8({cp}));
        } else {
            run.push_back(cp);
            // Anything outside ASCII/Latin punctuation ranges is treated as
            // word-bearing so non-Latin scripts still count.
            run_has_word_char = run_has_word_char || is_word_char(cp) ||
                                (cp >= 0x0370u && !is_space_cp(cp) &&
                                 !(cp >= 0x2000u && cp <= 0x303Fu) &&
                                 !(cp >= 0xFE30u && cp <= 0xFF0Fu) &&
                                 !(cp >= 0xFF1Au && cp <= 0xFF65u));
        }
    }
    flush_run();
    return tokens;
}

std::size_t word_count(const std::string& s) {
    return word_tokens(s).size();
}

std::size_t sentence_count(const std::string& s) {
    std::vector<char32_t> cps;
    decode_utf8(s, cps);
    std::size_t marks = 0;
    bool any = false;
    for (char32_t cp : cps) {
        if (!is_space_cp(cp)) any = true;
        if (cp == U'.' || cp == U'!' || cp == U'?' ||
            cp == 0x3002u /*。*/ || cp == 0xFF01u /*！*/ || cp == 0xFF1Fu /*？*/) {
            ++marks;
        }
    }
    if (!any) return 0;
    return marks == 0 ? 1 : marks;
}

std::vector<std::uint64_t> char_shingles(const std::string& s, std::size_t n) {
    std::vector<char32_t> cps;
    decode_utf8(s, cps);
    std::vector<std::uint64_t> out;
    if (n == 0 || cps.size() < n) return out;
    out.reserve(cps.size() - n + 1);
    for (std::size_t i = 0; i + n <= cps.size(); ++i) {
        std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
        for (std::size_t k = 0; k < n; ++k) {
            char32_t cp = cps[i + k];
            for (int shift = 0; shift < 32; shift += 8) {
                h ^= static_cast<std::uint64_t>((cp >> shift) & 0xFFu);
                h *= 1099511628211ULL;
            }
        }
        out.push_back(h);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double jaccard(const std::vector<std::uint64_t>& a,
               const std::vector<std::uint64_t>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            ++inter;
            ++i;
            ++j;
        }
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace sftkit::text
