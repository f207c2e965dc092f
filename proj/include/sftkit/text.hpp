#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sftkit::text {

// Decodes UTF-8 into codepoints. Returns false (and stops) at the first
// invalid sequence; `out` then holds the codepoints decoded so far and
// `error_offset` the byte offset of the failure.
bool decode_utf8(const std::string& s, std::vector<char32_t>& out,
                 std::size_t* error_offset = nullptr);

bool is_valid_utf8(const std::string& s);

void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(const std::vector<char32_t>& cps);

// CJK unified ideographs (base block, extension A, compatibility block).
bool is_cjk(char32_t cp);

// Word counting rule used across the toolkit: each CJK ideograph counts
// as one word; any other maximal run of non-space codepoints counts as
// one word iff it contains at least one letter or digit (so bare
// punctuation runs are not words).
std::size_t word_count(const std::string& s);

// The unigrams behind word_count: CJK chars as single-codepoint tokens,
// letter/digit-bearing runs as-is. Used for instruction-level Jaccard.
std::vector<std::string> word_tokens(const std::string& s);

// Sentence count = number of terminal punctuation marks (。！？.!?),
// minimum 1 for non-empty text.
std::size_t sentence_count(const std::string& s);

// Character shingles over codepoints, hashed to 64-bit FNV-1a values,
// deduplicated and sorted. Texts shorter than n codepoints yield an
// empty set.
std::vector<std::uint64_t> char_shingles(const std::string& s, std::size_t n);

// Jaccard similarity of two sorted unique shingle vectors. Both empty -> 0.
double jaccard(const std::vector<std::uint64_t>& a,
               const std::vector<std::uint64_t>& b);

}  // namespace sftkit::text
