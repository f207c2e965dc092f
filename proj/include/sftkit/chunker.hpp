#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "sftkit/corpus.hpp"

namespace sftkit {

// Line-window geometry. Defaults: 50-line window, 30-line stride.
struct WindowSpec {
    std::size_t size_lines = 50;
    std::size_t stride_lines = 30;
    bool emit_tail = true;

    WindowSpec() = default;
    WindowSpec(std::size_t size, std::size_t stride, bool tail = true)
        : size_lines(size), stride_lines(stride), emit_tail(tail) {
        if (size_lines == 0 || stride_lines == 0) {
            throw std::invalid_argument("window size and stride must be positive");
        }
        if (stride_lines > size_lines) {
            throw std::invalid_argument("stride must not exceed window size");
        }
    }
};

struct Chunk {
    std::string doc_id;
    std::size_t start_line = 0;  // 0-based, inclusive
    std::size_t end_line = 0;    // 0-based, inclusive
    std::string text;            // the joined source lines of [start, end]
    CpaSubject subject = CpaSubject::Others;

    // Stable id used by instruction records to reference their source chunk.
    std::string id() const {
        return doc_id + "#" + std::to_string(start_line) + "-" + std::to_string(end_line);
    }
};

// Lines = text split on '\n'; a trailing empty line (text ending in '\n')
// is ignored.
std::vector<std::string> split_lines(const std::string& text);

// Full windows start at 0, s, 2s, ... while start + w <= line_count.
// Documents shorter than the window yield a single chunk covering the
// whole document. With emit_tail, lines left uncovered after the last
// full window get one final chunk starting at the next stride position.
std::vector<Chunk> chunk_document(const RawDocument& doc, const WindowSpec& spec);

}  // namespace sftkit
