#include "sftkit/chunker.hpp"

namespace sftkit {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

namespace {

std::string join_lines(const std::vector<std::string>& lines, std::size_t first,
                       std::size_t last) {
    std::string out;
    for (std::size_t i = first; i <= last; ++i) {
        if (i > first) out.push_back('\n');
        out += lines[i];
    }
    return out;
}

}  // namespace

std::vector<Chunk> chunk_document(const RawDocument& doc, const WindowSpec& spec) {
    const auto lines = split_lines(doc.text);
    const std::size_t count = lines.size();
    std::vector<Chunk> chunks;
    if (count == 0) return chunks;

    const std::size_t w = spec.size_lines;
    const std::size_t s = spec.stride_lines;

    if (count < w) {
        chunks.push_back({doc.id, 0, count - 1, join_lines(lines, 0, count - 1), doc.subject});
        return chunks;
    }

    std::size_t last_full_start = 0;
    for (std::size_t start = 0; start + w <= count; start += s) {
        chunks.push_back({doc.id, start, start + w - 1, join_lines(lines, start, start + w - 1),
                          doc.subject});
        last_full_start = start;
    }

    const std::size_t covered_end = last_full_start + w;  // one past last covered line
    if (spec.emit_tail && covered_end < count) {
        const std::size_t tail_start = last_full_start + s;
        chunks.push_back({doc.id, tail_start, count - 1, join_lines(lines, tail_start, count - 1),
                          doc.subject});
    }
    return chunks;
}

}  // namespace sftkit
