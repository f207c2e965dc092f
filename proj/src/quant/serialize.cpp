#include "sftkit/quant/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sftkit::quant {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFFu));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFFu));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFFu));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFFu));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
    return static_cast<std::uint32_t>(in[at]) | (static_cast<std::uint32_t>(in[at + 1]) << 8) |
           (static_cast<std::uint32_t>(in[at + 2]) << 16) |
           (static_cast<std::uint32_t>(in[at + 3]) << 24);
}

std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t at) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[at + static_cast<std::size_t>(i)]) << (8 * i);
    return v;
}

// Little-endian bitstream: value i occupies bits [i*width, (i+1)*width).
void pack_bits(std::vector<std::uint8_t>& out, const std::vector<std::uint8_t>& values,
               int width) {
    const std::size_t total_bits = values.size() * static_cast<std::size_t>(width);
    const std::size_t bytes = (total_bits + 7) / 8;
    const std::size_t base = out.size();
    out.resize(base + bytes, 0);
    std::size_t bit = 0;
    for (std::uint8_t v : values) {
        for (int k = 0; k < width; ++k, ++bit) {
            if (v & (1u << k)) out[base + bit / 8] |= static_cast<std::uint8_t>(1u << (bit % 8));
        }
    }
}

std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> in, std::size_t at,
                                      std::size_t count, int width) {
    std::vector<std::uint8_t> out(count, 0);
    std::size_t bit = 0;
    for (std::size_t i = 0; i < count; ++i) {
        std::uint8_t v = 0;
        for (int k = 0; k < width; ++k, ++bit) {
            if (in[at + bit / 8] & (1u << (bit % 8))) v |= static_cast<std::uint8_t>(1u << k);
        }
        out[i] = v;
    }
    return out;
}

}  // namespace

std::size_t header_size(std::size_t ndims) {
    return 28 + 8 * ndims;
}

std::size_t serialized_size(const QuantizedTensor& qt) {
    const std::size_t n = qt.element_count();
    const std::size_t code_bytes = (n * static_cast<std::size_t>(qt.codebook_bits) + 7) / 8;
    const std::size_t const_bytes =
        (qt.block_count() * static_cast<std::size_t>(qt.spec.const_bits) + 7) / 8;
    return header_size(qt.shape.size()) + code_bytes + const_bytes + 4 * qt.group_count();
}

std::vector<std::uint8_t> serialize(const QuantizedTensor& qt) {
    qt.check_consistent();
    std::vector<std::uint8_t> out;
    out.reserve(serialized_size(qt));
    out.push_back('N');
    out.push_back('F');
    out.push_back('Q');
    out.push_back('T');
    put_u32(out, kContainerVersion);
    put_u32(out, static_cast<std::uint32_t>(qt.codebook_bits));
    put_u32(out, static_cast<std::uint32_t>(qt.spec.block_size));
    put_u32(out, static_cast<std::uint32_t>(qt.spec.const_group_size));
    put_u32(out, static_cast<std::uint32_t>(qt.spec.const_bits));
    put_u32(out, static_cast<std::uint32_t>(qt.shape.size()));
    for (std::size_t d : qt.shape) put_u64(out, d);

    pack_bits(out, qt.codes, qt.codebook_bits);
    pack_bits(out, qt.c2_q, qt.spec.const_bits);
    for (float scale : qt.c1) {
        const std::uint32_t bits = std::bit_cast<std::uint32_t>(scale);
        put_u32(out, bits);
    }
    if (out.size() != serialized_size(qt)) {
        throw std::logic_error("serialized size does not match the closed form");
    }
    return out;
}

QuantizedTensor deserialize(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 28 || bytes[0] != 'N' || bytes[1] != 'F' || bytes[2] != 'Q' ||
        bytes[3] != 'T') {
        throw std::runtime_error("not an NFQT container");
    }
    if (get_u32(bytes, 4) != kContainerVersion) {
        throw std::runtime_error("unsupported container version");
    }
    QuantizedTensor qt;
    qt.codebook_bits = static_cast<int>(get_u32(bytes, 8));
    qt.spec.block_size = get_u32(bytes, 12);
    qt.spec.const_group_size = get_u32(bytes, 16);
    qt.spec.const_bits = static_cast<int>(get_u32(bytes, 20));
    const std::size_t ndims = get_u32(bytes, 24);
    if (bytes.size() < header_size(ndims)) {
        throw std::runtime_error("truncated container header");
    }
    qt.shape.resize(ndims);
    for (std::size_t i = 0; i < ndims; ++i) {
        qt.shape[i] = static_cast<std::size_t>(get_u64(bytes, 28 + 8 * i));
    }

    const std::size_t expected = serialized_size(qt);
    if (bytes.size() != expected) {
        throw std::runtime_error("container size mismatch");
    }

    std::size_t at = header_size(ndims);
    const std::size_t n = qt.element_count();
    qt.codes = unpack_bits(bytes, at, n, qt.codebook_bits);
    at += (n * static_cast<std::size_t>(qt.codebook_bits) + 7) / 8;
    const std::size_t blocks = qt.block_count();
    qt.c2_q = unpack_bits(bytes, at, blocks, qt.spec.const_bits);
    at += (blocks * static_cast<std::size_t>(qt.spec.const_bits) + 7) / 8;
    qt.c1.resize(qt.group_count());
    for (std::size_t g = 0; g < qt.c1.size(); ++g) {
        qt.c1[g] = std::bit_cast<float>(get_u32(bytes, at + 4 * g));
    }
    qt.check_consistent();
    return qt;
}

void save_quantized(const std::string& path, const QuantizedTensor& qt) {
    const auto bytes = serialize(qt);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing " + path);
}

QuantizedTensor load_quantized(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

}  // namespace sftkit::quant
