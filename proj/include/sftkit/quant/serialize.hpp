#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sftkit/quant/blockwise.hpp"

namespace sftkit::quant {

// Quantized-tensor container, bit-exact across platforms:
//
//   bytes 0-3    magic "NFQT"
//   bytes 4-7    u32 LE version (1)
//   bytes 8-11   u32 LE codebook bits k
//   bytes 12-15  u32 LE block size
//   bytes 16-19  u32 LE constant group size
//   bytes 20-23  u32 LE constant bits
//   bytes 24-27  u32 LE ndims
//   then         u64 LE dims[ndims]
//   then         ceil(N*k/8) bytes of codes, little-endian bitstream
//                (k=8: one byte per code; k=4: two codes per byte, low
//                nibble first)
//   then         ceil(blocks*const_bits/8) bytes of quantized constants,
//                same bitstream scheme
//   then         4 bytes per group: c1 as float32 LE
constexpr std::uint32_t kContainerVersion = 1;

std::size_t header_size(std::size_t ndims);

// Closed-form byte size of the container for this tensor.
std::size_t serialized_size(const QuantizedTensor& qt);

std::vector<std::uint8_t> serialize(const QuantizedTensor& qt);

// Throws std::runtime_error on bad magic/version/truncation and
// std::out_of_range on corrupt codes.
QuantizedTensor deserialize(std::span<const std::uint8_t> bytes);

void save_quantized(const std::string& path, const QuantizedTensor& qt);
QuantizedTensor load_quantized(const std::string& path);

}  // namespace sftkit::quant
