// GRUPF weights file: the exchange format between the trainer and this engine.
//
//   offset 0   8 bytes  magic 'G' 'R' 'U' 'P' 'F' 0x00 0x00 0x01
//   offset 8   uint32   header length H (little-endian)
//   offset 12  H bytes  JSON header (keys sorted, compact):
//                {dtype:"float32", epsilon, gate_order:"reset|update|candidate",
//                 hidden_dim, input_dim, num_layers, output_dim,
//                 tensors:[{name, offset, shape}], version:1}
//   offset 12+H         float32 little-endian tensors, row-major; `offset` is
//                       relative to the start of this data section
//
// Tensors: norm.mean [in], norm.std [in], then per layer i
// gru.l{i}.weight_ih [3H, in_i], gru.l{i}.weight_hh [3H, H], gru.l{i}.bias_ih
// [3H], gru.l{i}.bias_hh [3H]; finally head.weight [out, H], head.bias [out].
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "avse/gru.hpp"

namespace avse {

inline constexpr std::array<std::uint8_t, 8> kWeightsMagic = {'G', 'R', 'U', 'P',
                                                              'F', 0x00, 0x00, 0x01};
inline constexpr int kWeightsVersion = 1;

std::string serialize_weights(const GruPostfilterWeights& weights);
// Throws InvalidWeights with a field-level message on any inconsistency.
GruPostfilterWeights parse_weights(const std::string& bytes);

void save_weights(const GruPostfilterWeights& weights, const std::filesystem::path& path);
GruPostfilterWeights load_weights(const std::filesystem::path& path);

}  // namespace avse
