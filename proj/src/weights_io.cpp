#include "avse/weights_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

#include <nlohmann/json.hpp>

#include "avse/error.hpp"

namespace avse {

static_assert(std::endian::native == std::endian::little,
              "weights I/O assumes a little-endian host");

namespace {

using nlohmann::json;

struct TensorRef {
  std::string name;
  std::vector<std::size_t> shape;
  const std::vector<float>* data;
};

std::vector<TensorRef> tensor_list(const GruPostfilterWeights& w) {
  const std::size_t g = 3 * w.hidden_dim;
  std::vector<TensorRef> list{{"norm.mean", {w.input_dim}, &w.feature_mean},
                              {"norm.std", {w.input_dim}, &w.feature_std}};
  for (std::size_t i = 0; i < w.layers.size(); ++i) {
    const std::string p = "gru.l" + std::to_string(i) + ".";
    list.push_back({p + "weight_ih", {g, w.layer_input_dim(i)}, &w.layers[i].weight_ih});
    list.push_back({p + "weight_hh", {g, w.hidden_dim}, &w.layers[i].weight_hh});
    list.push_back({p + "bias_ih", {g}, &w.layers[i].bias_ih});
    list.push_back({p + "bias_hh", {g}, &w.layers[i].bias_hh});
  }
  list.push_back({"head.weight", {w.output_dim, w.hidden_dim}, &w.head_weight});
  list.push_back({"head.bias", {w.output_dim}, &w.head_bias});
  return list;
}

std::size_t get_dim(const json& header, const char* key) {
  if (!header.contains(key) || !header[key].is_number_unsigned()) {
    throw InvalidWeights(std::string("weights header field '") + key +
                         "' missing or not a non-negative integer");
  }
  return header[key].get<std::size_t>();
}

}  // namespace

std::string serialize_weights(const GruPostfilterWeights& weights) {
  weights.validate();
  const auto tensors = tensor_list(weights);
  json manifest = json::array();
  std::size_t offset = 0;
  for (const auto& t : tensors) {
    manifest.push_back({{"name", t.name}, {"shape", t.shape}, {"offset", offset}});
    offset += t.data->size() * sizeof(float);
  }
  const json header = {{"version", kWeightsVersion},
                       {"input_dim", weights.input_dim},
                       {"hidden_dim", weights.hidden_dim},
                       {"num_layers", weights.num_layers},
                       {"output_dim", weights.output_dim},
                       {"epsilon", weights.epsilon},
                       {"gate_order", "reset|update|candidate"},
                       {"dtype", "float32"},
                       {"tensors", manifest}};
  const std::string text = header.dump();

  std::string out(kWeightsMagic.begin(), kWeightsMagic.end());
  const auto length = static_cast<std::uint32_t>(text.size());
  char len_bytes[4];
  std::memcpy(len_bytes, &length, 4);
  out.append(len_bytes, 4);
  out += text;
  for (const auto& t : tensors) {
    out.append(reinterpret_cast<const char*>(t.data->data()), t.data->size() * sizeof(float));
  }
  return out;
}

GruPostfilterWeights parse_weights(const std::string& bytes) {
  if (bytes.size() < 12) throw InvalidWeights("weights file truncated: no header");
  if (std::memcmp(bytes.data(), kWeightsMagic.data(), kWeightsMagic.size()) != 0) {
    throw InvalidWeights("weights file has wrong magic (expected GRUPF\\0\\0\\1)");
  }
  std::uint32_t header_len = 0;
  std::memcpy(&header_len, bytes.data() + 8, 4);
  if (12 + static_cast<std::size_t>(header_len) > bytes.size()) {
    throw InvalidWeights("weights file truncated: header declares " + std::to_string(header_len) +
                         " bytes");
  }
  json header;
  try {
    header = json::parse(bytes.begin() + 12, bytes.begin() + 12 + header_len);
  } catch (const json::exception& e) {
    throw InvalidWeights(std::string("weights header is not valid JSON: ") + e.what());
  }
  if (!header.is_object()) throw InvalidWeights("weights header is not a JSON object");
  if (!header.contains("version") || header["version"] != kWeightsVersion) {
    throw InvalidWeights("unsupported weights version (expected " +
                         std::to_string(kWeightsVersion) + ")");
  }
  if (header.value("gate_order", std::string()) != "reset|update|candidate") {
    throw InvalidWeights("weights header field 'gate_order' must be reset|update|candidate");
  }
  if (header.value("dtype", std::string("float32")) != "float32") {
    throw InvalidWeights("weights header field 'dtype' must be float32");
  }

  GruPostfilterWeights w;
  w.input_dim = get_dim(header, "input_dim");
  w.hidden_dim = get_dim(header, "hidden_dim");
  w.num_layers = get_dim(header, "num_layers");
  w.output_dim = get_dim(header, "output_dim");
  if (!header.contains("epsilon") || !header["epsilon"].is_number()) {
    throw InvalidWeights("weights header field 'epsilon' missing");
  }
  w.epsilon = header["epsilon"].get<double>();
  if (w.num_layers == 0 || w.num_layers > 64) {
    throw InvalidWeights("weights header field 'num_layers' out of range");
  }
  w.layers.resize(w.num_layers);

  std::map<std::string, std::pair<std::vector<std::size_t>, std::size_t>> manifest;
  if (!header.contains("tensors") || !header["tensors"].is_array()) {
    throw InvalidWeights("weights header field 'tensors' missing");
  }
  for (const auto& t : header["tensors"]) {
    try {
      manifest[t.at("name").get<std::string>()] = {t.at("shape").get<std::vector<std::size_t>>(),
                                                   t.at("offset").get<std::size_t>()};
    } catch (const json::exception& e) {
      throw InvalidWeights(std::string("malformed tensor manifest entry: ") + e.what());
    }
  }

  const std::size_t data_start = 12 + header_len;
  const std::size_t data_size = bytes.size() - data_start;
  std::size_t expected_bytes = 0;
  // tensor_list only reads dimensions and target addresses, so it can describe
  // the empty structure before it is filled.
  for (const auto& ref : tensor_list(w)) {
    const auto it = manifest.find(ref.name);
    if (it == manifest.end()) throw InvalidWeights("weights tensor '" + ref.name + "' missing");
    const auto& [shape, offset] = it->second;
    if (shape != ref.shape) {
      std::string want, got;
      for (auto d : ref.shape) want += std::to_string(d) + " ";
      for (auto d : shape) got += std::to_string(d) + " ";
      throw InvalidWeights("weights tensor '" + ref.name + "' has shape [ " + got +
                           "], expected [ " + want + "]");
    }
    std::size_t count = 1;
    for (auto d : shape) count *= d;
    const std::size_t nbytes = count * sizeof(float);
    if (offset > data_size || nbytes > data_size - offset) {
      throw InvalidWeights("weights file truncated: tensor '" + ref.name + "' needs bytes [" +
                           std::to_string(offset) + ", " + std::to_string(offset + nbytes) +
                           ") of a " + std::to_string(data_size) + "-byte data section");
    }
    auto& dst = const_cast<std::vector<float>&>(*ref.data);
    dst.resize(count);
    std::memcpy(dst.data(), bytes.data() + data_start + offset, nbytes);
    expected_bytes += nbytes;
  }
  if (manifest.size() != tensor_list(w).size()) {
    throw InvalidWeights("weights manifest holds unexpected tensors");
  }
  if (expected_bytes != data_size) {
    throw InvalidWeights("weights data section is " + std::to_string(data_size) +
                         " bytes, tensors account for " + std::to_string(expected_bytes));
  }
  w.validate();
  return w;
}

void save_weights(const GruPostfilterWeights& weights, const std::filesystem::path& path) {
  const auto bytes = serialize_weights(weights);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write weights file " + path.string());
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("failed writing weights file " + path.string());
}

GruPostfilterWeights load_weights(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open weights file " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  try {
    return parse_weights(bytes);
  } catch (const InvalidWeights& e) {
    throw InvalidWeights(path.string() + ": " + e.what());
  }
}

}  // namespace avse
