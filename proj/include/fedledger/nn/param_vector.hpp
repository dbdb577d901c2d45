#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fedledger::nn {

// One dense layer: `rows` outputs, `cols` inputs, `rows` biases. Values are
// stored as the row-major weight block followed by the bias block.
struct LayerShape {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;

  std::size_t weight_count() const { return std::size_t{rows} * cols; }
  std::size_t count() const { return weight_count() + rows; }
  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

// Flat model parameters (or gradients, control variates, ...) with the
// per-layer shape metadata. This is the unit exchanged between clients and
// the server.
struct ParamVector {
  std::vector<double> values;
  std::vector<LayerShape> shapes;

  ParamVector() = default;
  explicit ParamVector(std::vector<LayerShape> layer_shapes, double fill = 0.0);

  std::size_t size() const { return values.size(); }
  std::size_t layer_offset(std::size_t layer) const;
  std::span<double> weights(std::size_t layer);
  std::span<const double> weights(std::size_t layer) const;
  std::span<double> bias(std::size_t layer);
  std::span<const double> bias(std::size_t layer) const;

  bool same_shape(const ParamVector& other) const { return shapes == other.shapes; }
  ParamVector zeros_like() const { return ParamVector(shapes, 0.0); }

  friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

std::size_t total_count(std::span<const LayerShape> shapes);

// this += scale * other. Throws ShapeError on mismatch.
void axpy(ParamVector& target, double scale, const ParamVector& other);

// Bit-level equality (distinguishes -0.0 from 0.0 and compares NaN payloads).
bool bit_equal(const ParamVector& a, const ParamVector& b);

// 64-bit FNV-1a over the raw little-endian value bytes, as 16 hex digits.
std::string checksum(const ParamVector& params);

// Checkpoint container: magic, u32 version, u32 block count, per block u32
// rows and cols, then the raw f64 values, all little-endian. ParamVectors use
// magic "FLAE"; cached datasets reuse the container with magic "FLDS".
inline constexpr std::uint32_t kContainerVersion = 1;

struct Container {
  char magic[4] = {'F', 'L', 'A', 'E'};
  std::vector<LayerShape> blocks;
  std::vector<double> values;
};

std::vector<std::uint8_t> encode_container(const Container& container);
Container decode_container(std::span<const std::uint8_t> bytes, const char (&expected_magic)[5]);

std::vector<std::uint8_t> serialize(const ParamVector& params);
ParamVector deserialize(std::span<const std::uint8_t> bytes);

void save_params(const ParamVector& params, const std::filesystem::path& path);
ParamVector load_params(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace fedledger::nn
