#include "fedledger/nn/param_vector.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "fedledger/errors.hpp"

namespace fedledger::nn {

std::size_t total_count(std::span<const LayerShape> shapes) {
  std::size_t n = 0;
  for (const auto& s : shapes) n += s.count();
  return n;
}

ParamVector::ParamVector(std::vector<LayerShape> layer_shapes, double fill)
    : values(total_count(layer_shapes), fill), shapes(std::move(layer_shapes)) {}

std::size_t ParamVector::layer_offset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < layer; ++i) off += shapes[i].count();
  return off;
}

std::span<double> ParamVector::weights(std::size_t layer) {
  return {values.data() + layer_offset(layer), shapes[layer].weight_count()};
}
std::span<const double> ParamVector::weights(std::size_t layer) const {
  return {values.data() + layer_offset(layer), shapes[layer].weight_count()};
}
std::span<double> ParamVector::bias(std::size_t layer) {
  return {values.data() + layer_offset(layer) + shapes[layer].weight_count(), shapes[layer].rows};
}
std::span<const double> ParamVector::bias(std::size_t layer) const {
  return {values.data() + layer_offset(layer) + shapes[layer].weight_count(), shapes[layer].rows};
}

void axpy(ParamVector& target, double scale, const ParamVector& other) {
  if (target.values.size() != other.values.size()) throw ShapeError("axpy: length mismatch");
  for (std::size_t i = 0; i < target.values.size(); ++i) target.values[i] += scale * other.values[i];
}

bool bit_equal(const ParamVector& a, const ParamVector& b) {
  return a.shapes == b.shapes && a.values.size() == b.values.size() &&
         std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0;
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw DataError("container truncated");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string checksum(const ParamVector& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double d : params.values) {
    const auto bits = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) {
      h ^= static_cast<std::uint8_t>(bits >> (8 * i));
      h *= 0x100000001b3ULL;
    }
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = kHex[h & 0xf];
  return out;
}

std::vector<std::uint8_t> encode_container(const Container& container) {
  std::vector<std::uint8_t> out;
  out.reserve(12 + container.blocks.size() * 8 + container.values.size() * 8);
  out.insert(out.end(), container.magic, container.magic + 4);
  put_u32(out, kContainerVersion);
  put_u32(out, static_cast<std::uint32_t>(container.blocks.size()));
  for (const auto& b : container.blocks) {
    put_u32(out, b.rows);
    put_u32(out, b.cols);
  }
  for (double d : container.values) put_f64(out, d);
  return out;
}

Container decode_container(std::span<const std::uint8_t> bytes, const char (&expected_magic)[5]) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), expected_magic, 4) != 0)
    throw DataError(std::string("bad container magic, expected ") + expected_magic);
  Container c;
  std::memcpy(c.magic, bytes.data(), 4);
  Reader r(bytes.subspan(4));
  const auto version = r.u32();
  if (version != kContainerVersion)
    throw DataError("unsupported container version " + std::to_string(version));
  const auto n_blocks = r.u32();
  c.blocks.reserve(n_blocks);
  for (std::uint32_t i = 0; i < n_blocks; ++i) {
    LayerShape s;
    s.rows = r.u32();
    s.cols = r.u32();
    c.blocks.push_back(s);
  }
  if (r.remaining() % 8 != 0) throw DataError("container payload is not a whole number of f64");
  c.values.resize(r.remaining() / 8);
  for (auto& v : c.values) v = r.f64();
  return c;
}

std::vector<std::uint8_t> serialize(const ParamVector& params) {
  Container c;
  c.blocks = params.shapes;
  c.values = params.values;
  return encode_container(c);
}

ParamVector deserialize(std::span<const std::uint8_t> bytes) {
  Container c = decode_container(bytes, "FLAE");
  if (c.values.size() != total_count(c.blocks))
    throw DataError("FLAE payload length does not match layer shapes");
  ParamVector p;
  p.shapes = std::move(c.blocks);
  p.values = std::move(c.values);
  return p;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

void save_params(const ParamVector& params, const std::filesystem::path& path) {
  write_file_bytes(path, serialize(params));
}

ParamVector load_params(const std::filesystem::path& path) { return deserialize(read_file_bytes(path)); }

}  // namespace fedledger::nn
