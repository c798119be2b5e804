#include "texsynth/paramfile.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace texsynth {

namespace {

void put_u8(std::ostream& out, std::uint8_t v) { out.put(static_cast<char>(v)); }

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  put_u32(out, static_cast<std::uint32_t>(v));
  put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

std::uint8_t get_u8(std::istream& in) {
  char c;
  in.get(c);
  return static_cast<std::uint8_t>(c);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return b[0] | (b[1] << 8) | (b[2] << 16) | (std::uint32_t(b[3]) << 24);
}

std::uint64_t get_u64(std::istream& in) {
  const std::uint64_t lo = get_u32(in);
  const std::uint64_t hi = get_u32(in);
  return lo | (hi << 32);
}

double get_f64(std::istream& in) {
  const std::uint64_t bits = get_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

} // namespace

void save_params(const ParamFile& pf, const std::string& path) {
  if (pf.params.layers.size() != pf.bank.layers.size())
    throw std::invalid_argument("save_params: bank/gram layer count mismatch");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);

  out.write("TXP1", 4);
  put_u32(out, kParamFileVersion);
  put_u32(out, static_cast<std::uint32_t>(pf.params.stft_config.window_length));
  put_u32(out, static_cast<std::uint32_t>(pf.params.stft_config.hop));
  put_u32(out, static_cast<std::uint32_t>(pf.params.stft_config.fft_size));
  put_u32(out, static_cast<std::uint32_t>(pf.params.stft_config.sample_rate));
  put_f64(out, pf.params.compression);
  put_f64(out, pf.params.scale);
  put_u8(out, pf.params.frame_normalized ? 1 : 0);
  put_u8(out, 0); // loss norm: global Frobenius
  put_u32(out, static_cast<std::uint32_t>(pf.params.num_frames));
  put_u64(out, pf.bank.seed);
  put_u32(out, static_cast<std::uint32_t>(pf.bank.layers.size()));

  for (const auto& layer : pf.bank.layers) {
    put_u32(out, static_cast<std::uint32_t>(layer.height));
    put_u32(out, static_cast<std::uint32_t>(layer.width));
    put_u32(out, static_cast<std::uint32_t>(layer.num_filters));
    for (double w : layer.weights) put_f64(out, w);
  }
  for (const auto& g : pf.params.layers) {
    put_u32(out, static_cast<std::uint32_t>(g.num_filters));
    put_u32(out, static_cast<std::uint32_t>(g.out_height));
    for (double v : g.v) put_f64(out, v);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

ParamFile load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open parameter file: " + path);

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "TXP1", 4) != 0)
    throw std::runtime_error("not a TXP1 parameter file: " + path);
  const std::uint32_t version = get_u32(in);
  if (version != kParamFileVersion)
    throw std::runtime_error("unsupported parameter file version");

  ParamFile pf;
  pf.params.stft_config.window_length = static_cast<int>(get_u32(in));
  pf.params.stft_config.hop = static_cast<int>(get_u32(in));
  pf.params.stft_config.fft_size = static_cast<int>(get_u32(in));
  pf.params.stft_config.sample_rate = static_cast<int>(get_u32(in));
  pf.params.compression = get_f64(in);
  pf.params.scale = get_f64(in);
  pf.params.frame_normalized = get_u8(in) != 0;
  const std::uint8_t loss_tag = get_u8(in);
  if (loss_tag != 0) throw std::runtime_error("unknown loss-norm convention tag");
  pf.params.num_frames = static_cast<int>(get_u32(in));
  pf.bank.seed = get_u64(in);
  pf.params.bank_seed = pf.bank.seed;
  const std::uint32_t num_layers = get_u32(in);

  for (std::uint32_t l = 0; l < num_layers; ++l) {
    ConvLayer layer;
    layer.height = static_cast<int>(get_u32(in));
    layer.width = static_cast<int>(get_u32(in));
    layer.num_filters = static_cast<int>(get_u32(in));
    if (layer.height < 1 || layer.width < 1 || layer.num_filters < 1)
      throw std::runtime_error("corrupt parameter file: bad layer shape");
    layer.weights.resize(std::size_t(layer.num_filters) * layer.weights_per_filter());
    for (double& w : layer.weights) w = get_f64(in);
    pf.bank.layers.push_back(std::move(layer));
  }
  for (std::uint32_t l = 0; l < num_layers; ++l) {
    GramLayer g;
    g.num_filters = static_cast<int>(get_u32(in));
    g.out_height = static_cast<int>(get_u32(in));
    if (g.num_filters < 1 || g.out_height < 1)
      throw std::runtime_error("corrupt parameter file: bad gram shape");
    g.v.resize(std::size_t(g.num_filters) * g.num_filters * g.out_height);
    for (double& v : g.v) v = get_f64(in);
    pf.params.layers.push_back(std::move(g));
  }
  if (!in) throw std::runtime_error("truncated parameter file: " + path);
  return pf;
}

} // namespace texsynth
