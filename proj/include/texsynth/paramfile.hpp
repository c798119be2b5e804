#pragma once

#include "texsynth/featurebank.hpp"

#include <string>

namespace texsynth {

// Binary parameter file, magic "TXP1", little-endian, 8-byte floats.
// Self-describing: the bank weights are stored verbatim, so re-synthesis
// never depends on PRNG reproduction, and no original audio is embedded.
//
// Layout:
//   "TXP1"            4 bytes
//   version           u32 (= 1)
//   window, hop, fft_size, sample_rate   4 x u32
//   compression       f64
//   scale             f64
//   frame_normalized  u8
//   loss_norm_tag     u8 (0 = global Frobenius per layer)
//   num_frames        u32 (frame count of the analyzed signal)
//   bank_seed         u64
//   num_layers        u32
//   per layer: height u32, width u32, num_filters u32,
//              weights num_filters*2*height*width f64  ([f][c][fy][fx])
//   per layer: num_filters u32, out_height u32,
//              gram num_filters^2*out_height f64       ([i][j][m])
struct ParamFile {
  ParameterSet params;
  FilterBank bank;
};

constexpr std::uint32_t kParamFileVersion = 1;

void save_params(const ParamFile& pf, const std::string& path);
ParamFile load_params(const std::string& path);

} // namespace texsynth
