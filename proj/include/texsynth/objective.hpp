#pragma once

#include "texsynth/audio.hpp"
#include "texsynth/featurebank.hpp"
#include "texsynth/tfr.hpp"

#include <utility>
#include <vector>

namespace texsynth {

// Texture loss L = sum_l ||H_target^l - H^l||_F / ||H_target^l||_F, evaluated
// over the full analysis pipeline with a scale fixed at construction so the
// objective stays smooth in the signal.
struct TextureObjective {
  ParameterSet target;
  FilterBank bank;
  StftConfig stft_config;
  double compression = kDefaultCompression;
  double scale = 1.0;

  TextureObjective() = default;
  TextureObjective(ParameterSet target_, FilterBank bank_);
};

// Full analysis: gram(forward(compress_ri(stft(buf)))) with own-max scaling.
// Metadata (config, compression, scale, seed, frames) is recorded in the
// result.
ParameterSet analyze(const AudioBuffer& buf, const FilterBank& bank,
                     const StftConfig& cfg, double compression,
                     bool normalize_frames = true);

double loss(const AudioBuffer& x, const TextureObjective& obj);

// Loss plus its exact gradient with respect to the raw samples, via the
// adjoint chain gram -> conv -> compression -> stft.
std::pair<double, std::vector<double>> loss_and_gradient(const AudioBuffer& x,
                                                         const TextureObjective& obj);

double frobenius_norm(const GramLayer& g);

} // namespace texsynth
