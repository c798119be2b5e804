#pragma once

#include "texsynth/lbfgs.hpp"
#include "texsynth/objective.hpp"

#include <cstdint>
#include <string>

namespace texsynth {

struct SynthConfig {
  double duration = -1.0;   // seconds; < 0 means match the analyzed original
  int iterations = 5000;
  double init_rms = 0.1;    // analysis normalizes to variance 0.01
  std::uint64_t seed = 0;
  LbfgsOptions lbfgs;
};

struct SynthResult {
  AudioBuffer audio;     // peak-normalized to 0.9
  RunTrace trace;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

// Seeded Gaussian base signal at the requested RMS, then L-BFGS imposition
// of the objective's parameters onto the raw samples.
SynthResult synthesize(const TextureObjective& obj, const SynthConfig& cfg);

void write_trace_csv(const RunTrace& trace, const std::string& path);

} // namespace texsynth
