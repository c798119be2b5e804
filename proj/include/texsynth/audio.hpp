#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace texsynth {

// Mono time-domain signal.  Samples are dimensionless amplitudes, nominally
// in [-1, 1]; processing is double precision, float32 only at the WAV layer.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

// Reads a RIFF/WAVE file (PCM16 or IEEE float32, any channel count) and mixes
// down to mono by channel averaging.  PCM16 samples are scaled by 1/32768.
AudioBuffer read_wav(const std::string& path);

// Writes a mono IEEE float32 WAV.  Round-trips float32-representable samples
// bit-exactly.  Rejects empty buffers.
void write_wav(const AudioBuffer& buf, const std::string& path);

// Windowed-sinc rate conversion (Kaiser window, 64 taps per phase, cutoff at
// 0.9x the Nyquist of the lower rate).  Identity when rates already match.
AudioBuffer resample(const AudioBuffer& buf, int target_rate);

// Mean-centers and scales so the sample variance equals target_variance.
// Rejects constant signals.
AudioBuffer normalize_energy(const AudioBuffer& buf, double target_variance);

// Spectrum-matched noise: seeded Gaussian white noise of the reference's
// length whose DFT magnitude is replaced by the reference's (smoothed by a
// 9-bin moving average), keeping the noise phase, then energy-normalized to
// the reference variance.
AudioBuffer make_anchor(const AudioBuffer& reference, std::uint64_t seed);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);

} // namespace texsynth
