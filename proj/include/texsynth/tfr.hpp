#pragma once

#include "texsynth/audio.hpp"

#include <complex>
#include <vector>

namespace texsynth {

struct StftConfig {
  int window_length = 512;
  int hop = 256;
  int fft_size = 512;
  int sample_rate = 16000;

  int bins() const { return fft_size / 2 + 1; }
  int frames_for(std::size_t num_samples) const {
    if (num_samples < static_cast<std::size_t>(window_length)) return 0;
    return 1 + static_cast<int>((num_samples - window_length) / hop);
  }
  std::size_t samples_for(int frames) const {
    return static_cast<std::size_t>(frames - 1) * hop + window_length;
  }
  void validate() const;
};

// One-sided complex STFT, bins x frames, stored frame-major.
struct ComplexSpectrogram {
  int num_bins = 0;
  int num_frames = 0;
  StftConfig config;
  std::vector<std::complex<double>> data; // [frame][bin]

  std::complex<double>& at(int bin, int frame) { return data[std::size_t(frame) * num_bins + bin]; }
  const std::complex<double>& at(int bin, int frame) const {
    return data[std::size_t(frame) * num_bins + bin];
  }
};

// Real-pair cotangent/tangent over the entries of a ComplexSpectrogram,
// treating Re and Im as independent real coordinates.  Same layout.
struct SpecGrad {
  int num_bins = 0;
  int num_frames = 0;
  std::vector<double> re; // [frame][bin]
  std::vector<double> im;
};

enum class ScaleMode { own_max, fixed };

// Compressed real/imaginary stack, Eq-style squashing into (-1, 1).
// Stored as two planes [channel][bin][frame], channel 0 real, 1 imaginary.
struct RIStack {
  int num_bins = 0;
  int num_frames = 0;
  double scale = 1.0;       // normalizer applied before compression
  double compression = 10.0;
  std::vector<double> data; // [c][bin][frame]

  double& at(int bin, int frame, int channel) {
    return data[(std::size_t(channel) * num_bins + bin) * num_frames + frame];
  }
  double at(int bin, int frame, int channel) const {
    return data[(std::size_t(channel) * num_bins + bin) * num_frames + frame];
  }
  const double* plane(int channel) const {
    return data.data() + std::size_t(channel) * num_bins * num_frames;
  }
  double* plane(int channel) {
    return data.data() + std::size_t(channel) * num_bins * num_frames;
  }
};

constexpr double kDefaultCompression = 10.0;

// Hann-windowed STFT, no edge padding.  Frame t covers samples
// [t*hop, t*hop + window).  Rejects signals shorter than one window.
ComplexSpectrogram stft(const AudioBuffer& buf, const StftConfig& cfg);

// Weighted overlap-add inverse with Hann synthesis window; exact on the
// interior for spectrograms that came from stft().
AudioBuffer istft(const ComplexSpectrogram& spec);

// R = 2*sigmoid(C*Re(X/scale)) - 1, likewise I from Im.  own_max divides by
// the spectrogram's max modulus, fixed uses the given constant.
RIStack compress_ri(const ComplexSpectrogram& spec, double compression,
                    ScaleMode mode, double fixed_scale = 1.0);

// Vector-Jacobian product of stft(): cotangent over (Re, Im) entries back to
// a gradient over the num_samples input samples.
std::vector<double> stft_adjoint(const SpecGrad& grad, const StftConfig& cfg,
                                 std::size_t num_samples);

// Elementwise VJP of compress_ri; the scale is treated as a constant.
SpecGrad compress_ri_adjoint(const RIStack& grad_ri, const ComplexSpectrogram& spec,
                             double compression, double scale);

double max_modulus(const ComplexSpectrogram& spec);

} // namespace texsynth
