#include "texsynth/tfr.hpp"

#include "texsynth/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace texsynth {

namespace {

constexpr double kPi = 3.141592653589793238462643383280;

// periodic Hann
std::vector<double> hann(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * i / n));
  return w;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

} // namespace

void StftConfig::validate() const {
  if (window_length <= 0 || hop <= 0 || fft_size <= 0 || sample_rate <= 0)
    throw std::invalid_argument("StftConfig: all fields must be positive");
  if (hop > window_length)
    throw std::invalid_argument("StftConfig: hop must not exceed window length");
  if (fft_size != window_length)
    throw std::invalid_argument("StftConfig: fft_size must equal window_length");
}

ComplexSpectrogram stft(const AudioBuffer& buf, const StftConfig& cfg) {
  cfg.validate();
  const int frames = cfg.frames_for(buf.samples.size());
  if (frames < 1) throw std::runtime_error("stft: signal shorter than one window");

  ComplexSpectrogram spec;
  spec.config = cfg;
  spec.num_bins = cfg.bins();
  spec.num_frames = frames;
  spec.data.resize(std::size_t(spec.num_bins) * frames);

  const std::vector<double> win = hann(cfg.window_length);
  RealFft fft(cfg.fft_size);
  std::vector<double> frame(cfg.fft_size);
  for (int t = 0; t < frames; ++t) {
    const double* x = buf.samples.data() + std::size_t(t) * cfg.hop;
    for (int i = 0; i < cfg.window_length; ++i) frame[i] = x[i] * win[i];
    fft.forward(frame.data(), &spec.data[std::size_t(t) * spec.num_bins]);
  }
  return spec;
}

AudioBuffer istft(const ComplexSpectrogram& spec) {
  const StftConfig& cfg = spec.config;
  cfg.validate();
  const std::size_t n = cfg.samples_for(spec.num_frames);

  AudioBuffer out;
  out.sample_rate = cfg.sample_rate;
  out.samples.assign(n, 0.0);
  std::vector<double> wsum(n, 0.0);

  const std::vector<double> win = hann(cfg.window_length);
  RealFft fft(cfg.fft_size);
  std::vector<double> frame(cfg.fft_size);
  for (int t = 0; t < spec.num_frames; ++t) {
    fft.inverse(&spec.data[std::size_t(t) * spec.num_bins], frame.data());
    double* x = out.samples.data() + std::size_t(t) * cfg.hop;
    double* w2 = wsum.data() + std::size_t(t) * cfg.hop;
    for (int i = 0; i < cfg.window_length; ++i) {
      x[i] += frame[i] * win[i];
      w2[i] += win[i] * win[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    out.samples[i] = wsum[i] > 1e-12 ? out.samples[i] / wsum[i] : 0.0;
  return out;
}

double max_modulus(const ComplexSpectrogram& spec) {
  double m = 0.0;
  for (const auto& z : spec.data) m = std::max(m, std::abs(z));
  return m;
}

RIStack compress_ri(const ComplexSpectrogram& spec, double compression,
                    ScaleMode mode, double fixed_scale) {
  if (compression <= 0.0) throw std::invalid_argument("compression must be positive");
  double scale = fixed_scale;
  if (mode == ScaleMode::own_max) {
    scale = max_modulus(spec);
    if (scale <= 0.0)
      throw std::runtime_error("compress_ri: all-zero spectrogram has no max normalizer");
  }
  if (scale <= 0.0) throw std::invalid_argument("compress_ri: scale must be positive");

  RIStack out;
  out.num_bins = spec.num_bins;
  out.num_frames = spec.num_frames;
  out.scale = scale;
  out.compression = compression;
  out.data.resize(std::size_t(2) * spec.num_bins * spec.num_frames);
  for (int b = 0; b < spec.num_bins; ++b) {
    for (int t = 0; t < spec.num_frames; ++t) {
      const std::complex<double> z = spec.at(b, t);
      out.at(b, t, 0) = 2.0 * sigmoid(compression * z.real() / scale) - 1.0;
      out.at(b, t, 1) = 2.0 * sigmoid(compression * z.imag() / scale) - 1.0;
    }
  }
  return out;
}

std::vector<double> stft_adjoint(const SpecGrad& grad, const StftConfig& cfg,
                                 std::size_t num_samples) {
  cfg.validate();
  const int bins = cfg.bins();
  if (grad.num_bins != bins)
    throw std::invalid_argument("stft_adjoint: bin count mismatch");
  if (cfg.frames_for(num_samples) != grad.num_frames)
    throw std::invalid_argument("stft_adjoint: frame count inconsistent with num_samples");

  std::vector<double> gx(num_samples, 0.0);
  const std::vector<double> win = hann(cfg.window_length);
  RealFft fft(cfg.fft_size);
  std::vector<std::complex<double>> cot(bins);
  std::vector<double> frame(cfg.fft_size);

  // The per-frame map is y_k = sum_n w[n] x[n] e^{-2 pi i k n / F} for
  // k = 0..F/2.  With cotangent c_k over (Re, Im), the sample gradient is
  // w[n] * sum_k Re(c_k e^{+2 pi i k n / F}).  A c2r transform of the half
  // spectrum computes the Hermitian-extended sum, which double-counts the
  // interior bins, so those are halved first.  The Im components of the DC
  // and Nyquist bins are identically zero outputs; their cotangents are
  // dropped, which is the exact adjoint.
  for (int t = 0; t < grad.num_frames; ++t) {
    const std::size_t off = std::size_t(t) * bins;
    for (int k = 0; k < bins; ++k) {
      double re = grad.re[off + k], im = grad.im[off + k];
      if (k != 0 && k != cfg.fft_size / 2) {
        re *= 0.5;
        im *= 0.5;
      }
      cot[k] = std::complex<double>(re, im);
    }
    fft.inverse(cot.data(), frame.data());
    double* g = gx.data() + std::size_t(t) * cfg.hop;
    // fft.inverse scales by 1/F; the adjoint has no such factor.
    for (int i = 0; i < cfg.window_length; ++i)
      g[i] += frame[i] * win[i] * cfg.fft_size;
  }
  return gx;
}

SpecGrad compress_ri_adjoint(const RIStack& grad_ri, const ComplexSpectrogram& spec,
                             double compression, double scale) {
  if (grad_ri.num_bins != spec.num_bins || grad_ri.num_frames != spec.num_frames)
    throw std::invalid_argument("compress_ri_adjoint: shape mismatch");
  if (scale <= 0.0) throw std::invalid_argument("scale must be positive");

  SpecGrad out;
  out.num_bins = spec.num_bins;
  out.num_frames = spec.num_frames;
  out.re.resize(spec.data.size());
  out.im.resize(spec.data.size());
  const double c_over_s = compression / scale;
  for (int b = 0; b < spec.num_bins; ++b) {
    for (int t = 0; t < spec.num_frames; ++t) {
      const std::size_t idx = std::size_t(t) * spec.num_bins + b;
      const std::complex<double> z = spec.at(b, t);
      const double sr = sigmoid(compression * z.real() / scale);
      const double si = sigmoid(compression * z.imag() / scale);
      out.re[idx] = grad_ri.at(b, t, 0) * 2.0 * c_over_s * sr * (1.0 - sr);
      out.im[idx] = grad_ri.at(b, t, 1) * 2.0 * c_over_s * si * (1.0 - si);
    }
  }
  return out;
}

} // namespace texsynth
