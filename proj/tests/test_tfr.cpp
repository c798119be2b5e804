#include "texsynth/tfr.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace texsynth;

namespace {

StftConfig paper_cfg() { return StftConfig{}; }

StftConfig small_cfg() {
  StftConfig cfg;
  cfg.window_length = cfg.fft_size = 64;
  cfg.hop = 32;
  return cfg;
}

} // namespace

TEST_CASE("stft framing arithmetic") {
  const AudioBuffer buf = testutil::random_buffer(16000, 16000, 10);
  const ComplexSpectrogram spec = stft(buf, paper_cfg());
  CHECK(spec.num_bins == 257);
  CHECK(spec.num_frames == 61); // 1 + floor(15488 / 256)

  AudioBuffer tiny = testutil::random_buffer(100, 16000, 10);
  CHECK_THROWS(stft(tiny, paper_cfg()));
}

TEST_CASE("stft of the zero signal is zero") {
  AudioBuffer buf;
  buf.sample_rate = 16000;
  buf.samples.assign(2048, 0.0);
  const ComplexSpectrogram spec = stft(buf, paper_cfg());
  for (const auto& z : spec.data) CHECK(std::abs(z) == 0.0);
}

TEST_CASE("per-frame Parseval identity") {
  const StftConfig cfg = small_cfg();
  const AudioBuffer buf = testutil::random_buffer(400, 16000, 11, 1.0);
  const ComplexSpectrogram spec = stft(buf, cfg);

  // windowed-frame time energy vs one-sided spectral energy
  std::vector<double> win(cfg.window_length);
  for (int i = 0; i < cfg.window_length; ++i)
    win[i] = 0.5 * (1.0 - std::cos(2.0 * 3.141592653589793 * i / cfg.window_length));
  for (int t = 0; t < spec.num_frames; ++t) {
    double time_e = 0.0;
    for (int i = 0; i < cfg.window_length; ++i) {
      const double v = buf.samples[t * cfg.hop + i] * win[i];
      time_e += v * v;
    }
    double spec_e = std::norm(spec.at(0, t)) + std::norm(spec.at(spec.num_bins - 1, t));
    for (int k = 1; k < spec.num_bins - 1; ++k) spec_e += 2.0 * std::norm(spec.at(k, t));
    spec_e /= cfg.fft_size;
    CHECK(spec_e == doctest::Approx(time_e).epsilon(1e-9));
  }
}

TEST_CASE("istft inverts stft on the interior") {
  const StftConfig cfg = paper_cfg();
  const AudioBuffer buf = testutil::random_buffer(16000, 16000, 12, 1.0);
  const AudioBuffer back = istft(stft(buf, cfg));
  REQUIRE(back.samples.size() <= buf.samples.size());

  double max_rel = 0.0, scale = 0.0;
  for (double s : buf.samples) scale = std::max(scale, std::abs(s));
  for (std::size_t i = cfg.window_length; i + cfg.window_length < back.samples.size(); ++i)
    max_rel = std::max(max_rel, std::abs(back.samples[i] - buf.samples[i]) / scale);
  CHECK(max_rel < 1e-10);
}

TEST_CASE("istft of zeros is zero") {
  ComplexSpectrogram spec;
  spec.config = small_cfg();
  spec.num_bins = spec.config.bins();
  spec.num_frames = 5;
  spec.data.assign(std::size_t(spec.num_bins) * 5, {0.0, 0.0});
  const AudioBuffer out = istft(spec);
  for (double s : out.samples) CHECK(s == 0.0);
}

TEST_CASE("random complex matrices are not consistent") {
  const StftConfig cfg = small_cfg();
  ComplexSpectrogram m;
  m.config = cfg;
  m.num_bins = cfg.bins();
  m.num_frames = 12;
  m.data.resize(std::size_t(m.num_bins) * m.num_frames);
  CounterRng rng(13, 901);
  for (std::size_t i = 0; i < m.data.size(); ++i)
    m.data[i] = {rng.gaussian(2 * i), rng.gaussian(2 * i + 1)};

  const ComplexSpectrogram round = stft(istft(m), cfg);
  REQUIRE(round.num_frames == m.num_frames);
  double diff2 = 0.0, norm2 = 0.0;
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    diff2 += std::norm(round.data[i] - m.data[i]);
    norm2 += std::norm(m.data[i]);
  }
  CHECK(std::sqrt(diff2 / norm2) > 1e-3);
}

TEST_CASE("compress_ri squashing values") {
  StftConfig cfg = small_cfg();
  ComplexSpectrogram spec;
  spec.config = cfg;
  spec.num_bins = 2;
  spec.num_frames = 2;
  spec.data = {{0.0, 0.0}, {0.1, -0.1}, {1.0, 0.5}, {-0.3, 0.2}};

  CHECK(kDefaultCompression == 10.0);
  const RIStack ri = compress_ri(spec, 10.0, ScaleMode::fixed, 1.0);
  CHECK(ri.at(0, 0, 0) == 0.0); // Re = 0 -> exactly 0
  // normalized Re = 0.1, C = 10 -> tanh(0.5)
  CHECK(ri.at(1, 0, 0) == doctest::Approx(std::tanh(0.5)).epsilon(1e-12));
  CHECK(ri.at(1, 0, 1) == doctest::Approx(-std::tanh(0.5)).epsilon(1e-12));

  for (double v : ri.data) {
    CHECK(v > -1.0);
    CHECK(v < 1.0);
  }

  // odd in the input
  ComplexSpectrogram neg = spec;
  for (auto& z : neg.data) z = -z;
  const RIStack rin = compress_ri(neg, 10.0, ScaleMode::fixed, 1.0);
  for (std::size_t i = 0; i < ri.data.size(); ++i)
    CHECK(rin.data[i] == doctest::Approx(-ri.data[i]).epsilon(1e-12));

  // own-max of an all-zero spectrogram is undefined
  ComplexSpectrogram zero = spec;
  for (auto& z : zero.data) z = 0.0;
  CHECK_THROWS(compress_ri(zero, 10.0, ScaleMode::own_max));
}

TEST_CASE("entries stay strictly inside (-1, 1) for large inputs") {
  StftConfig cfg = small_cfg();
  ComplexSpectrogram spec;
  spec.config = cfg;
  spec.num_bins = 3;
  spec.num_frames = 1;
  spec.data = {{1e6, -1e6}, {1e12, 0.0}, {-1e9, 1e9}};
  const RIStack ri = compress_ri(spec, 10.0, ScaleMode::fixed, 1.0);
  for (double v : ri.data) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("stft_adjoint identity and locality") {
  const StftConfig cfg = small_cfg();
  const AudioBuffer x = testutil::random_buffer(420, 16000, 14, 1.0);
  const ComplexSpectrogram spec = stft(x, cfg);

  // zero cotangent -> zero gradient
  SpecGrad zero;
  zero.num_bins = spec.num_bins;
  zero.num_frames = spec.num_frames;
  zero.re.assign(spec.data.size(), 0.0);
  zero.im.assign(spec.data.size(), 0.0);
  for (double g : stft_adjoint(zero, cfg, x.samples.size())) CHECK(g == 0.0);

  // <Ax, u> = <x, A'u>
  SpecGrad u = zero;
  CounterRng rng(15, 902);
  for (std::size_t i = 0; i < u.re.size(); ++i) {
    u.re[i] = rng.gaussian(2 * i);
    u.im[i] = rng.gaussian(2 * i + 1);
  }
  for (int t = 0; t < u.num_frames; ++t) { // Im of DC/Nyquist are constant-zero outputs
    u.im[std::size_t(t) * u.num_bins] = 0.0;
    u.im[std::size_t(t) * u.num_bins + u.num_bins - 1] = 0.0;
  }
  double lhs = 0.0;
  for (std::size_t i = 0; i < u.re.size(); ++i)
    lhs += spec.data[i].real() * u.re[i] + spec.data[i].imag() * u.im[i];
  const std::vector<double> g = stft_adjoint(u, cfg, x.samples.size());
  double rhs = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) rhs += x.samples[i] * g[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));

  // single cotangent at (bin 3, frame 2) only touches that frame's samples
  SpecGrad one = zero;
  one.re[std::size_t(2) * spec.num_bins + 3] = 1.0;
  const std::vector<double> gl = stft_adjoint(one, cfg, x.samples.size());
  for (std::size_t i = 0; i < gl.size(); ++i) {
    const bool in_frame = i >= std::size_t(2) * cfg.hop &&
                          i < std::size_t(2) * cfg.hop + cfg.window_length;
    if (!in_frame) CHECK(gl[i] == 0.0);
  }
}

TEST_CASE("compress_ri_adjoint local derivative at zero") {
  StftConfig cfg = small_cfg();
  ComplexSpectrogram spec;
  spec.config = cfg;
  spec.num_bins = 1;
  spec.num_frames = 1;
  spec.data = {{0.0, 0.0}};

  RIStack cot;
  cot.num_bins = 1;
  cot.num_frames = 1;
  cot.data = {1.0, 0.0};

  const double C = 10.0, scale = 2.0;
  const SpecGrad g = compress_ri_adjoint(cot, spec, C, scale);
  CHECK(g.re[0] == doctest::Approx(C / (2.0 * scale)).epsilon(1e-12));
  CHECK(g.im[0] == 0.0);

  cot.data = {0.0, 0.0};
  const SpecGrad gz = compress_ri_adjoint(cot, spec, C, scale);
  CHECK(gz.re[0] == 0.0);
  CHECK(gz.im[0] == 0.0);
}
