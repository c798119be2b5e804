#include "texsynth/gradcheck.hpp"

#include "texsynth/objective.hpp"
#include "texsynth/rng.hpp"

#include <cmath>
#include <ostream>
#include <vector>

namespace texsynth {

namespace {

double rel_err(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-12});
  return std::abs(a - b) / denom;
}

bool report_check(std::ostream& out, const char* name, double err, double tol) {
  const bool ok = err < tol;
  out << (ok ? "  [ok]   " : "  [FAIL] ") << name << ": max relative error "
      << err << " (tolerance " << tol << ")\n";
  return ok;
}

// <stft(x), u> = <x, stft_adjoint(u)>
double check_stft_adjoint(const GradCheckOptions& opts) {
  StftConfig cfg;
  cfg.window_length = cfg.fft_size = 64;
  cfg.hop = 32;
  cfg.sample_rate = 16000;

  CounterRng rng(opts.seed, 100);
  AudioBuffer x;
  x.sample_rate = cfg.sample_rate;
  x.samples.resize(500);
  for (std::size_t i = 0; i < x.samples.size(); ++i) x.samples[i] = rng.gaussian(i);

  const ComplexSpectrogram spec = stft(x, cfg);
  SpecGrad u;
  u.num_bins = spec.num_bins;
  u.num_frames = spec.num_frames;
  u.re.resize(spec.data.size());
  u.im.resize(spec.data.size());
  CounterRng rng2(opts.seed, 101);
  for (std::size_t i = 0; i < spec.data.size(); ++i) {
    u.re[i] = rng2.gaussian(2 * i);
    u.im[i] = rng2.gaussian(2 * i + 1);
  }
  // the Im outputs of DC/Nyquist bins are identically zero
  for (int t = 0; t < u.num_frames; ++t) {
    u.im[std::size_t(t) * u.num_bins] = 0.0;
    u.im[std::size_t(t) * u.num_bins + u.num_bins - 1] = 0.0;
  }

  double lhs = 0.0;
  for (std::size_t i = 0; i < spec.data.size(); ++i)
    lhs += spec.data[i].real() * u.re[i] + spec.data[i].imag() * u.im[i];

  const std::vector<double> gx = stft_adjoint(u, cfg, x.samples.size());
  double rhs = 0.0;
  for (std::size_t i = 0; i < gx.size(); ++i) rhs += x.samples[i] * gx[i];
  return rel_err(lhs, rhs);
}

// finite differences through compress_ri on a 4x3 spectrogram
double check_compress_adjoint(const GradCheckOptions& opts) {
  StftConfig cfg;
  cfg.window_length = cfg.fft_size = 6;
  cfg.hop = 3;
  ComplexSpectrogram spec;
  spec.config = cfg;
  spec.num_bins = 4;
  spec.num_frames = 3;
  spec.data.resize(12);
  CounterRng rng(opts.seed, 110);
  for (std::size_t i = 0; i < spec.data.size(); ++i)
    spec.data[i] = {0.3 * rng.gaussian(2 * i), 0.3 * rng.gaussian(2 * i + 1)};

  const double C = kDefaultCompression, scale = 1.7;
  RIStack cot; // random cotangent
  cot.num_bins = 4;
  cot.num_frames = 3;
  cot.data.resize(24);
  CounterRng rng2(opts.seed, 111);
  for (std::size_t i = 0; i < cot.data.size(); ++i) cot.data[i] = rng2.gaussian(i);

  auto objective = [&](const ComplexSpectrogram& s) {
    const RIStack ri = compress_ri(s, C, ScaleMode::fixed, scale);
    double v = 0.0;
    for (std::size_t i = 0; i < ri.data.size(); ++i) v += cot.data[i] * ri.data[i];
    return v;
  };

  const SpecGrad g = compress_ri_adjoint(cot, spec, C, scale);
  const double h = 1e-6;
  double max_err = 0.0;
  for (int b = 0; b < 4; ++b) {
    for (int t = 0; t < 3; ++t) {
      for (int part = 0; part < 2; ++part) {
        ComplexSpectrogram plus = spec, minus = spec;
        const std::complex<double> dz = part == 0 ? std::complex<double>(h, 0)
                                                  : std::complex<double>(0, h);
        plus.at(b, t) += dz;
        minus.at(b, t) -= dz;
        const double fd = (objective(plus) - objective(minus)) / (2 * h);
        const std::size_t idx = std::size_t(t) * 4 + b;
        const double an = part == 0 ? g.re[idx] : g.im[idx];
        max_err = std::max(max_err, rel_err(an, fd));
      }
    }
  }
  return max_err;
}

// toy 2-layer bank over a 12x12x2 input
double check_forward_adjoint(const GradCheckOptions& opts) {
  FilterBank bank = init_bank(opts.seed + 7, {3, 4}, 3); // shapes (3,3), (5,5)

  RIStack ri;
  ri.num_bins = 12;
  ri.num_frames = 12;
  ri.data.resize(2 * 12 * 12);
  CounterRng rng(opts.seed, 120);
  for (std::size_t i = 0; i < ri.data.size(); ++i) ri.data[i] = 0.5 * rng.gaussian(i);

  const FeatureMaps maps = forward(ri, bank);
  FeatureMaps cot = maps;
  CounterRng rng2(opts.seed, 121);
  std::uint64_t c = 0;
  for (auto& l : cot.layers)
    for (auto& v : l.v) v = rng2.gaussian(c++);

  auto objective = [&](const RIStack& in) {
    const FeatureMaps f = forward(in, bank);
    double v = 0.0;
    for (std::size_t l = 0; l < f.layers.size(); ++l)
      for (std::size_t i = 0; i < f.layers[l].v.size(); ++i)
        v += cot.layers[l].v[i] * f.layers[l].v[i];
    return v;
  };

  RIStack g = forward_adjoint(cot, ri, bank, maps);
  if (opts.corrupt_forward_adjoint)
    for (auto& v : g.data) v *= 1.01;

  const double h = 1e-6;
  double max_err = 0.0;
  CounterRng pick(opts.seed, 122);
  for (int k = 0; k < 40; ++k) {
    const std::size_t i = pick.bits(k) % ri.data.size();
    RIStack plus = ri, minus = ri;
    plus.data[i] += h;
    minus.data[i] -= h;
    const double fd = (objective(plus) - objective(minus)) / (2 * h);
    max_err = std::max(max_err, rel_err(g.data[i], fd));
  }
  return max_err;
}

double check_gram_adjoint(const GradCheckOptions& opts) {
  FeatureMaps maps;
  maps.layers.resize(1);
  FeatureMapLayer& fm = maps.layers[0];
  fm.num_filters = 4;
  fm.out_height = 3;
  fm.out_width = 6;
  fm.v.resize(4 * 3 * 6);
  CounterRng rng(opts.seed, 130);
  for (std::size_t i = 0; i < fm.v.size(); ++i) fm.v[i] = rng.gaussian(i);

  const bool normalized = true;
  ParameterSet cot = gram(maps, normalized);
  CounterRng rng2(opts.seed, 131);
  for (std::size_t i = 0; i < cot.layers[0].v.size(); ++i)
    cot.layers[0].v[i] = rng2.gaussian(i);

  auto objective = [&](const FeatureMaps& f) {
    const ParameterSet h = gram(f, normalized);
    double v = 0.0;
    for (std::size_t i = 0; i < h.layers[0].v.size(); ++i)
      v += cot.layers[0].v[i] * h.layers[0].v[i];
    return v;
  };

  const FeatureMaps g = gram_adjoint(cot, maps);
  const double h = 1e-6;
  double max_err = 0.0;
  for (std::size_t i = 0; i < fm.v.size(); ++i) {
    FeatureMaps plus = maps, minus = maps;
    plus.layers[0].v[i] += h;
    minus.layers[0].v[i] -= h;
    const double fd = (objective(plus) - objective(minus)) / (2 * h);
    max_err = std::max(max_err, rel_err(g.layers[0].v[i], fd));
  }
  return max_err;
}

} // namespace

// end-to-end finite differences on a short signal with a reduced bank;
// also used directly by the acceptance suite
double end_to_end_fd_error(std::uint64_t seed, double signal_seconds, int num_coords,
                           bool corrupt) {
  StftConfig cfg; // paper configuration
  FilterBank bank = init_bank(seed + 3, {2, 3}, 8); // shapes (11,5), (3,3)

  CounterRng rng(seed, 140);
  AudioBuffer orig;
  orig.sample_rate = cfg.sample_rate;
  orig.samples.resize(static_cast<std::size_t>(signal_seconds * cfg.sample_rate));
  for (std::size_t i = 0; i < orig.samples.size(); ++i) orig.samples[i] = 0.1 * rng.gaussian(i);

  const ParameterSet target = analyze(orig, bank, cfg, kDefaultCompression);
  const TextureObjective obj(target, bank);

  CounterRng rng2(seed, 141);
  AudioBuffer x = orig;
  for (std::size_t i = 0; i < x.samples.size(); ++i) x.samples[i] = 0.1 * rng2.gaussian(i);

  auto [value, grad] = loss_and_gradient(x, obj);
  (void)value;
  if (corrupt)
    for (auto& v : grad) v *= 1.01;

  double xmax = 0.0;
  for (double s : x.samples) xmax = std::max(xmax, std::abs(s));
  const double h = 1e-6 * xmax;

  double max_err = 0.0;
  CounterRng pick(seed, 142);
  for (int k = 0; k < num_coords; ++k) {
    const std::size_t i = pick.bits(k) % x.samples.size();
    AudioBuffer plus = x, minus = x;
    plus.samples[i] += h;
    minus.samples[i] -= h;
    const double fd = (loss(plus, obj) - loss(minus, obj)) / (2 * h);
    max_err = std::max(max_err, rel_err(grad[i], fd));
  }
  return max_err;
}

bool run_gradcheck(const GradCheckOptions& opts, std::ostream& report) {
  bool ok = true;
  report << "gradient checks (seed " << opts.seed << ")\n";
  ok &= report_check(report, "stft adjoint identity", check_stft_adjoint(opts), 1e-10);
  ok &= report_check(report, "compress_ri adjoint vs finite differences",
                     check_compress_adjoint(opts), opts.stage_tolerance);
  ok &= report_check(report, "conv forward adjoint vs finite differences",
                     check_forward_adjoint(opts), opts.stage_tolerance);
  ok &= report_check(report, "gram adjoint vs finite differences",
                     check_gram_adjoint(opts), opts.stage_tolerance);
  ok &= report_check(report, "end-to-end loss gradient vs finite differences",
                     end_to_end_fd_error(opts.seed, 0.25, 20,
                                         opts.corrupt_forward_adjoint),
                     opts.end_to_end_tolerance);
  report << (ok ? "all checks passed\n" : "CHECKS FAILED\n");
  return ok;
}

} // namespace texsynth
