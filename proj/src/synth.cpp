#include "texsynth/synth.hpp"

#include "texsynth/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace texsynth {

SynthResult synthesize(const TextureObjective& obj, const SynthConfig& cfg) {
  const StftConfig& sc = obj.stft_config;

  double duration = cfg.duration;
  if (duration < 0.0) {
    const int frames = obj.target.num_frames > 0 ? obj.target.num_frames : 1;
    duration = static_cast<double>(sc.samples_for(frames)) / sc.sample_rate;
  }
  const std::size_t num_samples =
      static_cast<std::size_t>(std::llround(duration * sc.sample_rate));

  // enough frames for the widest filter
  const int min_frames = obj.bank.max_filter_width();
  if (sc.frames_for(num_samples) < min_frames)
    throw std::runtime_error("synthesize: duration shorter than the minimum imposed "
                             "by the widest filter");

  CounterRng rng(cfg.seed, /*stream=*/2);
  std::vector<double> x0(num_samples);
  for (std::size_t i = 0; i < num_samples; ++i)
    x0[i] = rng.gaussian(i) * cfg.init_rms;

  SynthResult res;
  if (cfg.iterations == 0) {
    res.audio.sample_rate = sc.sample_rate;
    res.audio.samples = x0;
    AudioBuffer probe{std::move(x0), sc.sample_rate};
    res.initial_loss = res.final_loss = loss(probe, obj);
  } else {
    AudioBuffer work;
    work.sample_rate = sc.sample_rate;
    const ObjectiveFn fn = [&](const std::vector<double>& x, std::vector<double>& grad) {
      work.samples = x;
      auto [value, g] = loss_and_gradient(work, obj);
      grad = std::move(g);
      return value;
    };

    LbfgsOptions opts = cfg.lbfgs;
    opts.max_iterations = cfg.iterations;
    LbfgsResult lb = minimize(fn, std::move(x0), opts);

    res.audio.sample_rate = sc.sample_rate;
    res.audio.samples = std::move(lb.x);
    res.trace = std::move(lb.trace);
    res.initial_loss = res.trace.records.front().loss;
    res.final_loss = lb.loss;
  }

  // peak-normalize to 0.9 (loss already computed pre-normalization)
  double peak = 0.0;
  for (double s : res.audio.samples) peak = std::max(peak, std::abs(s));
  if (peak > 0.0) {
    const double gain = 0.9 / peak;
    for (double& s : res.audio.samples) s *= gain;
  }
  return res;
}

void write_trace_csv(const RunTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file: " + path);
  out << "iter,loss,grad_inf_norm,step,fevals\n";
  out.precision(17);
  for (const auto& r : trace.records)
    out << r.iteration << ',' << r.loss << ',' << r.grad_inf_norm << ','
        << r.step << ',' << r.function_evaluations << '\n';
  if (!out) throw std::runtime_error("trace write failed: " + path);
}

} // namespace texsynth
