#include "texsynth/objective.hpp"

#include <cmath>
#include <stdexcept>

namespace texsynth {

double frobenius_norm(const GramLayer& g) {
  double s = 0.0;
  for (double v : g.v) s += v * v;
  return std::sqrt(s);
}

TextureObjective::TextureObjective(ParameterSet target_, FilterBank bank_)
    : target(std::move(target_)), bank(std::move(bank_)) {
  if (target.layers.size() != bank.layers.size())
    throw std::invalid_argument("objective: target/bank layer count mismatch");
  for (const auto& g : target.layers)
    if (frobenius_norm(g) <= 0.0)
      throw std::invalid_argument("objective: degenerate (all-zero) target layer");
  stft_config = target.stft_config;
  compression = target.compression;
  scale = target.scale;
  if (scale <= 0.0) throw std::invalid_argument("objective: target has no valid scale");
}

ParameterSet analyze(const AudioBuffer& buf, const FilterBank& bank,
                     const StftConfig& cfg, double compression, bool normalize_frames) {
  const ComplexSpectrogram spec = stft(buf, cfg);
  const RIStack ri = compress_ri(spec, compression, ScaleMode::own_max);
  const FeatureMaps maps = forward(ri, bank);
  ParameterSet ps = gram(maps, normalize_frames);
  ps.stft_config = cfg;
  ps.compression = compression;
  ps.scale = ri.scale;
  ps.bank_seed = bank.seed;
  ps.num_frames = spec.num_frames;
  return ps;
}

namespace {

// shared forward pass; optionally also produces the sample gradient
double evaluate(const AudioBuffer& x, const TextureObjective& obj,
                std::vector<double>* grad_out) {
  const ComplexSpectrogram spec = stft(x, obj.stft_config);
  const RIStack ri =
      compress_ri(spec, obj.compression, ScaleMode::fixed, obj.scale);
  const FeatureMaps maps = forward(ri, obj.bank);
  const ParameterSet h = gram(maps, obj.target.frame_normalized);

  double total = 0.0;
  ParameterSet grad_h;
  if (grad_out) {
    grad_h.frame_normalized = obj.target.frame_normalized;
    grad_h.layers.resize(h.layers.size());
  }

  for (std::size_t l = 0; l < h.layers.size(); ++l) {
    const GramLayer& hl = h.layers[l];
    const GramLayer& tl = obj.target.layers[l];
    if (hl.v.size() != tl.v.size() || hl.out_height != tl.out_height)
      throw std::runtime_error("objective: candidate/target Gram shape mismatch "
                               "(different analysis geometry?)");
    double d2 = 0.0;
    for (std::size_t i = 0; i < hl.v.size(); ++i) {
      const double d = hl.v[i] - tl.v[i];
      d2 += d * d;
    }
    const double dist = std::sqrt(d2);
    const double tnorm = frobenius_norm(tl);
    total += dist / tnorm;

    if (grad_out) {
      GramLayer& gl = grad_h.layers[l];
      gl.num_filters = hl.num_filters;
      gl.out_height = hl.out_height;
      // d/dH of ||H - T||/||T||; zero at the (non-smooth) exact minimum
      if (dist < 1e-12 * tnorm) {
        gl.v.assign(hl.v.size(), 0.0);
      } else {
        const double inv = 1.0 / (tnorm * dist);
        gl.v.resize(hl.v.size());
        for (std::size_t i = 0; i < hl.v.size(); ++i)
          gl.v[i] = (hl.v[i] - tl.v[i]) * inv;
      }
    }
  }

  if (grad_out) {
    const FeatureMaps grad_maps = gram_adjoint(grad_h, maps);
    const RIStack grad_ri = forward_adjoint(grad_maps, ri, obj.bank, maps);
    const SpecGrad grad_spec =
        compress_ri_adjoint(grad_ri, spec, obj.compression, obj.scale);
    *grad_out = stft_adjoint(grad_spec, obj.stft_config, x.samples.size());
  }
  return total;
}

} // namespace

double loss(const AudioBuffer& x, const TextureObjective& obj) {
  return evaluate(x, obj, nullptr);
}

std::pair<double, std::vector<double>> loss_and_gradient(const AudioBuffer& x,
                                                         const TextureObjective& obj) {
  std::vector<double> grad;
  const double value = evaluate(x, obj, &grad);
  return {value, std::move(grad)};
}

} // namespace texsynth
