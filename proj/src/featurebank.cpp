#include "texsynth/featurebank.hpp"

#include "texsynth/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace texsynth {

int FilterBank::max_filter_width() const {
  int m = 0;
  for (const auto& l : layers) m = std::max(m, l.width);
  return m;
}

int FilterBank::max_filter_height() const {
  int m = 0;
  for (const auto& l : layers) m = std::max(m, l.height);
  return m;
}

FilterBank init_bank(std::uint64_t seed) {
  std::vector<int> all(kLayerShapes.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return init_bank(seed, all, kDefaultNumFilters);
}

FilterBank init_bank(std::uint64_t seed, const std::vector<int>& shape_indices,
                     int num_filters) {
  if (num_filters < 1) throw std::invalid_argument("init_bank: need at least one filter");
  if (shape_indices.empty()) throw std::invalid_argument("init_bank: need at least one layer");

  FilterBank bank;
  bank.seed = seed;
  for (int idx : shape_indices) {
    if (idx < 0 || idx >= static_cast<int>(kLayerShapes.size()))
      throw std::invalid_argument("init_bank: shape index out of range");
    ConvLayer layer;
    layer.height = kLayerShapes[idx].first;
    layer.width = kLayerShapes[idx].second;
    layer.num_filters = num_filters;
    layer.weights.resize(std::size_t(num_filters) * layer.weights_per_filter());
    // stream keyed by the global shape index, so a reduced bank's layers
    // match the corresponding layers of the full bank
    CounterRng rng(seed, /*stream=*/0x10 + idx);
    for (std::size_t i = 0; i < layer.weights.size(); ++i)
      layer.weights[i] = rng.uniform_sym(i, kWeightRange);
    bank.layers.push_back(std::move(layer));
  }
  return bank;
}

FeatureMaps forward(const RIStack& ri, const FilterBank& bank) {
  FeatureMaps maps;
  maps.layers.resize(bank.layers.size());
  for (std::size_t l = 0; l < bank.layers.size(); ++l) {
    const ConvLayer& layer = bank.layers[l];
    const int out_h = ri.num_bins - layer.height + 1;
    const int out_w = ri.num_frames - layer.width + 1;
    if (out_h < 1 || out_w < 1)
      throw std::runtime_error("forward: input smaller than a filter");

    FeatureMapLayer& fm = maps.layers[l];
    fm.num_filters = layer.num_filters;
    fm.out_height = out_h;
    fm.out_width = out_w;
    fm.v.resize(std::size_t(layer.num_filters) * out_h * out_w);

    const int stride = ri.num_frames;
#pragma omp parallel for schedule(static)
    for (int f = 0; f < layer.num_filters; ++f) {
      for (int oy = 0; oy < out_h; ++oy) {
        double* dst = &fm.v[(std::size_t(f) * out_h + oy) * out_w];
        std::fill(dst, dst + out_w, 0.0);
        for (int c = 0; c < kInputChannels; ++c) {
          for (int fy = 0; fy < layer.height; ++fy) {
            const double* src = ri.plane(c) + std::size_t(oy + fy) * stride;
            for (int fx = 0; fx < layer.width; ++fx) {
              const double wv = layer.w(f, c, fy, fx);
              const double* s = src + fx;
              for (int ox = 0; ox < out_w; ++ox) dst[ox] += wv * s[ox];
            }
          }
        }
        for (int ox = 0; ox < out_w; ++ox) dst[ox] = std::max(0.0, dst[ox]);
      }
    }
  }
  return maps;
}

ParameterSet gram(const FeatureMaps& maps, bool normalize_frames) {
  ParameterSet ps;
  ps.frame_normalized = normalize_frames;
  ps.layers.resize(maps.layers.size());
  for (std::size_t l = 0; l < maps.layers.size(); ++l) {
    const FeatureMapLayer& fm = maps.layers[l];
    GramLayer& g = ps.layers[l];
    g.num_filters = fm.num_filters;
    g.out_height = fm.out_height;
    g.v.resize(std::size_t(fm.num_filters) * fm.num_filters * fm.out_height);
    const double norm = normalize_frames ? 1.0 / fm.out_width : 1.0;

#pragma omp parallel for schedule(static)
    for (int i = 0; i < fm.num_filters; ++i) {
      for (int j = 0; j < fm.num_filters; ++j) {
        for (int m = 0; m < fm.out_height; ++m) {
          const double* a = &fm.v[(std::size_t(i) * fm.out_height + m) * fm.out_width];
          const double* b = &fm.v[(std::size_t(j) * fm.out_height + m) * fm.out_width];
          double acc = 0.0;
          for (int n = 0; n < fm.out_width; ++n) acc += a[n] * b[n];
          g.at(i, j, m) = acc * norm;
        }
      }
    }
  }
  return ps;
}

RIStack forward_adjoint(const FeatureMaps& grad_maps, const RIStack& ri,
                        const FilterBank& bank) {
  return forward_adjoint(grad_maps, ri, bank, forward(ri, bank));
}

RIStack forward_adjoint(const FeatureMaps& grad_maps, const RIStack& ri,
                        const FilterBank& bank, const FeatureMaps& maps) {
  if (grad_maps.layers.size() != bank.layers.size())
    throw std::invalid_argument("forward_adjoint: layer count mismatch");

  RIStack grad_in;
  grad_in.num_bins = ri.num_bins;
  grad_in.num_frames = ri.num_frames;
  grad_in.scale = ri.scale;
  grad_in.compression = ri.compression;
  grad_in.data.assign(ri.data.size(), 0.0);

  for (std::size_t l = 0; l < bank.layers.size(); ++l) {
    const ConvLayer& layer = bank.layers[l];
    const FeatureMapLayer& gm = grad_maps.layers[l];
    const FeatureMapLayer& fm = maps.layers[l];
    const int out_h = fm.out_height, out_w = fm.out_width;
    if (gm.num_filters != fm.num_filters || gm.out_height != out_h || gm.out_width != out_w)
      throw std::invalid_argument("forward_adjoint: gradient shape mismatch");

    // gate the cotangent once
    std::vector<double> gated(gm.v.size());
    for (std::size_t i = 0; i < gated.size(); ++i)
      gated[i] = fm.v[i] > 0.0 ? gm.v[i] : 0.0;

    const int stride = ri.num_frames;
    // full correlation with flipped kernels; each (c, iy) row is owned by
    // one thread, so accumulation order is fixed
#pragma omp parallel for schedule(static) collapse(2)
    for (int c = 0; c < kInputChannels; ++c) {
      for (int iy = 0; iy < ri.num_bins; ++iy) {
        double* dst = grad_in.plane(c) + std::size_t(iy) * stride;
        const int fy_lo = std::max(0, iy - out_h + 1);
        const int fy_hi = std::min(layer.height - 1, iy);
        for (int f = 0; f < layer.num_filters; ++f) {
          for (int fy = fy_lo; fy <= fy_hi; ++fy) {
            const double* grow = &gated[(std::size_t(f) * out_h + (iy - fy)) * out_w];
            for (int fx = 0; fx < layer.width; ++fx) {
              const double wv = layer.w(f, c, fy, fx);
              double* d = dst + fx;
              for (int ox = 0; ox < out_w; ++ox) d[ox] += wv * grow[ox];
            }
          }
        }
      }
    }
  }
  return grad_in;
}

FeatureMaps gram_adjoint(const ParameterSet& grad_h, const FeatureMaps& maps) {
  if (grad_h.layers.size() != maps.layers.size())
    throw std::invalid_argument("gram_adjoint: layer count mismatch");

  FeatureMaps out;
  out.layers.resize(maps.layers.size());
  for (std::size_t l = 0; l < maps.layers.size(); ++l) {
    const FeatureMapLayer& fm = maps.layers[l];
    const GramLayer& g = grad_h.layers[l];
    if (g.num_filters != fm.num_filters || g.out_height != fm.out_height)
      throw std::invalid_argument("gram_adjoint: gradient shape mismatch");

    FeatureMapLayer& df = out.layers[l];
    df.num_filters = fm.num_filters;
    df.out_height = fm.out_height;
    df.out_width = fm.out_width;
    df.v.assign(fm.v.size(), 0.0);
    const double norm = grad_h.frame_normalized ? 1.0 / fm.out_width : 1.0;

#pragma omp parallel for schedule(static)
    for (int i = 0; i < fm.num_filters; ++i) {
      for (int m = 0; m < fm.out_height; ++m) {
        double* dst = &df.v[(std::size_t(i) * fm.out_height + m) * fm.out_width];
        for (int j = 0; j < fm.num_filters; ++j) {
          const double coef = (g.at(i, j, m) + g.at(j, i, m)) * norm;
          if (coef == 0.0) continue;
          const double* src = &fm.v[(std::size_t(j) * fm.out_height + m) * fm.out_width];
          for (int n = 0; n < fm.out_width; ++n) dst[n] += coef * src[n];
        }
      }
    }
  }
  return out;
}

} // namespace texsynth
