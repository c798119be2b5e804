#pragma once

#include "texsynth/tfr.hpp"

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace texsynth {

// (frequency extent, time extent) of the 8 banks
constexpr std::array<std::pair<int, int>, 8> kLayerShapes = {{
    {101, 2}, {53, 3}, {11, 5}, {3, 3}, {5, 5}, {11, 11}, {19, 19}, {27, 27}}};
constexpr int kDefaultNumFilters = 128;
constexpr double kWeightRange = 0.05;
constexpr int kInputChannels = 2;

// One untrained convolutional layer: num_filters filters of a single
// (height, width) shape over the 2-channel RI input, no bias.
struct ConvLayer {
  int height = 0;
  int width = 0;
  int num_filters = 0;
  std::vector<double> weights; // [filter][channel][fy][fx]

  std::size_t weights_per_filter() const {
    return std::size_t(kInputChannels) * height * width;
  }
  double& w(int f, int c, int fy, int fx) {
    return weights[((std::size_t(f) * kInputChannels + c) * height + fy) * width + fx];
  }
  double w(int f, int c, int fy, int fx) const {
    return weights[((std::size_t(f) * kInputChannels + c) * height + fy) * width + fx];
  }
};

struct FilterBank {
  std::vector<ConvLayer> layers;
  std::uint64_t seed = 0;

  int max_filter_width() const;
  int max_filter_height() const;
};

struct FeatureMapLayer {
  int num_filters = 0;
  int out_height = 0; // frequency positions
  int out_width = 0;  // time positions
  std::vector<double> v; // [filter][m][n]

  double& at(int f, int m, int n) {
    return v[(std::size_t(f) * out_height + m) * out_width + n];
  }
  double at(int f, int m, int n) const {
    return v[(std::size_t(f) * out_height + m) * out_width + n];
  }
};

struct FeatureMaps {
  std::vector<FeatureMapLayer> layers;
};

// Per-layer Gram tensor H[i][j][m] = sum_n F[i][m][n] F[j][m][n],
// optionally divided by the time extent.
struct GramLayer {
  int num_filters = 0;
  int out_height = 0;
  std::vector<double> v; // [i][j][m]

  double& at(int i, int j, int m) {
    return v[(std::size_t(i) * num_filters + j) * out_height + m];
  }
  double at(int i, int j, int m) const {
    return v[(std::size_t(i) * num_filters + j) * out_height + m];
  }
};

struct ParameterSet {
  std::vector<GramLayer> layers;
  bool frame_normalized = true;
  // analysis metadata, filled by analyze()
  StftConfig stft_config;
  double compression = kDefaultCompression;
  double scale = 1.0;
  std::uint64_t bank_seed = 0;
  int num_frames = 0; // frame count of the analyzed signal
};

// Full paper bank: 8 layers with the fixed shape list, 128 filters each,
// weights i.i.d. uniform on [-0.05, 0.05] from the counter RNG.
FilterBank init_bank(std::uint64_t seed);

// Reduced bank for desk-scale work: subset of shape indices, fewer filters.
FilterBank init_bank(std::uint64_t seed, const std::vector<int>& shape_indices,
                     int num_filters);

// Valid cross-correlation (no kernel flip), stride 1, no padding, ReLU.
FeatureMaps forward(const RIStack& ri, const FilterBank& bank);

ParameterSet gram(const FeatureMaps& maps, bool normalize_frames);

// VJP through ReLU and the convolutions, back to a gradient over the RI
// stack (accumulated over all layers and filters).
RIStack forward_adjoint(const FeatureMaps& grad_maps, const RIStack& ri,
                        const FilterBank& bank);

// Same, reusing already-computed forward maps (the ReLU gate is post > 0).
RIStack forward_adjoint(const FeatureMaps& grad_maps, const RIStack& ri,
                        const FilterBank& bank, const FeatureMaps& maps);

// VJP of gram(): dF[i][m][n] = sum_j (G[i][j][m] + G[j][i][m]) F[j][m][n],
// scaled by 1/out_width when the cotangent came from a normalized gram.
FeatureMaps gram_adjoint(const ParameterSet& grad_h, const FeatureMaps& maps);

} // namespace texsynth
