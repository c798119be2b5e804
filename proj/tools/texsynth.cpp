#include "texsynth/audio.hpp"
#include "texsynth/gradcheck.hpp"
#include "texsynth/paramfile.hpp"
#include "texsynth/synth.hpp"

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace texsynth;

constexpr int kTargetRate = 16000;
constexpr double kAnalysisVariance = 0.01; // ~ -20 dBFS RMS

std::vector<int> parse_layers(const std::string& spec) {
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

void set_deterministic() {
#ifdef _OPENMP
  omp_set_num_threads(1);
#endif
}

AudioBuffer load_normalized(const std::string& path) {
  AudioBuffer buf = read_wav(path);
  buf = resample(buf, kTargetRate);
  return normalize_energy(buf, kAnalysisVariance);
}

ParamFile analyze_file(const std::string& input, std::uint64_t seed,
                       int filters, const std::vector<int>& layer_indices) {
  const AudioBuffer buf = load_normalized(input);
  StftConfig cfg;
  FilterBank bank = init_bank(seed, layer_indices, filters);
  const int min_frames = bank.max_filter_width();
  if (cfg.frames_for(buf.samples.size()) < min_frames)
    throw std::runtime_error("input shorter than minimum analyzable duration ("
                             + std::to_string(cfg.samples_for(min_frames)) + " samples at 16 kHz)");
  ParamFile pf;
  pf.bank = std::move(bank);
  pf.params = analyze(buf, pf.bank, cfg, kDefaultCompression);
  return pf;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"parametric sound texture analysis / re-synthesis"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int filters = kDefaultNumFilters;
  std::string layers_spec = "0,1,2,3,4,5,6,7";
  bool deterministic = false;
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--filters", filters, "filters per layer")->capture_default_str();
  app.add_option("--layers", layers_spec, "comma-separated layer shape indices (0-7)")
      ->capture_default_str();
  app.add_flag("--deterministic", deterministic, "single-threaded reference mode");

  // analyze
  auto* cmd_analyze = app.add_subcommand("analyze", "extract texture parameters from a WAV");
  std::string an_input, an_output;
  cmd_analyze->add_option("input", an_input, "input WAV")->required();
  cmd_analyze->add_option("output", an_output, "output parameter file")->required();

  // synthesize
  auto* cmd_synth = app.add_subcommand("synthesize", "impose parameters onto a noise signal");
  std::string sy_input, sy_output, sy_trace;
  int sy_iterations = 5000;
  double sy_duration = -1.0;
  double sy_init_rms = 0.1;
  std::uint64_t sy_bank_seed = 0;
  cmd_synth->add_option("input", sy_input, "parameter file (.params) or WAV")->required();
  cmd_synth->add_option("output", sy_output, "output WAV")->required();
  cmd_synth->add_option("--iterations", sy_iterations, "optimization iterations")
      ->capture_default_str();
  cmd_synth->add_option("--duration", sy_duration, "output duration in seconds "
                        "(default: match the original)");
  cmd_synth->add_option("--init-rms", sy_init_rms, "RMS of the noise base signal")
      ->capture_default_str();
  cmd_synth->add_option("--bank-seed", sy_bank_seed, "filter bank seed when input is a WAV")
      ->capture_default_str();
  cmd_synth->add_option("--trace", sy_trace, "per-iteration trace CSV");

  // anchor
  auto* cmd_anchor = app.add_subcommand("anchor", "spectrum-matched noise reference");
  std::string ac_input, ac_output;
  cmd_anchor->add_option("input", ac_input, "input WAV")->required();
  cmd_anchor->add_option("output", ac_output, "output WAV")->required();

  // gradcheck
  auto* cmd_gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient checks");

  CLI11_PARSE(app, argc, argv);

  if (deterministic) set_deterministic();

  try {
    if (*cmd_analyze) {
      ParamFile pf = analyze_file(an_input, seed, filters, parse_layers(layers_spec));
      for (std::size_t l = 0; l < pf.params.layers.size(); ++l) {
        const auto& g = pf.params.layers[l];
        const auto& c = pf.bank.layers[l];
        std::cout << "layer " << l << ": filters " << c.height << "x" << c.width
                  << ", gram " << g.num_filters << "x" << g.num_filters << "x"
                  << g.out_height << "\n";
      }
      save_params(pf, an_output);
      std::cout << "wrote " << an_output << "\n";
    } else if (*cmd_synth) {
      ParamFile pf;
      if (ends_with(sy_input, ".wav") || ends_with(sy_input, ".WAV")) {
        pf = analyze_file(sy_input, sy_bank_seed, filters, parse_layers(layers_spec));
      } else {
        pf = load_params(sy_input);
      }
      TextureObjective obj(pf.params, pf.bank);
      SynthConfig cfg;
      cfg.duration = sy_duration;
      cfg.iterations = sy_iterations;
      cfg.init_rms = sy_init_rms;
      cfg.seed = seed;
      SynthResult result = synthesize(obj, cfg);
      write_wav(result.audio, sy_output);
      if (!sy_trace.empty()) write_trace_csv(result.trace, sy_trace);
      std::cout << "loss " << result.initial_loss << " -> " << result.final_loss
                << " (" << status_name(result.trace.status) << ", "
                << result.trace.total_evaluations << " evaluations)\n";
      if (result.trace.status == LbfgsStatus::line_search_failed)
        std::cerr << "warning: line search failed; best-so-far signal written\n";
    } else if (*cmd_anchor) {
      AudioBuffer ref = resample(read_wav(ac_input), kTargetRate);
      write_wav(make_anchor(ref, seed), ac_output);
      std::cout << "wrote " << ac_output << "\n";
    } else if (*cmd_gradcheck) {
      GradCheckOptions opts;
      opts.seed = seed;
      if (!run_gradcheck(opts, std::cout)) return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
