#pragma once

#include <cstdint>
#include <iosfwd>

namespace texsynth {

struct GradCheckOptions {
  std::uint64_t seed = 0;
  double stage_tolerance = 1e-6;
  double end_to_end_tolerance = 1e-4;
  // test hook: perturbs the conv adjoint so the checks must fail
  bool corrupt_forward_adjoint = false;
};

// Stage-wise and end-to-end finite-difference verification of the gradient
// chain on small random instances.  Returns true when every check passes.
bool run_gradcheck(const GradCheckOptions& opts, std::ostream& report);

// Max relative error of loss_and_gradient vs central finite differences on
// num_coords random sample coordinates (reduced 2-layer bank, 8 filters).
double end_to_end_fd_error(std::uint64_t seed, double signal_seconds, int num_coords,
                           bool corrupt = false);

} // namespace texsynth
