#pragma once

#include <functional>
#include <string>
#include <vector>

namespace texsynth {

struct LbfgsOptions {
  int memory = 10;
  int max_iterations = 100;
  double gradient_tolerance = 1e-9; // on the infinity norm
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search_steps = 20;
};

enum class LbfgsStatus {
  converged,        // gradient tolerance reached
  max_iterations,
  line_search_failed, // best-so-far returned
  non_finite,         // objective or gradient went non-finite
};

struct TraceRecord {
  int iteration = 0;
  double loss = 0.0;
  double grad_inf_norm = 0.0;
  double step = 0.0;
  int function_evaluations = 0; // cumulative
};

struct RunTrace {
  std::vector<TraceRecord> records;
  LbfgsStatus status = LbfgsStatus::max_iterations;
  int total_evaluations = 0;
};

using ObjectiveFn = std::function<double(const std::vector<double>& x,
                                         std::vector<double>& grad)>;

struct LbfgsResult {
  std::vector<double> x;
  double loss = 0.0;
  RunTrace trace;
};

// Two-loop recursion over the last `memory` (s, y) pairs with gamma = s'y/y'y
// initial scaling; curvature pairs with s'y <= 1e-10 ||s|| ||y|| are skipped.
// Strong Wolfe line search; every accepted step strictly decreases f.
LbfgsResult minimize(const ObjectiveFn& f_and_grad, std::vector<double> x0,
                     const LbfgsOptions& opts);

std::string status_name(LbfgsStatus s);

} // namespace texsynth
