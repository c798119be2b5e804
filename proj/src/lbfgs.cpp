#include "texsynth/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace texsynth {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

struct Pair {
  std::vector<double> s, y;
  double rho; // 1 / s'y
};

struct LineSearchResult {
  double alpha = 0.0;
  double f = 0.0;
  bool ok = false;
  int evals = 0;
};

// Strong Wolfe line search (bracket + zoom, bisection refinement).
// phi(a) = f(x + a*d); evaluates f_and_grad through the supplied closure.
class LineSearch {
public:
  LineSearch(const ObjectiveFn& f, const std::vector<double>& x,
             const std::vector<double>& d, std::vector<double>& xtrial,
             std::vector<double>& gtrial)
      : f_(f), x_(x), d_(d), xt_(xtrial), gt_(gtrial) {}

  // evaluates phi(a) and phi'(a); gt_ holds the gradient at the trial point
  double eval(double a, double& dphi) {
    for (std::size_t i = 0; i < x_.size(); ++i) xt_[i] = x_[i] + a * d_[i];
    const double f = f_(xt_, gt_);
    dphi = dot(gt_, d_);
    ++evals_;
    return f;
  }

  int evals() const { return evals_; }

private:
  const ObjectiveFn& f_;
  const std::vector<double>& x_;
  const std::vector<double>& d_;
  std::vector<double>& xt_;
  std::vector<double>& gt_;
  int evals_ = 0;
};

LineSearchResult strong_wolfe(LineSearch& ls, double f0, double dphi0,
                              const LbfgsOptions& opts) {
  LineSearchResult res;
  if (dphi0 >= 0.0) return res; // not a descent direction

  const double c1 = opts.wolfe_c1, c2 = opts.wolfe_c2;
  double a_prev = 0.0, f_prev = f0, dphi_prev = dphi0;
  double a = 1.0;
  double a_lo = 0.0, a_hi = 0.0, f_lo = f0, dphi_lo = dphi0;
  bool bracketed = false;

  for (int it = 0; it < opts.max_line_search_steps && !bracketed; ++it) {
    double dphi;
    const double f = ls.eval(a, dphi);
    if (!std::isfinite(f)) { // back off from a blow-up
      a = 0.5 * (a_prev + a);
      continue;
    }
    if (f > f0 + c1 * a * dphi0 || (it > 0 && f >= f_prev)) {
      a_lo = a_prev; f_lo = f_prev; dphi_lo = dphi_prev;
      a_hi = a;
      bracketed = true;
      break;
    }
    if (std::abs(dphi) <= -c2 * dphi0) {
      res.alpha = a;
      res.f = f;
      res.ok = f < f0;
      res.evals = ls.evals();
      return res;
    }
    if (dphi >= 0.0) {
      a_lo = a; f_lo = f; dphi_lo = dphi;
      a_hi = a_prev;
      bracketed = true;
      break;
    }
    a_prev = a; f_prev = f; dphi_prev = dphi;
    a *= 2.0;
  }
  if (!bracketed) {
    res.evals = ls.evals();
    return res;
  }

  // zoom
  double best_a = 0.0, best_f = f0;
  for (int it = 0; it < opts.max_line_search_steps; ++it) {
    const double aj = 0.5 * (a_lo + a_hi);
    double dphi;
    const double f = ls.eval(aj, dphi);
    if (std::isfinite(f) && f < best_f) { best_f = f; best_a = aj; }
    if (!std::isfinite(f) || f > f0 + c1 * aj * dphi0 || f >= f_lo) {
      a_hi = aj;
    } else {
      if (std::abs(dphi) <= -c2 * dphi0) {
        res.alpha = aj;
        res.f = f;
        res.ok = f < f0;
        res.evals = ls.evals();
        return res;
      }
      if (dphi * (a_hi - a_lo) >= 0.0) a_hi = a_lo;
      a_lo = aj; f_lo = f; dphi_lo = dphi;
    }
    if (std::abs(a_hi - a_lo) < 1e-16 * std::max(1.0, std::abs(a_lo))) break;
  }

  // no point satisfying both conditions; fall back to plain decrease
  if (best_a > 0.0 && best_f < f0) {
    double dphi;
    res.f = ls.eval(best_a, dphi); // leave xtrial/gtrial at best_a
    res.alpha = best_a;
    res.ok = true;
  }
  res.evals = ls.evals();
  return res;
}

} // namespace

std::string status_name(LbfgsStatus s) {
  switch (s) {
    case LbfgsStatus::converged: return "converged";
    case LbfgsStatus::max_iterations: return "max_iterations";
    case LbfgsStatus::line_search_failed: return "line_search_failed";
    case LbfgsStatus::non_finite: return "non_finite";
  }
  return "unknown";
}

LbfgsResult minimize(const ObjectiveFn& f_and_grad, std::vector<double> x0,
                     const LbfgsOptions& opts) {
  if (opts.memory < 1) throw std::invalid_argument("lbfgs: memory must be >= 1");
  if (!(opts.wolfe_c1 > 0.0 && opts.wolfe_c1 < opts.wolfe_c2 && opts.wolfe_c2 < 1.0))
    throw std::invalid_argument("lbfgs: need 0 < c1 < c2 < 1");

  const std::size_t n = x0.size();
  LbfgsResult res;
  res.x = std::move(x0);

  std::vector<double> g(n), xtrial(n), gtrial(n), d(n);
  double f = f_and_grad(res.x, g);
  int evals = 1;
  if (!std::isfinite(f) || !all_finite(g))
    throw std::runtime_error("lbfgs: non-finite objective or gradient at x0");

  res.trace.records.push_back({0, f, inf_norm(g), 0.0, evals});
  std::deque<Pair> pairs;

  LbfgsStatus status = LbfgsStatus::max_iterations;
  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    if (inf_norm(g) < opts.gradient_tolerance) {
      status = LbfgsStatus::converged;
      break;
    }

    // two-loop recursion: d = -H g
    d = g;
    std::vector<double> alpha(pairs.size());
    for (std::size_t k = pairs.size(); k-- > 0;) {
      alpha[k] = pairs[k].rho * dot(pairs[k].s, d);
      for (std::size_t i = 0; i < n; ++i) d[i] -= alpha[k] * pairs[k].y[i];
    }
    if (!pairs.empty()) {
      const Pair& last = pairs.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (double& v : d) v *= gamma;
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const double beta = pairs[k].rho * dot(pairs[k].y, d);
      for (std::size_t i = 0; i < n; ++i) d[i] += (alpha[k] - beta) * pairs[k].s[i];
    }
    for (double& v : d) v = -v;

    double dphi0 = dot(g, d);
    if (dphi0 >= 0.0) { // not a descent direction; reset to steepest descent
      pairs.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      dphi0 = dot(g, d);
      if (dphi0 >= 0.0) {
        status = LbfgsStatus::converged; // zero gradient
        break;
      }
    }

    LineSearch ls(f_and_grad, res.x, d, xtrial, gtrial);
    const LineSearchResult lsr = strong_wolfe(ls, f, dphi0, opts);
    evals += lsr.evals;
    if (!lsr.ok) {
      status = LbfgsStatus::line_search_failed;
      break;
    }
    if (!std::isfinite(lsr.f) || !all_finite(gtrial)) {
      status = LbfgsStatus::non_finite;
      break;
    }

    Pair p;
    p.s.resize(n);
    p.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      p.s[i] = xtrial[i] - res.x[i];
      p.y[i] = gtrial[i] - g[i];
    }
    const double sy = dot(p.s, p.y);
    const double sn = std::sqrt(dot(p.s, p.s)), yn = std::sqrt(dot(p.y, p.y));
    if (sy > 1e-10 * sn * yn) {
      p.rho = 1.0 / sy;
      pairs.push_back(std::move(p));
      if (static_cast<int>(pairs.size()) > opts.memory) pairs.pop_front();
    }

    res.x = xtrial;
    g = gtrial;
    f = lsr.f;
    res.trace.records.push_back({iter + 1, f, inf_norm(g), lsr.alpha, evals});
  }

  res.loss = f;
  res.trace.status = status;
  res.trace.total_evaluations = evals;
  return res;
}

} // namespace texsynth
