#pragma once

// Scalar search and quadrature used by the market and the oracle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

#include <boost/math/tools/minima.hpp>

#include "rbresale/error.hpp"

namespace rbresale::numeric {

struct ScalarMax {
  double x = 0.0;
  double value = 0.0;
  int iterations = 0;
};

/// Maximises a unimodal function on [lo, hi] with Brent's method (parabolic
/// steps guarded by golden sections). The endpoints are compared against the
/// interior optimum so corner maxima are returned exactly.
template <class F>
ScalarMax brent_max(F&& f, double lo, double hi, int bits = 26, int max_iter = 200) {
  if (!(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw OptimizerError("brent: invalid bracket");
  }
  if (hi == lo) return {lo, f(lo), 0};
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
  const auto [x, neg] = boost::math::tools::brent_find_minima([&](double z) { return -f(z); }, lo, hi, bits, iters);
  ScalarMax best{x, -neg, static_cast<int>(iters)};
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo >= best.value) best = {lo, flo, best.iterations};
  if (fhi > best.value) best = {hi, fhi, best.iterations};
  return best;
}

/// Root of a non-increasing function g on [lo, hi] by bisection. When g does
/// not change sign the nearer corner is returned (g(lo) <= 0 gives lo,
/// g(hi) >= 0 gives hi).
template <class G>
double bisect_decreasing(G&& g, double lo, double hi, double abs_tol, int max_iter = 300) {
  if (g(lo) <= 0.0) return lo;
  if (g(hi) >= 0.0) return hi;
  for (int i = 0; i < max_iter && hi - lo > abs_tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace detail {

template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                    int depth, int& budget) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (--budget < 0) throw QuadratureError("adaptive Simpson: evaluation budget exhausted");
  if (depth <= 0) {
    if (std::abs(delta) > 15.0 * tol) throw QuadratureError("adaptive Simpson: depth limit reached before tolerance");
    return left + right + delta / 15.0;
  }
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, budget) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, budget);
}

}  // namespace detail

/// Adaptive composite Simpson. The absolute tolerance is rel_tol times the
/// magnitude of a coarse first estimate (with a floor of abs_floor).
template <class F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol = 1e-9, double abs_floor = 1e-300,
                        int max_depth = 60) {
  if (a == b) return 0.0;
  if (a > b) return -adaptive_simpson(f, b, a, rel_tol, abs_floor, max_depth);
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double scale = std::max(std::abs(whole), (b - a) * std::max({std::abs(fa), std::abs(fm), std::abs(fb)}));
  const double tol = std::max(rel_tol * scale, abs_floor);
  int budget = 2'000'000;
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth, budget);
}

}  // namespace rbresale::numeric
