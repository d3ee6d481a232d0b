#pragma once

#include <cmath>
#include <functional>

namespace testing_quad {

// Adaptive Simpson with Richardson correction.
inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                           double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                               int max_depth = 50) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Sum of adaptive Simpson over equal panels, for integrands with many features.
inline double panel_simpson(const std::function<double(double)>& f, double a, double b, int panels, double tol) {
  double s = 0.0;
  const double w = (b - a) / panels;
  for (int i = 0; i < panels; ++i) s += adaptive_simpson(f, a + i * w, a + (i + 1) * w, tol / panels);
  return s;
}

}  // namespace testing_quad
