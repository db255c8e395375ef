// Self-contained numeric oracles for the test suite. Everything here is
// deliberately independent of the library internals: plain adaptive Simpson
// quadrature, central differences, and a golden-section maximizer, so the
// tests compare the production code against a second implementation rather
// than against itself.
#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracles {

inline double simpson(const std::function<double(double)>& f, double a,
                      double b) {
  double m = 0.5 * (a + b);
  return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double whole,
                                   double tol, int depth) {
  double m = 0.5 * (a + b);
  double left = simpson(f, a, m);
  double right = simpson(f, m, b);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson on [a, b]; tol is an absolute target.
inline double integrate_1d(const std::function<double(double)>& f, double a,
                           double b, double tol = 1e-12, int depth = 40) {
  return adaptive_simpson_rec(f, a, b, simpson(f, a, b), tol, depth);
}

// Central difference gradient with per-coordinate step h.
inline std::vector<double> fd_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h = 1e-6) {
  std::vector<double> g(x.size());
  std::vector<double> xp(x.begin(), x.end());
  for (size_t d = 0; d < x.size(); ++d) {
    double keep = xp[d];
    xp[d] = keep + h;
    double fp = f(xp);
    xp[d] = keep - h;
    double fm = f(xp);
    xp[d] = keep;
    g[d] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Golden-section search for the maximizer of f on [a, b].
inline double golden_max(const std::function<double(double)>& f, double a,
                         double b, double tol = 1e-13) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Least-squares slope of y against x.
inline double lsq_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("lsq_slope needs matched samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracles
