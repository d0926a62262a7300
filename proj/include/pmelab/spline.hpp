#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pme {

/// Natural cubic spline interpolant on a strictly increasing grid.
/// Tridiagonal (Thomas) solve for the second derivatives.
class CubicSpline {
 public:
  CubicSpline() = default;

  CubicSpline(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
      throw std::invalid_argument("CubicSpline: need matching grids, n >= 2");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1]))
        throw std::invalid_argument("CubicSpline: grid must be strictly increasing");
    m_.assign(n, 0.0);
    if (n == 2) return;  // linear

    std::vector<double> a(n, 0.0), b(n, 0.0), cdiag(n, 0.0), rhs(n, 0.0);
    b[0] = 1.0;
    b[n - 1] = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      a[i] = h0 / 6.0;
      b[i] = (h0 + h1) / 3.0;
      cdiag[i] = h1 / 6.0;
      rhs[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    }
    // forward elimination
    for (std::size_t i = 1; i < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * cdiag[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    m_[n - 1] = rhs[n - 1] / b[n - 1];
    for (int i = static_cast<int>(n) - 2; i >= 0; --i)
      m_[i] = (rhs[i] - cdiag[i] * m_[i + 1]) / b[i];
  }

  double operator()(double x) const { return eval(x, 0); }
  double deriv(double x) const { return eval(x, 1); }

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  double eval(double x, int order) const {
    const std::size_t n = x_.size();
    std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]);
    const double u = (x_[i + 1] - x);
    if (order == 0) {
      return (m_[i] * u * u * u + m_[i + 1] * t * t * t) / (6.0 * h) +
             (y_[i] / h - m_[i] * h / 6.0) * u + (y_[i + 1] / h - m_[i + 1] * h / 6.0) * t;
    }
    return (-m_[i] * u * u + m_[i + 1] * t * t) / (2.0 * h) +
           (y_[i + 1] - y_[i]) / h - (m_[i + 1] - m_[i]) * h / 6.0;
    (void)n;
  }

  std::size_t segment(double x) const {
    // clamped extrapolation onto the first/last cubic piece
    if (x <= x_.front()) return 0;
    if (x >= x_.back()) return x_.size() - 2;
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    return static_cast<std::size_t>(it - x_.begin()) - 1;
  }

  std::vector<double> x_, y_, m_;
};

}  // namespace pme
