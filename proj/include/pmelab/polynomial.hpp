#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pme {

/// Dense univariate polynomial, coefficients by ascending power. Used for
/// the closed-form eigenfunctions, whose derivatives must be exact.
class Polynomial {
 public:
  Polynomial() : c_{0.0} {}
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) c_.push_back(0.0);
  }
  static Polynomial monomial(int power, double coeff = 1.0) {
    std::vector<double> c(power + 1, 0.0);
    c[power] = coeff;
    return Polynomial(std::move(c));
  }

  const std::vector<double>& coeffs() const { return c_; }

  int degree() const {
    for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i)
      if (c_[i] != 0.0) return i;
    return 0;
  }

  double operator()(double x) const {
    double v = 0.0;
    for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i) v = v * x + c_[i];
    return v;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return Polynomial();
    std::vector<double> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
    return Polynomial(std::move(d));
  }

  Polynomial operator+(const Polynomial& o) const {
    std::vector<double> s(std::max(c_.size(), o.c_.size()), 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i) s[i] += c_[i];
    for (std::size_t i = 0; i < o.c_.size(); ++i) s[i] += o.c_[i];
    return Polynomial(std::move(s));
  }

  Polynomial operator-(const Polynomial& o) const { return *this + (o * -1.0); }

  Polynomial operator*(double a) const {
    std::vector<double> s(c_);
    for (auto& v : s) v *= a;
    return Polynomial(std::move(s));
  }

  Polynomial operator*(const Polynomial& o) const {
    std::vector<double> s(c_.size() + o.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i)
      for (std::size_t j = 0; j < o.c_.size(); ++j) s[i + j] += c_[i] * o.c_[j];
    return Polynomial(std::move(s));
  }

  /// Exact division by x^k. The low-order coefficients must vanish (up to
  /// round-off relative to the largest coefficient).
  Polynomial shift_down(int k, double tol = 1e-12) const {
    double scale = 0.0;
    for (double v : c_) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < k && i < static_cast<int>(c_.size()); ++i)
      if (std::abs(c_[i]) > tol * std::max(scale, 1.0))
        throw std::invalid_argument("Polynomial::shift_down: nonzero low-order term");
    if (k >= static_cast<int>(c_.size())) return Polynomial();
    return Polynomial(std::vector<double>(c_.begin() + k, c_.end()));
  }

 private:
  std::vector<double> c_;
};

inline Polynomial operator*(double a, const Polynomial& p) { return p * a; }

}  // namespace pme
