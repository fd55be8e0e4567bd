#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace so3cubic {

/// Real polynomial in a shifted variable tau = t - t0, ascending coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<double> coeffs) : c_(coeffs) { trim(); }
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

  static Polynomial constant(double v) { return Polynomial{v}; }
  /// The monomial tau^k scaled by v.
  static Polynomial monomial(std::size_t k, double v = 1.0) {
    std::vector<double> c(k + 1, 0.0);
    c[k] = v;
    return Polynomial(std::move(c));
  }

  const std::vector<double>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  double coeff(std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }

  double operator()(double tau) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * tau + *it;
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return Polynomial(std::move(d));
  }

  /// Antiderivative vanishing at tau = 0.
  Polynomial integral() const {
    if (c_.empty()) return {};
    std::vector<double> a(c_.size() + 1, 0.0);
    for (std::size_t k = 0; k < c_.size(); ++k) a[k + 1] = c_[k] / static_cast<double>(k + 1);
    return Polynomial(std::move(a));
  }

  Polynomial& operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
  }
  Polynomial& operator*=(double s) {
    for (double& v : c_) v *= s;
    trim();
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a += (-1.0) * b; }
  friend Polynomial operator*(double s, Polynomial p) { return p *= s; }
  friend Polynomial operator-(Polynomial p) { return p *= -1.0; }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
  }

  std::vector<double> c_;
};

}  // namespace so3cubic
