#pragma once

// Curves of linear maps on so(3) of the form
//
//   P0(tau) 1 + P1(tau) i~ + P2(tau) e~(t) + P3(tau) i~ e~(t)   on F0-perp,
//   Pa(tau) 1                                                 on span(F0),
//
// with tau = t - t0 and polynomial coefficients. The family is closed under
// differentiation and under the running integral I(g)(t) = int_{t0}^t g, which
// is what makes the second order approximants elementary.

#include <array>

#include "so3cubic/polynomial.hpp"
#include "so3cubic/so3_algebra.hpp"

namespace so3cubic {

class EndoCurve {
 public:
  enum Term { kOne = 0, kI = 1, kE = 2, kIE = 3 };

  EndoCurve() = default;
  EndoCurve(std::array<Polynomial, 4> perp, Polynomial axial)
      : perp_(std::move(perp)), axial_(std::move(axial)) {}

  /// p(tau) e~(t), including the axial part p(tau) F0 F0^T.
  static EndoCurve poly_times_e(const Polynomial& p) {
    EndoCurve m;
    m.perp_[kE] = p;
    m.axial_ = p;
    return m;
  }
  static EndoCurve poly_times_identity(const Polynomial& p) {
    EndoCurve m;
    m.perp_[kOne] = p;
    m.axial_ = p;
    return m;
  }

  const Polynomial& term(Term k) const { return perp_[k]; }
  const Polynomial& axial() const { return axial_; }

  EndoCurve& operator+=(const EndoCurve& o) {
    for (int k = 0; k < 4; ++k) perp_[k] += o.perp_[k];
    axial_ += o.axial_;
    return *this;
  }
  friend EndoCurve operator+(EndoCurve a, const EndoCurve& b) { return a += b; }
  friend EndoCurve operator*(double s, EndoCurve m) {
    for (auto& p : m.perp_) p *= s;
    m.axial_ *= s;
    return m;
  }
  friend EndoCurve operator-(EndoCurve a, const EndoCurve& b) { return a += (-1.0) * b; }

  /// Left composition with i~ = ad(F0); uses i~^2 = -1 on F0-perp and i~ F0 = 0.
  EndoCurve times_i() const {
    EndoCurve m;
    m.perp_[kOne] = -perp_[kI];
    m.perp_[kI] = perp_[kOne];
    m.perp_[kE] = -perp_[kIE];
    m.perp_[kIE] = perp_[kE];
    return m;
  }

  /// d/dt, using e~' = -d i~ e~.
  EndoCurve derivative(double d) const {
    EndoCurve m;
    m.perp_[kOne] = perp_[kOne].derivative();
    m.perp_[kI] = perp_[kI].derivative();
    m.perp_[kE] = perp_[kE].derivative() + d * perp_[kIE];
    m.perp_[kIE] = perp_[kIE].derivative() - d * perp_[kE];
    m.axial_ = axial_.derivative();
    return m;
  }

  /// I(g)(t) = int_{t0}^t g(s) ds in closed form. Terms in e~ are integrated
  /// by parts, I(e~ g) = (i~/d)(e~ g - g(t0) - I(e~ g')), until the polynomial
  /// derivative vanishes.
  EndoCurve integral(double d) const {
    EndoCurve m;
    m.perp_[kOne] = perp_[kOne].integral();
    m.perp_[kI] = perp_[kI].integral();
    m += integral_of_e(perp_[kE], d);
    m += integral_of_e(perp_[kIE], d).times_i();
    m.axial_ = axial_.integral();
    return m;
  }

  /// Value at t as a matrix in standard coordinates.
  Matrix3 eval(const Frame& frame, double t, double t0) const {
    const double tau = t - t0;
    const Matrix3 axis = frame.F0 * frame.F0.transpose();
    const Matrix3 proj = Matrix3::Identity() - axis;
    const Matrix3 i = frame.i_tilde();
    const Matrix3 e_perp = tilde_e(frame, t, t0) * proj;
    return perp_[kOne](tau) * proj + perp_[kI](tau) * i + perp_[kE](tau) * e_perp +
           perp_[kIE](tau) * (i * e_perp) + axial_(tau) * axis;
  }

  So3Vector apply(const Frame& frame, double t, double t0, const So3Vector& v) const {
    return eval(frame, t, t0) * v;
  }

 private:
  // Perp-only: the e~ terms' axial contribution is handled by the caller.
  static EndoCurve integral_of_e(const Polynomial& p, double d) {
    EndoCurve m;
    if (p.is_zero()) return m;
    // (i~/d)(e~ p - p(0) 1) - (i~/d) I(e~ p')
    EndoCurve inner;
    inner.perp_[kE] = p;
    inner.perp_[kOne] = Polynomial::constant(-p(0.0));
    inner = inner - integral_of_e(p.derivative(), d);
    return (1.0 / d) * inner.times_i();
  }

  std::array<Polynomial, 4> perp_;
  Polynomial axial_;
};

/// I(p e~) as a curve of linear maps on so(3).
inline EndoCurve integral_poly_e(const Frame& frame, const Polynomial& p) {
  return EndoCurve::poly_times_e(p).integral(frame.d);
}

/// Matrix of I(p e~) at time t.
inline Matrix3 integral_poly_e(const Frame& frame, const Polynomial& p, double t, double t0) {
  return integral_poly_e(frame, p).eval(frame, t, t0);
}

/// The endomorphisms L0, L1, M0, M1, M_B, each a combination of 1, i~, e~ and
/// i~ e~ with polynomial coefficients in u = d (t - t0). They are used only
/// on F0-perp; their axial part is set to zero.
struct EndomorphismSet {
  EndoCurve L0, L1, M0, M1, MB;
};

inline EndomorphismSet endomorphisms(const Frame& frame) {
  const double d = frame.d;
  // Powers of u = d tau as polynomials in tau.
  auto u_pow = [d](std::size_t k, double scale) {
    double dk = 1.0;
    for (std::size_t i = 0; i < k; ++i) dk *= d;
    return Polynomial::monomial(k, scale * dk);
  };
  using P = Polynomial;
  auto make = [](double s, P one, P i, P e, P ie) {
    return s * EndoCurve({std::move(one), std::move(i), std::move(e), std::move(ie)}, {});
  };
  EndomorphismSet s;
  // L0 = (1/d)(-u 1 + (u^2/2 - 1) i~ + i~ e~)
  s.L0 = make(1.0 / d, u_pow(1, -1.0), u_pow(2, 0.5) + P{-1.0}, {}, P{1.0});
  // L1 = (1/d^2)((u^2/2 - 3) 1 + 2u i~ + 3 e~ + u i~ e~)
  s.L1 = make(1.0 / (d * d), u_pow(2, 0.5) + P{-3.0}, u_pow(1, 2.0), P{3.0}, u_pow(1, 1.0));
  // M0 = (1/d^3)((u^2/2 - 1) 1 + u i~ + e~)
  s.M0 = make(1.0 / (d * d * d), u_pow(2, 0.5) + P{-1.0}, u_pow(1, 1.0), P{1.0}, {});
  // M1 = (1/d^4)((u^3/6 - u) 1 + (u^2/2 - 1) i~ + i~ e~)
  s.M1 = make(1.0 / (d * d * d * d), u_pow(3, 1.0 / 6.0) + u_pow(1, -1.0), u_pow(2, 0.5) + P{-1.0},
              {}, P{1.0});
  // MB = (1/d^3)(2(e~ - 1) + u i~ (e~ + 1))
  s.MB = make(1.0 / (d * d * d), P{-2.0}, u_pow(1, 1.0), P{2.0}, u_pow(1, 1.0));
  return s;
}

}  // namespace so3cubic
