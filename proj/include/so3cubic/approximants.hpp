#pragma once

// Closed-form approximations to Lie quadratics that are close to a constant
// D = d F0. With tau = t - t0 and q(tau) = c0 + c1 tau + c2 tau^2,
//
//   V1^(t) = D + delta (q F0 + A0 + tau A1 + e~(t) B)
//   V2^(t) = V1^(t) + (delta^2 / 2) (f2(t) F0 + v2(t))
//
// where A0, A1, B lie in F0-perp and f2, v2 are the second order variation,
// written with the endomorphisms L0, L1, M0, M1, M_B and I^2(I(q) e~).

#include <cmath>
#include <stdexcept>

#include "so3cubic/endomorphism.hpp"
#include "so3cubic/errors.hpp"
#include "so3cubic/lie_quadratic_ode.hpp"
#include "so3cubic/polynomial.hpp"
#include "so3cubic/so3_algebra.hpp"

namespace so3cubic {

struct ApproxParams {
  double delta = 0.0;
  Frame frame;
  double t0 = 0.0;
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
  double a01 = 0.0, a02 = 0.0;  // A0 in (F1, F2) coordinates
  double a11 = 0.0, a12 = 0.0;  // A1 in (F1, F2) coordinates
  double beta = 0.0;            // |B|
  double gamma = 0.0;           // polar angle of B in [0, 2 pi)
  bool degenerate_b = false;    // set by fit_params when B = 0

  double d() const { return frame.d; }
  So3Vector D() const { return frame.D(); }
  So3Vector A0() const { return frame.from_coords(0.0, a01, a02); }
  So3Vector A1() const { return frame.from_coords(0.0, a11, a12); }
  So3Vector B() const {
    return frame.from_coords(0.0, beta * std::cos(gamma), beta * std::sin(gamma));
  }
  Polynomial q() const { return Polynomial{c0, c1, c2}; }

  double rho() const {
    if (!(beta > 0.0)) throw Error(ErrorCode::DegenerateB, "rho needs beta > 0");
    return -2.0 * c2 / (d() * d() * beta);
  }
  /// delta^2 (4 c2^2 + d^4 beta^2), the constant acceleration of V1^.
  double c_hat() const {
    const double d2 = d() * d();
    return delta * delta * (4.0 * c2 * c2 + d2 * d2 * beta * beta);
  }
  /// delta (2 c2 F0 - d a12 F1 + d a11 F2), the first order estimate of C.
  So3Vector C_hat() const { return delta * frame.from_coords(2.0 * c2, -d() * a12, d() * a11); }
};

/// Value of f2 F0 + v2, split into its F0 coefficient and its F0-perp part.
struct SecondOrderTerm {
  double f2 = 0.0;
  So3Vector v2 = So3Vector::Zero();
};

/// Precomputed evaluator for V1^, V2^ and the second order variation.
class Approximant {
 public:
  explicit Approximant(ApproxParams p)
      : p_(std::move(p)),
        endo_(endomorphisms(p_.frame)),
        iq_(p_.q().integral()),
        k_(EndoCurve::poly_times_e(iq_).integral(p_.d()).integral(p_.d())),
        A0_(p_.A0()),
        A1_(p_.A1()),
        B_(p_.B()) {}

  const ApproxParams& params() const { return p_; }

  /// j-th derivative of the first order approximant, j = 0..3.
  So3Vector V1(double t, int j) const {
    check_order(j);
    const Frame& f = p_.frame;
    const double tau = t - p_.t0;
    const Polynomial q = p_.q();
    Polynomial qj = q;
    for (int k = 0; k < j; ++k) qj = qj.derivative();
    So3Vector pert = qj(tau) * f.F0 + e_derivative(j, t) * B_;
    if (j == 0) pert += A0_ + tau * A1_;
    if (j == 1) pert += A1_;
    So3Vector out = p_.delta * pert;
    if (j == 0) out += p_.D();
    return out;
  }

  /// j-th derivative of (f2, v2). Orders 0 and 1 use the endomorphism
  /// representation; orders 2 and 3 use the explicit elementary forms.
  SecondOrderTerm second_order(double t, int j) const {
    check_order(j);
    if (j == 2) return second_order_d2(t);
    if (j == 3) return second_order_d3(t);
    return second_order_series(t, j);
  }

  /// Same quantity by differentiating the endomorphism representation for any j.
  SecondOrderTerm second_order_series(double t, int j) const {
    const Frame& f = p_.frame;
    const double d = p_.d();
    auto diff = [d, j](EndoCurve m) {
      for (int k = 0; k < j; ++k) m = m.derivative(d);
      return m;
    };
    const double t0 = p_.t0;
    SecondOrderTerm out;
    const So3Vector l0b = diff(endo_.L0).apply(f, t, t0, B_);
    const So3Vector l1b = diff(endo_.L1).apply(f, t, t0, B_);
    out.f2 = -2.0 * (bracket(A0_, l0b) + bracket(A1_, l1b)).dot(f.F0);
    const double q2 = 2.0 * p_.c2;
    out.v2 = 2.0 * q2 *
                 (diff(endo_.M0).apply(f, t, t0, A0_) + diff(endo_.M1).apply(f, t, t0, A1_) -
                  diff(endo_.MB).apply(f, t, t0, B_)) +
             2.0 * d * d * bracket(f.F0, diff(k_).apply(f, t, t0, B_));
    return out;
  }

  /// j-th derivative of the second order approximant, j = 0..3.
  So3Vector V2(double t, int j) const {
    const SecondOrderTerm s = second_order(t, j);
    return V1(t, j) + 0.5 * p_.delta * p_.delta * (s.f2 * p_.frame.F0 + s.v2);
  }

 private:
  static void check_order(int j) {
    if (j < 0 || j > 3) throw Error(ErrorCode::InvalidArgument, "derivative order must be 0..3");
  }

  // (d^j/dt^j e~)(t) = (-d i~)^j e~(t), applied on F0-perp.
  Matrix3 e_derivative(int j, double t) const {
    const Frame& f = p_.frame;
    Matrix3 m = tilde_e(f, t, p_.t0);
    const Matrix3 step = -p_.d() * f.i_tilde();
    for (int k = 0; k < j; ++k) m = step * m;
    return m;
  }

  SecondOrderTerm second_order_d2(double t) const {
    const Frame& f = p_.frame;
    const double d = p_.d();
    const double c2 = p_.c2;
    const double tau = t - p_.t0;
    const Matrix3 e = tilde_e(f, t, p_.t0);
    const Matrix3 one = Matrix3::Identity();
    const Matrix3 i = f.i_tilde();
    SecondOrderTerm out;
    const So3Vector f_vec = 2.0 * d * bracket(A0_, i * (e - one) * B_) +
                            bracket(A1_, 2.0 * ((e - one) + d * tau * i * e) * B_);
    out.f2 = f_vec.dot(f.F0);
    out.v2 = -(4.0 * c2 / d) * (e - one) * A0_ +
             (4.0 * c2 / (d * d)) * (d * tau * one - i * (e - one)) * A1_ +
             2.0 * (2.0 * c2 * tau + d * d * iq_(tau)) * (i * e * B_);
    return out;
  }

  SecondOrderTerm second_order_d3(double t) const {
    const Frame& f = p_.frame;
    const double d = p_.d();
    const double c2 = p_.c2;
    const double tau = t - p_.t0;
    const Matrix3 e = tilde_e(f, t, p_.t0);
    const Matrix3 i = f.i_tilde();
    const So3Vector eB = e * B_;
    SecondOrderTerm out;
    out.f2 = 2.0 * d * d * bracket(A0_ + tau * A1_, eB).dot(f.F0);
    out.v2 = 4.0 * c2 * (i * e * A0_) + (4.0 * c2 / d) * (A1_ - e * A1_) +
             2.0 * (2.0 * c2 + d * d * p_.q()(tau)) * (i * eB) +
             2.0 * d * (2.0 * c2 * tau + d * d * iq_(tau)) * eB;
    return out;
  }

  ApproxParams p_;
  EndomorphismSet endo_;
  Polynomial iq_;  // I(q)
  EndoCurve k_;    // I^2(I(q) e~)
  So3Vector A0_, A1_, B_;
};

inline So3Vector eval_V1(const ApproxParams& p, double t, int j = 0) { return Approximant(p).V1(t, j); }
inline So3Vector eval_V2(const ApproxParams& p, double t, int j = 0) { return Approximant(p).V2(t, j); }
inline SecondOrderTerm eval_f2_v2(const ApproxParams& p, double t) {
  return Approximant(p).second_order(t, 0);
}

/// Chooses q, A0, A1, B so that V1^ and its first two derivatives match
/// (V0, V1, V2) at t0. F0 components give c0, c1, 2 c2; the F0-perp parts give
/// -d^2 B, then A1 + (-d i~ B), then A0 + B.
inline ApproxParams fit_params(const So3Vector& D, double delta, const So3Vector& V0,
                               const So3Vector& V1, const So3Vector& V2, double t0) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorCode::InvalidArgument, "fit_params needs delta > 0");
  }
  ApproxParams p;
  p.delta = delta;
  p.t0 = t0;
  p.frame = frame_from_D(D);
  const Frame& f = p.frame;
  const double d = f.d;
  const So3Vector P0 = (V0 - D) / delta;
  const So3Vector P1 = V1 / delta;
  const So3Vector P2 = V2 / delta;
  if (!(P0.allFinite() && P1.allFinite() && P2.allFinite())) {
    throw Error(ErrorCode::InvalidArgument, "perturbations must be finite");
  }
  p.c0 = f.F0.dot(P0);
  p.c1 = f.F0.dot(P1);
  p.c2 = 0.5 * f.F0.dot(P2);

  const So3Vector B = -f.perp(P2) / (d * d);
  const double b1 = f.F1.dot(B);
  const double b2 = f.F2.dot(B);
  if (f.perp(P2).norm() <= 1e-12) {
    p.beta = 0.0;
    p.gamma = 0.0;
    p.degenerate_b = true;
  } else {
    p.beta = std::hypot(b1, b2);
    double g = std::atan2(b2, b1);
    if (g < 0.0) g += 2.0 * kPi;
    if (g >= 2.0 * kPi) g -= 2.0 * kPi;
    p.gamma = g;
  }
  const So3Vector Bfit = p.B();
  const So3Vector A1 = f.perp(P1) + d * bracket(f.F0, Bfit);
  const So3Vector A0 = f.perp(P0) - Bfit;
  p.a01 = f.F1.dot(A0);
  p.a02 = f.F2.dot(A0);
  p.a11 = f.F1.dot(A1);
  p.a12 = f.F2.dot(A1);
  return p;
}

/// Degree-2 Taylor polynomial of V about t0.
inline So3Vector taylor2_baseline(const QuadraticIVP& ivp, double t) {
  const double tau = t - ivp.t0;
  return ivp.V0 + tau * ivp.V1 + 0.5 * tau * tau * ivp.V2;
}

}  // namespace so3cubic
