#pragma once

// Reconstruction of a cubic x from its Lie quadratic V by one quadrature:
//
//   x(t) = x(t0) y(t0)^T y(t),   y(t) = R_phi(t) S(V''(t), V'''(t)),
//   phi(t) = c^{1/2} int_{t0}^t (c - <C, V''(s)>) / |V'''(s)|^2 ds,
//
// and the elementary first order approximation x^ that replaces phi by phi^
// and V by the second order approximant.

#include <algorithm>
#include <cmath>
#include <vector>

#include "so3cubic/approximants.hpp"
#include "so3cubic/errors.hpp"
#include "so3cubic/lie_quadratic_ode.hpp"
#include "so3cubic/so3_algebra.hpp"

namespace so3cubic {

inline constexpr double kThirdDerivativeFloor = 1e-10;
inline constexpr double kAccelerationFloor = 1e-12;

struct ReconstructionInput {
  const QuadraticTrajectory& V;
  Rotation x0 = Rotation::Identity();
};

namespace detail {

inline void check_reconstruction_input(const ReconstructionInput& in) {
  if (!(in.V.c() > kAccelerationFloor)) {
    throw Error(ErrorCode::DegenerateThirdDerivative,
                "constant acceleration c must exceed 1e-12 for the quadrature reconstruction");
  }
  for (std::size_t i = 0; i < in.V.size(); ++i) {
    if (!(in.V.third_derivative_at(i).norm() > kThirdDerivativeFloor)) {
      throw Error(ErrorCode::DegenerateThirdDerivative, "V''' vanishes on the interval");
    }
  }
}

}  // namespace detail

/// Running integral phi on the trajectory grid. Each grid panel is integrated
/// by Simpson's rule with its midpoint taken from the dense interpolant.
class PhiIntegral {
 public:
  explicit PhiIntegral(const ReconstructionInput& in) : traj_(in.V), sqrt_c_(std::sqrt(in.V.c())) {
    detail::check_reconstruction_input(in);
    const std::size_t n = traj_.size();
    cumulative_.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      cumulative_[i + 1] = cumulative_[i] + panel(traj_.time(i), traj_.time(i + 1));
    }
  }

  double integrand(double s) const {
    const So3Vector v2 = traj_(s, 2);
    const So3Vector v3 = bracket(v2, traj_(s, 0));
    const double n2 = v3.squaredNorm();
    if (!(std::sqrt(n2) > kThirdDerivativeFloor)) {
      throw Error(ErrorCode::DegenerateThirdDerivative, "V''' vanishes inside the interval");
    }
    return (traj_.c() - traj_.C().dot(v2)) / n2;
  }

  /// phi at grid node i.
  double at_node(std::size_t i) const { return sqrt_c_ * cumulative_[i]; }

  double operator()(double t) const {
    const UniformGrid& g = traj_.grid();
    const double x = (t - g.t0) / g.h;
    if (!(x >= -1e-9 && x <= static_cast<double>(g.steps) + 1e-9)) {
      throw Error(ErrorCode::InvalidArgument, "time outside trajectory interval");
    }
    auto i = static_cast<std::size_t>(std::clamp(std::floor(x), 0.0, static_cast<double>(g.steps)));
    const double ti = traj_.time(i);
    if (t <= ti) return at_node(i);
    return sqrt_c_ * (cumulative_[i] + panel(ti, t));
  }

 private:
  double panel(double a, double b) const {
    return (b - a) / 6.0 * (integrand(a) + 4.0 * integrand(0.5 * (a + b)) + integrand(b));
  }

  const QuadraticTrajectory& traj_;
  double sqrt_c_;
  std::vector<double> cumulative_;
};

inline double phi_numeric(const ReconstructionInput& in, double t) { return PhiIntegral(in)(t); }

/// x(t) = x0 y(t0)^T y(t) on the trajectory grid.
inline RotationTrajectory reconstruct_cubic(const ReconstructionInput& in) {
  const PhiIntegral phi(in);
  const QuadraticTrajectory& V = in.V;
  auto y_at = [&](std::size_t i) {
    const auto& s = V.sample(i);
    return Rotation(rotation_R(phi.at_node(i)) * frame_S(s.V2, bracket(s.V2, s.V)));
  };
  const Matrix3 anchor = in.x0 * y_at(0).transpose();
  RotationTrajectory out;
  out.times.reserve(V.size());
  out.samples.reserve(V.size());
  for (std::size_t i = 0; i < V.size(); ++i) {
    out.times.push_back(V.time(i));
    // y(t0)^T y(t0) is the identity, so the first sample is x0 itself.
    out.samples.push_back(i == 0 ? in.x0 : Rotation(anchor * y_at(i)));
  }
  return out;
}

/// phi^(t) = delta (rho^2 + 1)^{1/2} (tau beta
///           + (a11 (cos(gamma - d tau) - cos gamma) + a12 (sin(gamma - d tau) - sin gamma)) / d^2)
inline double phi_hat(const ApproxParams& p, double t) {
  if (!(p.beta > 0.0)) throw Error(ErrorCode::DegenerateB, "phi_hat needs B != 0");
  const double d = p.d();
  const double tau = t - p.t0;
  const double rho = p.rho();
  const double osc = p.a11 * (std::cos(p.gamma - d * tau) - std::cos(p.gamma)) +
                     p.a12 * (std::sin(p.gamma - d * tau) - std::sin(p.gamma));
  return p.delta * std::sqrt(rho * rho + 1.0) * (tau * p.beta + osc / (d * d));
}

/// The same quantity written with c^ = delta^2 (4 c2^2 + d^4 beta^2):
/// c^{1/2} (tau / d^2 + osc / (d^4 beta)).
inline double phi_hat_from_c_hat(const ApproxParams& p, double t) {
  if (!(p.beta > 0.0)) throw Error(ErrorCode::DegenerateB, "phi_hat needs B != 0");
  const double d = p.d();
  const double d2 = d * d;
  const double tau = t - p.t0;
  const double osc = p.a11 * (std::cos(p.gamma - d * tau) - std::cos(p.gamma)) +
                     p.a12 * (std::sin(p.gamma - d * tau) - std::sin(p.gamma));
  return std::sqrt(p.c_hat()) * (tau / d2 + osc / (d2 * d2 * p.beta));
}

/// The frame vectors X1 = V2^''/delta and X2 = V2^'''/delta with T(V2^'') = S(X1, X2).
struct FrameVectors {
  So3Vector X1;
  So3Vector X2;
};

/// Evaluates x^ at many times while sharing the approximant and y^(t0).
class XHat {
 public:
  XHat(const ApproxParams& p, const Rotation& x0) : approx_(p), x0_(x0) {
    if (!(p.beta > 0.0)) throw Error(ErrorCode::DegenerateB, "x_hat needs B != 0");
    anchor_ = x0_ * y_hat(p.t0).transpose();
  }

  FrameVectors frame_vectors(double t) const {
    const double delta = approx_.params().delta;
    return {approx_.V2(t, 2) / delta, approx_.V2(t, 3) / delta};
  }

  Rotation y_hat(double t) const {
    const FrameVectors x = frame_vectors(t);
    return rotation_R(phi_hat(approx_.params(), t)) * frame_S(x.X1, x.X2);
  }

  Rotation operator()(double t) const {
    if (t == approx_.params().t0) return x0_;
    return anchor_ * y_hat(t);
  }

 private:
  Approximant approx_;
  Rotation x0_;
  Matrix3 anchor_;
};

inline Rotation x_hat(const ApproxParams& p, const Rotation& x0, double t) { return XHat(p, x0)(t); }

struct So3Distance {
  double frobenius = 0.0;
  double angle = 0.0;
};

/// Frobenius distance and geodesic angle between two rotations.
inline So3Distance so3_distance(const Rotation& R1, const Rotation& R2) {
  const Matrix3 m = R1.transpose() * R2;
  const double cos_angle = std::clamp(0.5 * (m.trace() - 1.0), -1.0, 1.0);
  const So3Vector axis(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  const double sin_angle = std::min(1.0, 0.5 * axis.norm());
  return {(R1 - R2).norm(), std::atan2(sin_angle, cos_angle)};
}

}  // namespace so3cubic
