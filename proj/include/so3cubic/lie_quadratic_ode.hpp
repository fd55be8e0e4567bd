#pragma once

// Lie quadratics V'' = [V', V] + C, equivalently V''' = [V'', V], and the
// reconstruction of the cubic x from x' = x ad(V) by direct integration.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "so3cubic/errors.hpp"
#include "so3cubic/so3_algebra.hpp"

namespace so3cubic {

inline constexpr double kNullThreshold = 1e-12;

struct QuadraticIVP {
  double t0 = 0.0;
  double t1 = 1.0;
  So3Vector V0 = So3Vector::Zero();
  So3Vector V1 = So3Vector::Zero();
  So3Vector V2 = So3Vector::Zero();
};

/// C = V'' - [V', V]. Constant along a Lie quadratic.
inline So3Vector compute_C(const So3Vector& V, const So3Vector& V1, const So3Vector& V2) {
  return V2 - bracket(V1, V);
}

inline bool is_null(const So3Vector& C) { return C.norm() <= kNullThreshold; }

/// Uniform grid with n steps of size (t1 - t0)/n <= step.
struct UniformGrid {
  double t0 = 0.0;
  double h = 0.0;
  std::size_t steps = 0;

  double time(std::size_t i) const { return i == steps ? t1() : t0 + static_cast<double>(i) * h; }
  double t1() const { return t0 + static_cast<double>(steps) * h; }
};

inline UniformGrid make_grid(double t0, double t1, double step) {
  if (!(std::isfinite(t0) && std::isfinite(t1) && t0 < t1)) {
    throw Error(ErrorCode::InvalidArgument, "interval must satisfy t0 < t1");
  }
  if (!(step > 0.0) || step > (t1 - t0) * (1.0 + 1e-12)) {
    throw Error(ErrorCode::InvalidArgument, "step must lie in (0, t1 - t0]");
  }
  const double ratio = (t1 - t0) / step;
  auto n = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
  if (n == 0) n = 1;
  return {t0, (t1 - t0) / static_cast<double>(n), n};
}

namespace detail {

inline So3Vector hermite(const So3Vector& y0, const So3Vector& m0, const So3Vector& y1,
                         const So3Vector& m1, double h, double s) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
}

}  // namespace detail

/// Samples of (V, V', V'') on a uniform grid with cubic Hermite interpolation
/// between nodes. Third derivatives come from the equation itself.
class QuadraticTrajectory {
 public:
  struct Sample {
    So3Vector V;
    So3Vector V1;
    So3Vector V2;
  };

  QuadraticTrajectory(UniformGrid grid, std::vector<Sample> samples)
      : grid_(grid), samples_(std::move(samples)) {
    const Sample& s = samples_.front();
    C_ = compute_C(s.V, s.V1, s.V2);
    c_ = s.V2.squaredNorm();
  }

  const UniformGrid& grid() const { return grid_; }
  std::size_t size() const { return samples_.size(); }
  double time(std::size_t i) const { return grid_.time(i); }
  const Sample& sample(std::size_t i) const { return samples_[i]; }
  const std::vector<Sample>& samples() const { return samples_; }
  double t0() const { return grid_.t0; }
  double t1() const { return grid_.t1(); }

  /// C and c recorded at the initial point.
  const So3Vector& C() const { return C_; }
  double c() const { return c_; }

  /// j-th derivative (0..3) of V at t in [t0, t1].
  So3Vector operator()(double t, int j) const {
    if (j == 3) return bracket((*this)(t, 2), (*this)(t, 0));
    const auto [i, s] = locate(t);
    const Sample& a = samples_[i];
    const Sample& b = samples_[i + 1];
    switch (j) {
      case 0: return detail::hermite(a.V, a.V1, b.V, b.V1, grid_.h, s);
      case 1: return detail::hermite(a.V1, a.V2, b.V1, b.V2, grid_.h, s);
      case 2:
        return detail::hermite(a.V2, bracket(a.V2, a.V), b.V2, bracket(b.V2, b.V), grid_.h, s);
      default: throw Error(ErrorCode::InvalidArgument, "derivative order must be 0..3");
    }
  }

  So3Vector third_derivative_at(std::size_t i) const {
    return bracket(samples_[i].V2, samples_[i].V);
  }

 private:
  std::pair<std::size_t, double> locate(double t) const {
    const double x = (t - grid_.t0) / grid_.h;
    if (!(x >= -1e-9 && x <= static_cast<double>(grid_.steps) + 1e-9)) {
      throw Error(ErrorCode::InvalidArgument, "time outside trajectory interval");
    }
    auto i = static_cast<std::size_t>(std::max(0.0, std::floor(x)));
    if (i >= grid_.steps) i = grid_.steps - 1;
    return {i, std::clamp(x - static_cast<double>(i), 0.0, 1.0)};
  }

  UniformGrid grid_;
  std::vector<Sample> samples_;
  So3Vector C_;
  double c_ = 0.0;
};

/// Classic RK4 on the first-order system (V, V', V'') with V''' = [V'', V].
inline QuadraticTrajectory integrate_quadratic(const QuadraticIVP& ivp, double step) {
  for (const So3Vector* v : {&ivp.V0, &ivp.V1, &ivp.V2}) {
    if (!v->allFinite()) throw Error(ErrorCode::InvalidArgument, "initial data must be finite");
  }
  const UniformGrid grid = make_grid(ivp.t0, ivp.t1, step);
  using Sample = QuadraticTrajectory::Sample;
  auto rhs = [](const Sample& s) { return Sample{s.V1, s.V2, bracket(s.V2, s.V)}; };
  auto axpy = [](const Sample& s, double a, const Sample& k) {
    return Sample{s.V + a * k.V, s.V1 + a * k.V1, s.V2 + a * k.V2};
  };

  std::vector<Sample> out;
  out.reserve(grid.steps + 1);
  out.push_back({ivp.V0, ivp.V1, ivp.V2});
  const double c0 = ivp.V2.squaredNorm();
  const double h = grid.h;
  for (std::size_t i = 0; i < grid.steps; ++i) {
    const Sample& y = out.back();
    const Sample k1 = rhs(y);
    const Sample k2 = rhs(axpy(y, 0.5 * h, k1));
    const Sample k3 = rhs(axpy(y, 0.5 * h, k2));
    const Sample k4 = rhs(axpy(y, h, k3));
    Sample next{y.V + (h / 6.0) * (k1.V + 2.0 * k2.V + 2.0 * k3.V + k4.V),
                y.V1 + (h / 6.0) * (k1.V1 + 2.0 * k2.V1 + 2.0 * k3.V1 + k4.V1),
                y.V2 + (h / 6.0) * (k1.V2 + 2.0 * k2.V2 + 2.0 * k3.V2 + k4.V2)};
    if (!(std::abs(next.V2.squaredNorm() - c0) <= 1e-6)) {
      throw Error(ErrorCode::StepTooLarge,
                  "conservation of |V''|^2 drifted by more than 1e-6; reduce the step");
    }
    out.push_back(next);
  }
  return QuadraticTrajectory(grid, std::move(out));
}

/// Largest drift of C and c along a trajectory.
struct ConservationDrift {
  double C = 0.0;
  double c = 0.0;
};

inline ConservationDrift conservation_drift(const QuadraticTrajectory& traj) {
  ConservationDrift drift;
  for (const auto& s : traj.samples()) {
    drift.C = std::max(drift.C, (compute_C(s.V, s.V1, s.V2) - traj.C()).norm());
    drift.c = std::max(drift.c, std::abs(s.V2.squaredNorm() - traj.c()));
  }
  return drift;
}

/// Sup norms of V' and V''. Used as the operational "nearly geodesic" gauge.
struct GeodesicGauge {
  double velocity_change = 0.0;
  double acceleration = 0.0;
};

inline GeodesicGauge geodesic_gauge(const QuadraticTrajectory& traj) {
  GeodesicGauge g;
  for (const auto& s : traj.samples()) {
    g.velocity_change = std::max(g.velocity_change, s.V1.norm());
    g.acceleration = std::max(g.acceleration, s.V2.norm());
  }
  return g;
}

struct RotationTrajectory {
  std::vector<double> times;
  std::vector<Rotation> samples;

  std::size_t size() const { return times.size(); }
};

struct CubicOptions {
  std::size_t renormalize_every = 16;
};

/// RK4 on x' = x ad(V(t)) over the given grid, starting from x0. The body
/// velocity is any callable V(t) -> So3Vector defined on the grid interval.
template <typename VelocityFn>
  requires std::invocable<const VelocityFn&, double>
RotationTrajectory integrate_cubic(const Rotation& x0, const VelocityFn& V, const UniformGrid& grid,
                                   CubicOptions opts = {}) {
  if (opts.renormalize_every == 0) opts.renormalize_every = 1;
  RotationTrajectory out;
  out.times.reserve(grid.steps + 1);
  out.samples.reserve(grid.steps + 1);
  out.times.push_back(grid.t0);
  out.samples.push_back(x0);
  const double h = grid.h;
  Matrix3 x = x0;
  for (std::size_t i = 0; i < grid.steps; ++i) {
    const double t = grid.time(i);
    const Matrix3 a1 = ad_matrix(V(t));
    const Matrix3 amid = ad_matrix(V(t + 0.5 * h));
    const Matrix3 a4 = ad_matrix(V(grid.time(i + 1)));
    const Matrix3 k1 = x * a1;
    const Matrix3 k2 = (x + 0.5 * h * k1) * amid;
    const Matrix3 k3 = (x + 0.5 * h * k2) * amid;
    const Matrix3 k4 = (x + h * k3) * a4;
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if ((i + 1) % opts.renormalize_every == 0 || i + 1 == grid.steps) x = renormalize(x);
    out.times.push_back(grid.time(i + 1));
    out.samples.push_back(x);
  }
  return out;
}

template <typename VelocityFn>
  requires std::invocable<const VelocityFn&, double>
RotationTrajectory integrate_cubic(const Rotation& x0, const VelocityFn& V, double t0, double t1,
                                   double step, CubicOptions opts = {}) {
  return integrate_cubic(x0, V, make_grid(t0, t1, step), opts);
}

/// Integrates along a sampled Lie quadratic on its own grid.
inline RotationTrajectory integrate_cubic(const Rotation& x0, const QuadraticTrajectory& traj,
                                          CubicOptions opts = {}) {
  return integrate_cubic(x0, [&traj](double t) { return traj(t, 0); }, traj.grid(), opts);
}

/// Left Lie reduction of t -> exp(tA) exp(tB), namely Ad(exp(-tB)) A + B.
inline So3Vector product_curve_V(const So3Vector& A, const So3Vector& B, double t) {
  return rot_exp(-t * B) * A + B;
}

/// j-th t-derivative of product_curve_V: (-ad B)^j exp(-t ad B) A for j >= 1.
inline So3Vector product_curve_V_derivative(const So3Vector& A, const So3Vector& B, double t, int j) {
  if (j == 0) return product_curve_V(A, B, t);
  So3Vector v = rot_exp(-t * B) * A;
  for (int k = 0; k < j; ++k) v = -bracket(B, v);
  return v;
}

/// sup over the grid of |V''' - [V'', V]| for a curve with known derivatives,
/// given as a callable V(t, j) for j = 0..3.
template <typename Curve>
  requires std::invocable<const Curve&, double, int>
double quadratic_residual(const Curve& V, const std::vector<double>& grid) {
  double worst = 0.0;
  for (double t : grid) {
    const So3Vector r = So3Vector(V(t, 3)) - bracket(V(t, 2), V(t, 0));
    worst = std::max(worst, r.norm());
  }
  return worst;
}

/// Residual of uniformly spaced samples of V using 4th-order central
/// differences for V'' and V'''. The three points at each end are skipped.
inline double quadratic_residual_sampled(const std::vector<So3Vector>& V, double h) {
  if (V.size() < 7) throw Error(ErrorCode::InvalidArgument, "need at least 7 samples");
  double worst = 0.0;
  for (std::size_t i = 3; i + 3 < V.size(); ++i) {
    const So3Vector d2 =
        (-V[i + 2] + 16.0 * V[i + 1] - 30.0 * V[i] + 16.0 * V[i - 1] - V[i - 2]) / (12.0 * h * h);
    const So3Vector d3 = (-V[i + 3] + 8.0 * V[i + 2] - 13.0 * V[i + 1] + 13.0 * V[i - 1] -
                          8.0 * V[i - 2] + V[i - 3]) /
                         (8.0 * h * h * h);
    worst = std::max(worst, (d3 - bracket(d2, V[i])).norm());
  }
  return worst;
}

}  // namespace so3cubic
