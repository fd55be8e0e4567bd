// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "so3cubic/harness.hpp"
#include "so3cubic/so3cubic.hpp"

namespace {

using namespace so3cubic;
namespace h = so3cubic::harness;
namespace oracle = so3cubic::testing;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Largest orthogonality or determinant defect over every rotation seen.
double g_rotation_defect = 0.0;
std::size_t g_rotations_checked = 0;

void track(const Matrix3& r) {
  const double orth = (r.transpose() * r - Matrix3::Identity()).cwiseAbs().maxCoeff();
  const double det = std::abs(r.determinant() - 1.0);
  g_rotation_defect = std::max({g_rotation_defect, orth, det});
  ++g_rotations_checked;
}

void track(const RotationTrajectory& x) {
  for (const Rotation& r : x.samples) track(r);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double max_abs_diff(const Matrix3& a, const Matrix3& b) { return (a - b).cwiseAbs().maxCoeff(); }

Outcome conservation() {
  const QuadraticTrajectory tr = integrate_quadratic(oracle::quad_example_ivp(25.0), 1e-3);
  const ConservationDrift drift = conservation_drift(tr);
  const double c0_err = (compute_C(oracle::kQuadV0, oracle::kQuadV1, oracle::kQuadV2) - oracle::kQuadC)
                            .cwiseAbs()
                            .maxCoeff();
  return {drift.C <= 1e-8 && drift.c <= 1e-8 && c0_err <= 1e-7,
          fmt("drift |C| %.2e, |c| %.2e; C(0) error %.2e", drift.C, drift.c, c0_err)};
}

Outcome reconstruction_equivalence() {
  std::mt19937_64 rng(20240501);
  std::uniform_real_distribution<double> mag(0.5, 1.5);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const So3Vector D = mag(rng) * oracle::random_unit(rng);
    const double delta = 0.05;
    const QuadraticIVP ivp{0.0, 5.0, D + delta * oracle::random_unit(rng), delta * oracle::random_unit(rng),
                           delta * oracle::random_unit(rng)};
    const QuadraticTrajectory tr = integrate_quadratic(ivp, 1e-3);
    const Rotation x0 = oracle::random_rotation(rng);
    const RotationTrajectory a = reconstruct_cubic({tr, x0});
    const RotationTrajectory b = integrate_cubic(x0, tr);
    track(a);
    track(b);
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, (a.samples[i] - b.samples[i]).norm());
  }
  return {worst <= 1e-6, fmt("max Frobenius distance %.2e over 10 random IVPs", worst)};
}

Outcome order_tests() {
  h::ExperimentConfig c = h::default_config(h::Kind::Converge);
  c.t0 = 0.0;
  c.t1 = 5.0;
  c.deltas = {0.04, 0.02};
  const h::ErrorReport r = h::converge(c);
  std::string detail;
  bool pass = !r.ratios.empty();
  for (const auto& q : r.ratios) {
    if (!detail.empty()) detail += "; ";
    detail += q.quantity + fmt(" %.3f in [%g, %g]", q.ratio, q.band_lo, q.band_hi);
    pass = pass && q.pass;
  }
  return {pass, detail};
}

Outcome parameter_regression() {
  const ApproxParams p = oracle::cubic_example_params(0.05);
  const double expected[] = {0.0, 0.0, 0.125, std::sqrt(2.0) / 4.0, 1.25 * kPi, 1.25, 0.25, 0.25, 0.25};
  const double actual[] = {p.c0, p.c1, p.c2, p.beta, p.gamma, p.a01, p.a02, p.a11, p.a12};
  double worst = 0.0;
  for (std::size_t i = 0; i < std::size(expected); ++i) worst = std::max(worst, std::abs(actual[i] - expected[i]));
  return {worst <= 1e-12, fmt("max parameter error %.2e", worst)};
}

Outcome qualitative_regressions() {
  const h::QuadraticComparison short_run = h::compare_quadratic(h::default_config(h::Kind::Figure1));
  const double taylor = short_run.report.find("taylor2").max, v1_short = short_run.report.find("V1hat").max;

  const h::QuadraticComparison long_run = h::compare_quadratic(h::default_config(h::Kind::Figure2));
  const double v1 = long_run.report.find("V1hat").max, v2 = long_run.report.find("V2hat").max;

  const h::ExperimentConfig cc = h::default_config(h::Kind::Figure3);
  const h::CubicComparison cubic = h::compare_cubic(cc);
  track(cubic.x);
  for (const auto& x : cubic.x_samples) track(x);
  for (const auto& x : cubic.xhat_samples) track(x);
  auto angle_at = [&](double t) {
    return cubic.distance[static_cast<std::size_t>(std::lround((t - cc.t0) / cc.stride))].angle;
  };
  const double a2 = angle_at(2.0), a6 = angle_at(6.0);

  const bool a = taylor > v1_short, b = v2 < v1, c = a2 < a6;
  return {a && b && c, fmt("(a) Taylor2 %.3e > V1hat %.3e; ", taylor, v1_short) +
                           fmt("(b) V2hat %.3e < V1hat %.3e; ", v2, v1) +
                           fmt("(c) angle(2) %.3e < angle(6) %.3e", a2, a6)};
}

Outcome product_curves() {
  std::vector<double> grid(101);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<double>(i) / 100.0;
  auto residual = [&](const So3Vector& A, const So3Vector& B) {
    return quadratic_residual([&](double t, int j) { return product_curve_V_derivative(A, B, t, j); }, grid);
  };
  double orth = residual(So3Vector(1.0, 0.0, 0.0), So3Vector(0.0, 2.0, 0.0));
  std::mt19937_64 rng(6);
  for (int k = 0; k < 5; ++k) {
    const So3Vector A = oracle::random_vector(rng, 2.0);
    const So3Vector B = A.cross(oracle::random_vector(rng));
    orth = std::max(orth, residual(A, B));
    for (double t : {0.0, 0.5, 1.0}) track(Matrix3(rot_exp(t * A) * rot_exp(t * B)));
  }
  const double skew = residual(So3Vector(1.0, 0.0, 0.0), So3Vector(1.0, 1.0, 0.0));
  return {orth <= 1e-6 && skew >= 0.1, fmt("orthogonal residual %.2e, non-orthogonal %.3f", orth, skew)};
}

Outcome closed_forms() {
  double worst_f2v2 = 0.0;
  for (const ApproxParams& p : {oracle::quad_example_params(), oracle::cubic_example_params(0.05)}) {
    const oracle::BruteForceSecondOrder brute(p, 1e-3);
    for (int k = 1; k <= 20; ++k) {
      const double t = 0.25 * k;
      const SecondOrderTerm a = eval_f2_v2(p, t), b = brute.at(t);
      worst_f2v2 = std::max({worst_f2v2, std::abs(a.f2 - b.f2), (a.v2 - b.v2).cwiseAbs().maxCoeff()});
    }
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst_poly = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Frame f = frame_from_D(oracle::random_vector(rng, 2.0));
    const Polynomial p{u(rng), u(rng), u(rng), u(rng)};
    const double t0 = u(rng), t = t0 + 3.0 * (u(rng) + 1.0);
    const Matrix3 numeric =
        oracle::quadrature_of_map([&](double s) { return Matrix3(p(s - t0) * tilde_e(f, s, t0)); }, t0, t, 1e-13);
    worst_poly = std::max(worst_poly, max_abs_diff(integral_poly_e(f, p, t, t0), numeric));
    track(Matrix3(tilde_e(f, t, t0)));
  }
  return {worst_f2v2 <= 1e-8 && worst_poly <= 1e-10,
          fmt("f2/v2 vs brute force %.2e at 20 times; integral_poly_e vs quadrature %.2e", worst_f2v2,
              worst_poly)};
}

Outcome rotation_invariants() {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 100; ++k) track(oracle::random_rotation(rng));
  const ApproxParams p = oracle::cubic_example_params(0.05);
  const XHat xh(p, oracle::random_rotation(rng));
  for (int k = 0; k <= 100; ++k) track(xh(0.1 * k));
  const QuadraticTrajectory tr = integrate_quadratic(oracle::quad_example_ivp(25.0), 1e-3);
  track(integrate_cubic(Rotation::Identity(), tr));
  track(reconstruct_cubic({tr, Rotation::Identity()}));
  return {g_rotation_defect <= 1e-10,
          fmt("worst defect %.2e over %.0f rotations", g_rotation_defect, static_cast<double>(g_rotations_checked))};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // 0 means no limit
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "conservation of C and c on [0,25]", 5.0, conservation},
      {2, "quadrature reconstruction equals direct integration", 30.0, reconstruction_equivalence},
      {3, "convergence orders of V1hat, V2hat, xhat, phi", 60.0, order_tests},
      {4, "fitted parameters of the cubic example", 1.0, parameter_regression},
      {5, "qualitative comparisons", 0.0, qualitative_regressions},
      {6, "product curves are quadratics iff orthogonal", 0.0, product_curves},
      {7, "closed forms against brute force", 0.0, closed_forms},
      {8, "rotation invariants", 0.0, rotation_invariants},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_seconds == 0.0 || seconds < c.limit_seconds;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s criterion %d: %s [%.3f s%s] %s\n", pass ? "PASS" : "FAIL", c.id, c.name, seconds,
                c.limit_seconds > 0.0 ? fmt(", limit %g s", c.limit_seconds).c_str() : "", o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
