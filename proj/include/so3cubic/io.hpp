#pragma once

// CSV and JSON forms of trajectories and approximant parameters. Every JSON
// document carries a versioned "schema" field. Numbers in CSV are printed
// with 17 significant digits so files round-trip and are byte-stable.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "so3cubic/approximants.hpp"
#include "so3cubic/errors.hpp"
#include "so3cubic/lie_quadratic_ode.hpp"
#include "so3cubic/so3_algebra.hpp"

namespace so3cubic {

inline constexpr const char* kTrajectorySchema = "so3cubic.quadratic-trajectory/1";
inline constexpr const char* kRotationSchema = "so3cubic.rotation-trajectory/1";
inline constexpr const char* kParamsSchema = "so3cubic.approx-params/1";

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Writes one CSV row of numbers.
inline void write_csv_row(std::ostream& os, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << ',';
    os << format_number(values[i]);
  }
  os << '\n';
}

inline void write_csv_header(std::ostream& os, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) os << ',';
    os << names[i];
  }
  os << '\n';
}

inline nlohmann::json to_json(const So3Vector& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

inline So3Vector vector_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::InvalidArgument, "expected a JSON array of three numbers");
  }
  for (const auto& e : j) {
    if (!e.is_number()) throw Error(ErrorCode::InvalidArgument, "expected a JSON array of three numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

// ---------------------------------------------------------------------------
// Lie quadratic trajectories
// Columns: t, V_x, V_y, V_z, V1_x, V1_y, V1_z, V2_x, V2_y, V2_z

inline void write_trajectory_csv(std::ostream& os, const QuadraticTrajectory& traj) {
  write_csv_header(os, {"t", "V_x", "V_y", "V_z", "V1_x", "V1_y", "V1_z", "V2_x", "V2_y", "V2_z"});
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj.sample(i);
    write_csv_row(os, {traj.time(i), s.V.x(), s.V.y(), s.V.z(), s.V1.x(), s.V1.y(), s.V1.z(), s.V2.x(),
                       s.V2.y(), s.V2.z()});
  }
}

inline nlohmann::json trajectory_to_json(const QuadraticTrajectory& traj) {
  nlohmann::json samples = nlohmann::json::array();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj.sample(i);
    samples.push_back({{"t", traj.time(i)}, {"V", to_json(s.V)}, {"V1", to_json(s.V1)}, {"V2", to_json(s.V2)}});
  }
  return {{"schema", kTrajectorySchema},
          {"t0", traj.t0()},
          {"t1", traj.t1()},
          {"step", traj.grid().h},
          {"C", to_json(traj.C())},
          {"c", traj.c()},
          {"null", is_null(traj.C())},
          {"samples", std::move(samples)}};
}

// ---------------------------------------------------------------------------
// Rotation trajectories
// Columns: t, r11, r12, r13, r21, r22, r23, r31, r32, r33 (row-major)

inline void write_rotation_csv(std::ostream& os, const RotationTrajectory& traj) {
  write_csv_header(os, {"t", "r11", "r12", "r13", "r21", "r22", "r23", "r31", "r32", "r33"});
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Rotation& r = traj.samples[i];
    write_csv_row(os, {traj.times[i], r(0, 0), r(0, 1), r(0, 2), r(1, 0), r(1, 1), r(1, 2), r(2, 0),
                       r(2, 1), r(2, 2)});
  }
}

inline nlohmann::json rotation_to_json(const Rotation& r) {
  return nlohmann::json::array({nlohmann::json::array({r(0, 0), r(0, 1), r(0, 2)}),
                                nlohmann::json::array({r(1, 0), r(1, 1), r(1, 2)}),
                                nlohmann::json::array({r(2, 0), r(2, 1), r(2, 2)})});
}

inline nlohmann::json rotation_trajectory_to_json(const RotationTrajectory& traj) {
  nlohmann::json samples = nlohmann::json::array();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    samples.push_back({{"t", traj.times[i]}, {"R", rotation_to_json(traj.samples[i])}});
  }
  return {{"schema", kRotationSchema}, {"samples", std::move(samples)}};
}

/// Second rows of the sampled rotations, as plotted for cubic comparisons.
inline std::vector<So3Vector> second_rows(const RotationTrajectory& traj) {
  std::vector<So3Vector> rows;
  rows.reserve(traj.size());
  for (const Rotation& r : traj.samples) rows.emplace_back(r.row(1).transpose());
  return rows;
}

// ---------------------------------------------------------------------------
// Approximant parameters

inline nlohmann::json params_to_json(const ApproxParams& p) {
  nlohmann::json j = {{"schema", kParamsSchema},
                      {"delta", p.delta},
                      {"t0", p.t0},
                      {"d", p.frame.d},
                      {"F0", to_json(p.frame.F0)},
                      {"F1", to_json(p.frame.F1)},
                      {"F2", to_json(p.frame.F2)},
                      {"c0", p.c0},
                      {"c1", p.c1},
                      {"c2", p.c2},
                      {"a01", p.a01},
                      {"a02", p.a02},
                      {"a11", p.a11},
                      {"a12", p.a12},
                      {"beta", p.beta},
                      {"gamma", p.gamma},
                      {"degenerate_b", p.degenerate_b},
                      {"c_hat", p.c_hat()},
                      {"C_hat", to_json(p.C_hat())}};
  j["rho"] = p.beta > 0.0 ? nlohmann::json(p.rho()) : nlohmann::json(nullptr);
  return j;
}

/// Inverse of params_to_json; derived fields are ignored and the frame is
/// checked against its defining identities.
inline ApproxParams params_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema").get<std::string>() != kParamsSchema) {
      throw Error(ErrorCode::InvalidArgument, "unsupported params schema");
    }
    ApproxParams p;
    p.delta = j.at("delta").get<double>();
    p.t0 = j.at("t0").get<double>();
    p.frame.d = j.at("d").get<double>();
    p.frame.F0 = vector_from_json(j.at("F0"));
    p.frame.F1 = vector_from_json(j.at("F1"));
    p.frame.F2 = vector_from_json(j.at("F2"));
    p.c0 = j.at("c0").get<double>();
    p.c1 = j.at("c1").get<double>();
    p.c2 = j.at("c2").get<double>();
    p.a01 = j.at("a01").get<double>();
    p.a02 = j.at("a02").get<double>();
    p.a11 = j.at("a11").get<double>();
    p.a12 = j.at("a12").get<double>();
    p.beta = j.at("beta").get<double>();
    p.gamma = j.at("gamma").get<double>();
    p.degenerate_b = j.value("degenerate_b", p.beta == 0.0);
    if (!(p.frame.d > 0.0) || frame_defect(p.frame) > 1e-10) {
      throw Error(ErrorCode::InvalidArgument, "params frame is not a valid positively oriented frame");
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed params JSON: ") + e.what());
  }
}

}  // namespace so3cubic
