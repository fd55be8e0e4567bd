#pragma once

// Experiment runner behind the so3cubic CLI. Each run integrates a reference
// Lie quadratic (and cubic, where relevant), evaluates the approximants, and
// emits CSV / JSON / SVG artifacts into an output directory.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "so3cubic/approximants.hpp"
#include "so3cubic/cubic_reconstruction.hpp"
#include "so3cubic/errors.hpp"
#include "so3cubic/io.hpp"
#include "so3cubic/lie_quadratic_ode.hpp"
#include "so3cubic/svg.hpp"

namespace so3cubic::harness {

inline constexpr const char* kConfigSchema = "so3cubic.config/1";
inline constexpr const char* kReportSchema = "so3cubic.report/1";

/// Invalid experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { QuadraticCompare, CubicCompare, Converge, Figure1, Figure2, Figure3 };

inline std::string kind_name(Kind k) {
  switch (k) {
    case Kind::QuadraticCompare: return "quadratic-compare";
    case Kind::CubicCompare: return "cubic-compare";
    case Kind::Converge: return "converge";
    case Kind::Figure1: return "figure1";
    case Kind::Figure2: return "figure2";
    case Kind::Figure3: return "figure3";
  }
  return "?";
}

inline Kind parse_kind(const std::string& s) {
  if (s == "quadratic-compare" || s == "quadratic") return Kind::QuadraticCompare;
  if (s == "cubic-compare" || s == "cubic") return Kind::CubicCompare;
  if (s == "converge") return Kind::Converge;
  if (s == "figure1") return Kind::Figure1;
  if (s == "figure2") return Kind::Figure2;
  if (s == "figure3") return Kind::Figure3;
  throw ConfigError("unknown experiment kind '" + s + "'");
}

inline bool is_cubic_kind(Kind k) {
  return k == Kind::CubicCompare || k == Kind::Figure3 || k == Kind::Converge;
}

/// Initial conditions either as absolute values (V0, V1, V2) or as unit
/// perturbation directions scaled by delta: V0 = D + delta P0, V1 = delta P1,
/// V2 = delta P2.
struct InitialConditions {
  bool perturbation = false;
  So3Vector first = So3Vector::Zero();
  So3Vector second = So3Vector::Zero();
  So3Vector third = So3Vector::Zero();

  QuadraticIVP ivp(const So3Vector& D, double delta, double t0, double t1) const {
    if (perturbation) return {t0, t1, D + delta * first, delta * second, delta * third};
    return {t0, t1, first, second, third};
  }
};

/// Worked quadratic example near (1,0,0), used by figure1 and figure2.
inline InitialConditions example_quadratic_ic() {
  return {false, So3Vector(1.005, 0.006, -0.01), So3Vector(-0.005, -0.00449, 0.0),
          So3Vector(0.001, -0.005, 0.005)};
}

/// Perturbation directions of the worked cubic example, used by figure3.
inline InitialConditions example_cubic_ic() {
  return {true, So3Vector(0.0, 1.0, 0.0), So3Vector(0.0, 0.0, 0.5), So3Vector(0.25, 0.25, 0.25)};
}

struct ExperimentConfig {
  Kind kind = Kind::Figure1;
  double t0 = 0.0;
  double t1 = 5.0;
  double step = 1e-3;
  std::vector<double> deltas{0.01};
  So3Vector D = So3Vector::UnitX();
  InitialConditions ic = example_quadratic_ic();
  double stride = 0.01;
  std::filesystem::path output_dir = "out";
  std::set<std::string> formats{"csv", "json", "svg"};
  Projection projection;
  double error_budget = 1e-3;
  std::size_t renormalize_every = 16;
  std::vector<double> marker_times;

  double delta() const { return deltas.front(); }
};

inline ExperimentConfig default_config(Kind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case Kind::Figure1:
    case Kind::QuadraticCompare:
      c.t1 = 5.0;
      c.marker_times = {0.0, 2.0};
      break;
    case Kind::Figure2:
      c.t1 = 25.0;
      c.marker_times = {0.0, 2.0, 22.5};
      break;
    case Kind::Figure3:
    case Kind::CubicCompare:
      c.t1 = 10.0;
      c.deltas = {0.05};
      c.ic = example_cubic_ic();
      c.marker_times = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
      break;
    case Kind::Converge:
      c.t1 = 5.0;
      c.deltas = {0.04, 0.02};
      c.ic = example_cubic_ic();
      break;
  }
  return c;
}

namespace detail {

template <typename T>
T get_field(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

inline So3Vector get_vector(const nlohmann::json& j, const char* key) {
  try {
    return vector_from_json(j.at(key));
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' is missing");
  } catch (const Error& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace detail

/// Overlays a JSON config document onto the defaults for `kind`.
inline ExperimentConfig config_from_json(const nlohmann::json& j, Kind kind) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (j.contains("schema") && j["schema"] != kConfigSchema) {
    throw ConfigError("unsupported config schema " + j["schema"].dump());
  }
  if (j.contains("kind") && parse_kind(detail::get_field<std::string>(j, "kind")) != kind) {
    throw ConfigError("config kind '" + j["kind"].get<std::string>() + "' does not match subcommand '" +
                      kind_name(kind) + "'");
  }
  ExperimentConfig c = default_config(kind);
  if (j.contains("interval")) {
    const auto iv = detail::get_field<std::vector<double>>(j, "interval");
    if (iv.size() != 2) throw ConfigError("interval must be [t0, t1]");
    c.t0 = iv[0];
    c.t1 = iv[1];
  }
  if (j.contains("step")) c.step = detail::get_field<double>(j, "step");
  if (j.contains("deltas")) c.deltas = detail::get_field<std::vector<double>>(j, "deltas");
  if (j.contains("delta")) c.deltas = {detail::get_field<double>(j, "delta")};
  if (j.contains("D")) c.D = detail::get_vector(j, "D");
  if (j.contains("initial_conditions")) {
    const auto& ic = j["initial_conditions"];
    c.ic = {false, detail::get_vector(ic, "V0"), detail::get_vector(ic, "V1"), detail::get_vector(ic, "V2")};
  }
  if (j.contains("perturbation")) {
    if (j.contains("initial_conditions")) {
      throw ConfigError("give either initial_conditions or perturbation, not both");
    }
    const auto& pc = j["perturbation"];
    c.ic = {true, detail::get_vector(pc, "P0"), detail::get_vector(pc, "P1"), detail::get_vector(pc, "P2")};
  }
  if (j.contains("stride")) c.stride = detail::get_field<double>(j, "stride");
  if (j.contains("output_dir")) c.output_dir = detail::get_field<std::string>(j, "output_dir");
  if (j.contains("formats")) {
    const auto f = detail::get_field<std::vector<std::string>>(j, "formats");
    c.formats = {f.begin(), f.end()};
  }
  if (j.contains("projection")) {
    const auto& p = j["projection"];
    try {
      if (p.is_string()) {
        c.projection = Projection::plane(p.get<std::string>());
      } else {
        c.projection = {detail::get_field<double>(p, "azimuth"), detail::get_field<double>(p, "elevation")};
      }
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  if (j.contains("error_budget")) c.error_budget = detail::get_field<double>(j, "error_budget");
  if (j.contains("renormalize_every")) c.renormalize_every = detail::get_field<std::size_t>(j, "renormalize_every");
  if (j.contains("markers")) c.marker_times = detail::get_field<std::vector<double>>(j, "markers");
  return c;
}

/// Throws ConfigError on invalid configs. A zero delta for a cubic run is a
/// numerical degeneracy (B = 0) and raised as Error(DegenerateB) instead.
inline void validate(const ExperimentConfig& c) {
  if (!(std::isfinite(c.t0) && std::isfinite(c.t1) && c.t0 < c.t1)) {
    throw ConfigError("interval must satisfy t0 < t1");
  }
  if (!(c.step > 0.0) || c.step > c.t1 - c.t0) throw ConfigError("step must lie in (0, t1 - t0]");
  if (!(c.stride > 0.0) || c.stride > c.t1 - c.t0) throw ConfigError("stride must lie in (0, t1 - t0]");
  if (c.formats.empty()) throw ConfigError("at least one output format is required");
  for (const auto& f : c.formats) {
    if (f != "csv" && f != "json" && f != "svg") throw ConfigError("unknown output format '" + f + "'");
  }
  if (c.deltas.empty()) throw ConfigError("delta is required");
  if (!(c.error_budget > 0.0)) throw ConfigError("error_budget must be positive");
  if (!(c.D.allFinite() && c.D.norm() > 1e-12)) throw ConfigError("D must be a nonzero vector");
  if (c.kind == Kind::Converge) {
    if (c.deltas.size() < 2) throw ConfigError("converge needs at least two deltas");
    for (std::size_t i = 0; i < c.deltas.size(); ++i) {
      if (!(c.deltas[i] > 0.0)) throw ConfigError("deltas must be positive");
      if (i && !(c.deltas[i] < c.deltas[i - 1])) throw ConfigError("deltas must be strictly decreasing");
    }
  } else {
    if (c.deltas.size() != 1) throw ConfigError("this experiment takes a single delta");
    if (c.delta() < 0.0 || !std::isfinite(c.delta())) throw ConfigError("delta must be positive");
    if (c.delta() == 0.0) {
      if (is_cubic_kind(c.kind)) throw Error(ErrorCode::DegenerateB, "delta = 0 leaves B = 0");
      throw ConfigError("delta must be positive");
    }
  }
}

/// Output sample times t0 + k stride, k = 0..floor((t1 - t0)/stride).
inline std::vector<double> sample_times(const ExperimentConfig& c) {
  const auto n = static_cast<std::size_t>(std::floor((c.t1 - c.t0) / c.stride + 1e-9));
  std::vector<double> t(n + 1);
  for (std::size_t k = 0; k <= n; ++k) t[k] = c.t0 + static_cast<double>(k) * c.stride;
  return t;
}

struct ErrorSeries {
  std::string name;
  std::vector<double> values;  // at the output sample times
  double max = 0.0;            // over the integration grid
  std::optional<double> breach_time;
};

struct RatioRow {
  std::string quantity;
  double delta_coarse = 0.0;
  double delta_fine = 0.0;
  double ratio = 0.0;
  double band_lo = 0.0;
  double band_hi = 0.0;
  bool pass = false;
};

struct DeltaRow {
  double delta = 0.0;
  std::map<std::string, double> max_errors;
};

struct ErrorReport {
  std::vector<double> times;
  std::vector<ErrorSeries> series;
  std::vector<DeltaRow> per_delta;
  std::vector<RatioRow> ratios;

  const ErrorSeries& find(const std::string& name) const {
    for (const auto& s : series) {
      if (s.name == name) return s;
    }
    throw std::out_of_range("no error series named " + name);
  }
  bool all_pass() const {
    return std::all_of(ratios.begin(), ratios.end(), [](const RatioRow& r) { return r.pass; });
  }
};

inline nlohmann::json report_to_json(const ErrorReport& r) {
  nlohmann::json j = {{"schema", kReportSchema}};
  nlohmann::json summary = nlohmann::json::object();
  for (const auto& s : r.series) {
    summary[s.name] = {{"max", s.max},
                       {"breach_time", s.breach_time ? nlohmann::json(*s.breach_time) : nlohmann::json(nullptr)}};
  }
  j["summary"] = summary;
  if (!r.per_delta.empty()) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& d : r.per_delta) rows.push_back({{"delta", d.delta}, {"max_errors", d.max_errors}});
    j["per_delta"] = rows;
  }
  if (!r.ratios.empty()) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& q : r.ratios) {
      rows.push_back({{"quantity", q.quantity},
                      {"delta_coarse", q.delta_coarse},
                      {"delta_fine", q.delta_fine},
                      {"ratio", q.ratio},
                      {"band", {q.band_lo, q.band_hi}},
                      {"pass", q.pass}});
    }
    j["ratios"] = rows;
    j["all_pass"] = r.all_pass();
  }
  return j;
}

// ---------------------------------------------------------------------------
// Quadratic comparison (figure1, figure2)

struct QuadraticComparison {
  ApproxParams params;
  QuadraticIVP ivp;
  QuadraticTrajectory trajectory;
  std::vector<double> times;
  std::vector<So3Vector> V, V1hat, V2hat, taylor;
  ErrorReport report;
};

inline QuadraticComparison compare_quadratic(const ExperimentConfig& c) {
  validate(c);
  const QuadraticIVP ivp = c.ic.ivp(c.D, c.delta(), c.t0, c.t1);
  QuadraticTrajectory traj = integrate_quadratic(ivp, c.step);
  const ApproxParams params = fit_params(c.D, c.delta(), ivp.V0, ivp.V1, ivp.V2, c.t0);
  const Approximant approx(params);

  QuadraticComparison out{params, ivp, std::move(traj), sample_times(c), {}, {}, {}, {}, {}};
  const QuadraticTrajectory& tr = out.trajectory;
  ErrorSeries e1{"V1hat", {}, 0.0, {}}, e2{"V2hat", {}, 0.0, {}}, et{"taylor2", {}, 0.0, {}};
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double t = tr.time(i);
    const So3Vector& v = tr.sample(i).V;
    e1.max = std::max(e1.max, (v - approx.V1(t, 0)).norm());
    e2.max = std::max(e2.max, (v - approx.V2(t, 0)).norm());
    et.max = std::max(et.max, (v - taylor2_baseline(ivp, t)).norm());
  }
  for (double t : out.times) {
    out.V.push_back(tr(t, 0));
    out.V1hat.push_back(approx.V1(t, 0));
    out.V2hat.push_back(approx.V2(t, 0));
    out.taylor.push_back(taylor2_baseline(ivp, t));
    e1.values.push_back((out.V.back() - out.V1hat.back()).norm());
    e2.values.push_back((out.V.back() - out.V2hat.back()).norm());
    et.values.push_back((out.V.back() - out.taylor.back()).norm());
  }
  for (ErrorSeries* s : {&e1, &e2, &et}) {
    for (std::size_t k = 0; k < out.times.size(); ++k) {
      if (s->values[k] > c.error_budget) {
        s->breach_time = out.times[k];
        break;
      }
    }
  }
  out.report.times = out.times;
  out.report.series = {std::move(e1), std::move(e2), std::move(et)};
  return out;
}

// ---------------------------------------------------------------------------
// Cubic comparison (figure3)

struct CubicComparison {
  ApproxParams params;
  QuadraticTrajectory trajectory;
  RotationTrajectory x;  // integrated cubic on the trajectory grid
  std::vector<double> times;
  std::vector<Rotation> x_samples, xhat_samples;
  std::vector<So3Distance> distance;
  std::vector<double> phi, phi_hat_values;
  ErrorReport report;
};

namespace detail {

inline std::size_t nearest_node(const UniformGrid& g, double t) {
  const double x = std::round((t - g.t0) / g.h);
  return static_cast<std::size_t>(std::clamp(x, 0.0, static_cast<double>(g.steps)));
}

inline bool on_grid(const UniformGrid& g, double t) {
  const double x = (t - g.t0) / g.h;
  return std::abs(x - std::round(x)) < 1e-7;
}

}  // namespace detail

inline CubicComparison compare_cubic(const ExperimentConfig& c) {
  validate(c);
  const QuadraticIVP ivp = c.ic.ivp(c.D, c.delta(), c.t0, c.t1);
  QuadraticTrajectory traj = integrate_quadratic(ivp, c.step);
  const ApproxParams params = fit_params(c.D, c.delta(), ivp.V0, ivp.V1, ivp.V2, c.t0);
  if (params.degenerate_b) throw Error(ErrorCode::DegenerateB, "fitted B vanishes; x_hat is undefined");
  CubicComparison out{params, std::move(traj), {}, sample_times(c), {}, {}, {}, {}, {}, {}};
  out.x = integrate_cubic(Rotation::Identity(), out.trajectory, {c.renormalize_every});
  const XHat xhat(params, Rotation::Identity());
  const PhiIntegral phi({out.trajectory, Rotation::Identity()});
  const UniformGrid& g = out.trajectory.grid();
  ErrorSeries ex{"xhat_frobenius", {}, 0.0, {}}, ea{"xhat_angle", {}, 0.0, {}}, ep{"phi", {}, 0.0, {}};
  for (std::size_t i = 0; i < out.x.size(); ++i) {
    const double t = out.x.times[i];
    const So3Distance dist = so3_distance(out.x.samples[i], xhat(t));
    ex.max = std::max(ex.max, dist.frobenius);
    ea.max = std::max(ea.max, dist.angle);
    ep.max = std::max(ep.max, std::abs(phi.at_node(i) - phi_hat(params, t)));
  }
  for (double t : out.times) {
    // Output samples of the integrated cubic come from grid nodes; off-grid
    // sample times are integrated onward from the nearest earlier node.
    Rotation xt;
    if (detail::on_grid(g, t)) {
      xt = out.x.samples[detail::nearest_node(g, t)];
    } else {
      const auto i = static_cast<std::size_t>(std::floor((t - g.t0) / g.h));
      const auto piece = integrate_cubic(out.x.samples[i], [&](double s) { return out.trajectory(s, 0); },
                                         g.time(i), t, t - g.time(i));
      xt = piece.samples.back();
    }
    out.x_samples.push_back(xt);
    out.xhat_samples.push_back(xhat(t));
    out.distance.push_back(so3_distance(xt, out.xhat_samples.back()));
    out.phi.push_back(phi(t));
    out.phi_hat_values.push_back(phi_hat(params, t));
    ex.values.push_back(out.distance.back().frobenius);
    ea.values.push_back(out.distance.back().angle);
    ep.values.push_back(std::abs(out.phi.back() - out.phi_hat_values.back()));
  }
  for (ErrorSeries* s : {&ex, &ea, &ep}) {
    for (std::size_t k = 0; k < out.times.size(); ++k) {
      if (s->values[k] > c.error_budget) {
        s->breach_time = out.times[k];
        break;
      }
    }
  }
  out.report.times = out.times;
  out.report.series = {std::move(ex), std::move(ea), std::move(ep)};
  return out;
}

// ---------------------------------------------------------------------------
// Convergence-order study

struct OrderBand {
  const char* quantity;
  double lo;
  double hi;
};

/// O(delta^2) quantities halve-ratio near 4, O(delta^3) near 8.
inline constexpr OrderBand kOrderBands[] = {
    {"V1hat", 3.0, 5.0}, {"V2hat", 6.0, 10.0}, {"xhat", 3.0, 5.0}, {"phi", 3.0, 5.0}};

/// Max errors on [t0, t1] of every approximant for one delta.
inline DeltaRow measure_delta(const ExperimentConfig& c, double delta) {
  const QuadraticIVP ivp = c.ic.ivp(c.D, delta, c.t0, c.t1);
  const QuadraticTrajectory traj = integrate_quadratic(ivp, c.step);
  const ApproxParams params = fit_params(c.D, delta, ivp.V0, ivp.V1, ivp.V2, c.t0);
  if (params.degenerate_b) throw Error(ErrorCode::DegenerateB, "fitted B vanishes; x_hat is undefined");
  const Approximant approx(params);
  const RotationTrajectory x = integrate_cubic(Rotation::Identity(), traj, {c.renormalize_every});
  const XHat xhat(params, Rotation::Identity());
  const PhiIntegral phi({traj, Rotation::Identity()});
  DeltaRow row{delta, {{"V1hat", 0.0}, {"V2hat", 0.0}, {"xhat", 0.0}, {"phi", 0.0}, {"taylor2", 0.0}}};
  auto& m = row.max_errors;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.time(i);
    const So3Vector& v = traj.sample(i).V;
    m["V1hat"] = std::max(m["V1hat"], (v - approx.V1(t, 0)).norm());
    m["V2hat"] = std::max(m["V2hat"], (v - approx.V2(t, 0)).norm());
    m["taylor2"] = std::max(m["taylor2"], (v - taylor2_baseline(ivp, t)).norm());
    m["xhat"] = std::max(m["xhat"], so3_distance(x.samples[i], xhat(t)).frobenius);
    m["phi"] = std::max(m["phi"], std::abs(phi.at_node(i) - phi_hat(params, t)));
  }
  return row;
}

inline ErrorReport converge(const ExperimentConfig& c) {
  validate(c);
  std::vector<std::future<DeltaRow>> jobs;
  for (double delta : c.deltas) jobs.push_back(std::async(std::launch::async, measure_delta, c, delta));
  ErrorReport r;
  for (auto& j : jobs) r.per_delta.push_back(j.get());
  for (std::size_t i = 0; i + 1 < r.per_delta.size(); ++i) {
    const DeltaRow& a = r.per_delta[i];
    const DeltaRow& b = r.per_delta[i + 1];
    for (const OrderBand& band : kOrderBands) {
      const double ratio = a.max_errors.at(band.quantity) / b.max_errors.at(band.quantity);
      r.ratios.push_back({band.quantity, a.delta, b.delta, ratio, band.lo, band.hi,
                          ratio >= band.lo && ratio <= band.hi});
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// File emission

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return os;
}

inline std::vector<So3Vector> pick(const std::vector<double>& times, const std::vector<So3Vector>& pts,
                                   double t) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (std::abs(times[k] - t) < 1e-9) return {pts[k]};
  }
  return {};
}

inline std::string marker_label(double t) {
  std::ostringstream os;
  os << "t=" << t;
  return os.str();
}

}  // namespace detail

inline std::vector<std::filesystem::path> emit_quadratic(const ExperimentConfig& c, const QuadraticComparison& q,
                                                         const std::string& stem, bool plot_taylor) {
  std::filesystem::create_directories(c.output_dir);
  std::vector<std::filesystem::path> files;
  if (c.formats.count("csv")) {
    const auto path = c.output_dir / (stem + ".csv");
    auto os = detail::open_output(path);
    write_csv_header(os, {"t", "V_x", "V_y", "V_z", "V1hat_x", "V1hat_y", "V1hat_z", "V2hat_x", "V2hat_y",
                          "V2hat_z", "taylor2_x", "taylor2_y", "taylor2_z", "err_V1hat", "err_V2hat",
                          "err_taylor2"});
    const auto& e1 = q.report.find("V1hat").values;
    const auto& e2 = q.report.find("V2hat").values;
    const auto& et = q.report.find("taylor2").values;
    for (std::size_t k = 0; k < q.times.size(); ++k) {
      const So3Vector &v = q.V[k], &a = q.V1hat[k], &b = q.V2hat[k], &tp = q.taylor[k];
      write_csv_row(os, {q.times[k], v.x(), v.y(), v.z(), a.x(), a.y(), a.z(), b.x(), b.y(), b.z(), tp.x(),
                         tp.y(), tp.z(), e1[k], e2[k], et[k]});
    }
    files.push_back(path);
  }
  if (c.formats.count("json")) {
    const auto path = c.output_dir / (stem + ".json");
    nlohmann::json j = report_to_json(q.report);
    j["kind"] = kind_name(c.kind);
    j["interval"] = {c.t0, c.t1};
    j["step"] = c.step;
    j["stride"] = c.stride;
    j["error_budget"] = c.error_budget;
    j["C"] = to_json(q.trajectory.C());
    j["c"] = q.trajectory.c();
    j["conservation_drift"] = {{"C", conservation_drift(q.trajectory).C}, {"c", conservation_drift(q.trajectory).c}};
    const GeodesicGauge gauge = geodesic_gauge(q.trajectory);
    j["geodesic_gauge"] = {{"sup_V1", gauge.velocity_change}, {"sup_V2", gauge.acceleration}};
    j["params"] = params_to_json(q.params);
    auto os = detail::open_output(path);
    os << j.dump(2) << '\n';
    files.push_back(path);
  }
  if (c.formats.count("svg")) {
    const auto path = c.output_dir / (stem + ".svg");
    SvgPlot plot(kind_name(c.kind) + ": V (blue), V1hat (green), V2hat (red)" +
                     (plot_taylor ? ", Taylor-2 (dashed)" : ""),
                 c.projection);
    plot.add_curve({"V (integrated)", "#1f4fd1", false, q.V});
    plot.add_curve({"V1hat", "#2a9d3a", false, q.V1hat});
    plot.add_curve({"V2hat", "#d12a2a", false, q.V2hat});
    if (plot_taylor) plot.add_curve({"Taylor degree 2", "#333333", true, q.taylor});
    for (double t : c.marker_times) {
      for (const auto& p : detail::pick(q.times, q.V, t)) plot.add_marker({detail::marker_label(t), "#1f4fd1", p});
      if (t > c.t0) {
        for (const auto& p : detail::pick(q.times, q.V1hat, t)) plot.add_marker({"", "#2a9d3a", p});
        for (const auto& p : detail::pick(q.times, q.V2hat, t)) plot.add_marker({"", "#d12a2a", p});
      }
    }
    auto os = detail::open_output(path);
    plot.write(os);
    files.push_back(path);
  }
  return files;
}

inline std::vector<std::filesystem::path> emit_cubic(const ExperimentConfig& c, const CubicComparison& q,
                                                     const std::string& stem) {
  std::filesystem::create_directories(c.output_dir);
  std::vector<std::filesystem::path> files;
  std::vector<So3Vector> x_rows, xhat_rows;
  for (std::size_t k = 0; k < q.times.size(); ++k) {
    x_rows.emplace_back(q.x_samples[k].row(1).transpose());
    xhat_rows.emplace_back(q.xhat_samples[k].row(1).transpose());
  }
  if (c.formats.count("csv")) {
    const auto path = c.output_dir / (stem + ".csv");
    auto os = detail::open_output(path);
    write_csv_header(os, {"t", "x_row2_1", "x_row2_2", "x_row2_3", "xhat_row2_1", "xhat_row2_2", "xhat_row2_3",
                          "frobenius", "angle", "phi", "phi_hat"});
    for (std::size_t k = 0; k < q.times.size(); ++k) {
      write_csv_row(os, {q.times[k], x_rows[k].x(), x_rows[k].y(), x_rows[k].z(), xhat_rows[k].x(),
                         xhat_rows[k].y(), xhat_rows[k].z(), q.distance[k].frobenius, q.distance[k].angle,
                         q.phi[k], q.phi_hat_values[k]});
    }
    files.push_back(path);
  }
  if (c.formats.count("json")) {
    const auto path = c.output_dir / (stem + ".json");
    nlohmann::json j = report_to_json(q.report);
    j["kind"] = kind_name(c.kind);
    j["interval"] = {c.t0, c.t1};
    j["step"] = c.step;
    j["stride"] = c.stride;
    j["delta"] = c.delta();
    j["params"] = params_to_json(q.params);
    nlohmann::json marks = nlohmann::json::array();
    for (double t : c.marker_times) {
      for (std::size_t k = 0; k < q.times.size(); ++k) {
        if (std::abs(q.times[k] - t) < 1e-9) {
          marks.push_back({{"t", t}, {"frobenius", q.distance[k].frobenius}, {"angle", q.distance[k].angle}});
        }
      }
    }
    j["distance_at_markers"] = marks;
    auto os = detail::open_output(path);
    os << j.dump(2) << '\n';
    files.push_back(path);
  }
  if (c.formats.count("svg")) {
    const auto path = c.output_dir / (stem + ".svg");
    SvgPlot plot(kind_name(c.kind) + ": second rows of x (blue) and xhat (red)", c.projection);
    plot.add_curve({"x (integrated)", "#1f4fd1", false, x_rows});
    plot.add_curve({"xhat (closed form)", "#d12a2a", false, xhat_rows});
    for (double t : c.marker_times) {
      for (const auto& p : detail::pick(q.times, x_rows, t)) plot.add_marker({detail::marker_label(t), "#1f4fd1", p});
      if (t >= c.t0 + 3.0 - 1e-9) {
        for (const auto& p : detail::pick(q.times, xhat_rows, t)) plot.add_marker({"", "#d12a2a", p});
      }
    }
    auto os = detail::open_output(path);
    plot.write(os);
    files.push_back(path);
  }
  return files;
}

inline std::vector<std::filesystem::path> emit_converge(const ExperimentConfig& c, const ErrorReport& r) {
  std::filesystem::create_directories(c.output_dir);
  std::vector<std::filesystem::path> files;
  if (c.formats.count("csv")) {
    auto path = c.output_dir / "converge.csv";
    {
      auto os = detail::open_output(path);
      write_csv_header(os, {"delta", "err_V1hat", "err_V2hat", "err_xhat", "err_phi", "err_taylor2"});
      for (const auto& d : r.per_delta) {
        const auto& m = d.max_errors;
        write_csv_row(os, {d.delta, m.at("V1hat"), m.at("V2hat"), m.at("xhat"), m.at("phi"), m.at("taylor2")});
      }
    }
    files.push_back(path);
    path = c.output_dir / "converge_ratios.csv";
    auto os = detail::open_output(path);
    write_csv_header(os, {"quantity", "delta_coarse", "delta_fine", "ratio", "band_lo", "band_hi", "pass"});
    for (const auto& q : r.ratios) {
      os << q.quantity << ',' << format_number(q.delta_coarse) << ',' << format_number(q.delta_fine) << ','
         << format_number(q.ratio) << ',' << format_number(q.band_lo) << ',' << format_number(q.band_hi) << ','
         << (q.pass ? "true" : "false") << '\n';
    }
    files.push_back(path);
  }
  if (c.formats.count("json")) {
    const auto path = c.output_dir / "converge.json";
    nlohmann::json j = report_to_json(r);
    j["kind"] = kind_name(c.kind);
    j["interval"] = {c.t0, c.t1};
    j["step"] = c.step;
    auto os = detail::open_output(path);
    os << j.dump(2) << '\n';
    files.push_back(path);
  }
  // Ratio tables have no natural curve; svg is accepted and ignored.
  return files;
}

// ---------------------------------------------------------------------------
// Subcommand entry points

inline std::vector<std::filesystem::path> run_figure1(const ExperimentConfig& c) {
  return emit_quadratic(c, compare_quadratic(c), "figure1", true);
}

inline std::vector<std::filesystem::path> run_figure2(const ExperimentConfig& c) {
  return emit_quadratic(c, compare_quadratic(c), "figure2", false);
}

inline std::vector<std::filesystem::path> run_figure3(const ExperimentConfig& c) {
  return emit_cubic(c, compare_cubic(c), "figure3");
}

inline std::vector<std::filesystem::path> run_quadratic(const ExperimentConfig& c) {
  const QuadraticComparison q = compare_quadratic(c);
  auto files = emit_quadratic(c, q, "quadratic", true);
  if (c.formats.count("csv")) {
    const auto path = c.output_dir / "trajectory.csv";
    auto os = detail::open_output(path);
    write_trajectory_csv(os, q.trajectory);
    files.push_back(path);
  }
  if (c.formats.count("json")) {
    const auto path = c.output_dir / "trajectory.json";
    auto os = detail::open_output(path);
    os << trajectory_to_json(q.trajectory).dump(2) << '\n';
    files.push_back(path);
  }
  return files;
}

inline std::vector<std::filesystem::path> run_cubic(const ExperimentConfig& c) {
  const CubicComparison q = compare_cubic(c);
  auto files = emit_cubic(c, q, "cubic");
  if (c.formats.count("csv")) {
    const auto path = c.output_dir / "rotation.csv";
    auto os = detail::open_output(path);
    write_rotation_csv(os, q.x);
    files.push_back(path);
  }
  if (c.formats.count("json")) {
    const auto path = c.output_dir / "rotation.json";
    auto os = detail::open_output(path);
    os << rotation_trajectory_to_json(q.x).dump(2) << '\n';
    files.push_back(path);
  }
  return files;
}

inline ErrorReport run_converge(const ExperimentConfig& c) {
  ErrorReport r = converge(c);
  emit_converge(c, r);
  return r;
}

inline std::vector<std::filesystem::path> run(const ExperimentConfig& c) {
  switch (c.kind) {
    case Kind::Figure1: return run_figure1(c);
    case Kind::Figure2: return run_figure2(c);
    case Kind::Figure3: return run_figure3(c);
    case Kind::QuadraticCompare: return run_quadratic(c);
    case Kind::CubicCompare: return run_cubic(c);
    case Kind::Converge: return emit_converge(c, converge(c));
  }
  return {};
}

}  // namespace so3cubic::harness
