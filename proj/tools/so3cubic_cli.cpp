#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "so3cubic/harness.hpp"

namespace {

namespace h = so3cubic::harness;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
  std::string config_path;
  std::string out_dir;
  std::optional<double> step;
  std::string delta;  // single value, or comma-separated list for converge
  std::optional<double> stride;
  std::vector<std::string> formats;
};

std::vector<double> parse_delta_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw h::ConfigError("--delta: cannot parse '" + item + "' as a number");
    }
  }
  if (out.empty()) throw h::ConfigError("--delta: no values given");
  return out;
}

h::ExperimentConfig load_config(h::Kind kind, const Overrides& o) {
  h::ExperimentConfig c = h::default_config(kind);
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw h::ConfigError("cannot read config file " + o.config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw h::ConfigError("config file " + o.config_path + " is not valid JSON: " + e.what());
    }
    c = h::config_from_json(j, kind);
  }
  if (!o.out_dir.empty()) c.output_dir = o.out_dir;
  if (o.step) c.step = *o.step;
  if (o.stride) c.stride = *o.stride;
  if (!o.delta.empty()) c.deltas = parse_delta_list(o.delta);
  if (!o.formats.empty()) c.formats = {o.formats.begin(), o.formats.end()};
  return c;
}

void print_files(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) std::cout << f.string() << '\n';
}

void print_report(const h::ErrorReport& r) {
  for (const auto& d : r.per_delta) {
    std::printf("delta %-8g", d.delta);
    for (const auto& [name, v] : d.max_errors) std::printf("  %s %.6e", name.c_str(), v);
    std::printf("\n");
  }
  for (const auto& q : r.ratios) {
    std::printf("%-6s %g/%g ratio %.4f band [%g, %g] %s\n", q.quantity.c_str(), q.delta_coarse, q.delta_fine,
                q.ratio, q.band_lo, q.band_hi, q.pass ? "PASS" : "FAIL");
  }
}

int dispatch(h::Kind kind, const Overrides& o) {
  try {
    const h::ExperimentConfig c = load_config(kind, o);
    if (kind == h::Kind::Converge) {
      const h::ErrorReport r = h::run_converge(c);
      print_report(r);
      return kExitOk;
    }
    print_files(h::run(c));
    return kExitOk;
  } catch (const h::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const so3cubic::Error& e) {
    if (e.code() == so3cubic::ErrorCode::InvalidArgument) {
      std::cerr << "config error: " << e.what() << '\n';
      return kExitConfig;
    }
    std::cerr << "numerical error (" << so3cubic::to_string(e.code()) << "): " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lie quadratics and Riemannian cubics in SO(3): approximants and figure generation"};
  app.require_subcommand(1);

  struct Entry {
    const char* name;
    h::Kind kind;
    const char* help;
  };
  const Entry entries[] = {
      {"figure1", h::Kind::Figure1, "V, V1hat, V2hat and Taylor-2 on [0,5] for the worked quadratic example"},
      {"figure2", h::Kind::Figure2, "the same comparison on [0,25], with error-budget breach times"},
      {"figure3", h::Kind::Figure3, "second rows of the integrated cubic and of xhat, delta = 0.05"},
      {"converge", h::Kind::Converge, "max-error ratios between consecutive deltas"},
      {"quadratic", h::Kind::QuadraticCompare, "quadratic comparison plus the full integrated trajectory"},
      {"cubic", h::Kind::CubicCompare, "cubic comparison plus the full integrated rotation trajectory"},
  };

  std::vector<Overrides> overrides(std::size(entries));
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(entries); ++i) {
    CLI::App* sub = app.add_subcommand(entries[i].name, entries[i].help);
    Overrides& o = overrides[i];
    sub->add_option("--config", o.config_path, "JSON config file");
    sub->add_option("--out", o.out_dir, "output directory");
    sub->add_option("--step", o.step, "integration step");
    sub->add_option("--delta", o.delta,
                    entries[i].kind == h::Kind::Converge ? "comma-separated decreasing deltas" : "perturbation size");
    sub->add_option("--stride", o.stride, "output sample stride");
    sub->add_option("--format", o.formats, "output formats (csv, json, svg)")->delimiter(',');
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) return dispatch(entries[i].kind, overrides[i]);
  }
  return kExitConfig;
}
