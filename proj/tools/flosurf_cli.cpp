#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"

#include "flosurf/experiment.hpp"
#include "flosurf/lattice.hpp"
#include "flosurf/threshold.hpp"
#include "flosurf/validation.hpp"

using namespace flosurf;
using nlohmann::json;

namespace {

constexpr int kExitBadConfig = 1;
constexpr int kExitRuntime = 2;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out;
  std::string trace;
};

SweepConfig load_with_overrides(const std::string& path, const Overrides& o) {
  SweepConfig c = load_sweep_config(path);
  if (o.seed) c.master_seed = *o.seed;
  if (o.workers) {
    if (*o.workers < 1) throw ConfigError("--workers must be positive");
    c.workers = *o.workers;
  }
  if (!o.out.empty()) c.out = o.out;
  if (!o.trace.empty()) c.trace = o.trace;
  return c;
}

std::string manifest_path(const std::string& csv) {
  const auto dot = csv.rfind('.');
  const auto slash = csv.rfind('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? csv.substr(0, dot) : csv) + ".manifest.json";
}

std::vector<SweepRow> run_and_write(const SweepConfig& c) {
  std::ofstream trace_file;
  if (!c.trace.empty()) {
    trace_file.open(c.trace);
    if (!trace_file) throw std::runtime_error("cannot open trace file " + c.trace);
  }
  const auto start = std::chrono::steady_clock::now();
  const auto rows = run_sweep(c, c.trace.empty() ? nullptr : &trace_file, [](const SweepRow& r) {
    std::fprintf(stderr, "d=%d p=%.5g q=%.5g  pli=%.5g +- %.2g\n", r.point.d, r.point.p, r.point.q,
                 r.metrics.pli, r.metrics.pli_err);
  });
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (c.out.empty()) {
    write_csv(std::cout, rows);
    return rows;
  }
  std::ofstream csv(c.out);
  if (!csv) throw std::runtime_error("cannot write " + c.out);
  write_csv(csv, rows);
  std::ofstream manifest(manifest_path(c.out));
  if (!manifest) throw std::runtime_error("cannot write manifest for " + c.out);
  manifest << manifest_json(c, rows, wall).dump(2) << '\n';
  if (!csv || !manifest) throw std::runtime_error("write failed for " + c.out);
  return rows;
}

std::vector<SweepRow> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return read_csv(in);
}

std::vector<CurvePoint> curve_points(const std::vector<SweepRow>& rows, const std::string& metric,
                                     std::optional<double> q) {
  std::vector<CurvePoint> pts;
  for (const auto& r : rows) {
    if (q && std::abs(r.point.q - *q) > 1e-12) continue;
    if (metric == "pli") {
      pts.push_back({r.point.d, r.point.p, r.metrics.pli, r.metrics.pli_err});
    } else {
      pts.push_back({r.point.d, r.point.p, r.metrics.pld, r.metrics.pld_err});
    }
  }
  if (pts.empty()) throw ConfigError("no rows selected");
  return pts;
}

void emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out);
  f << j.dump(2) << '\n';
  if (!f) throw std::runtime_error("cannot write " + out);
}

json nan_safe(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json fit_json(const ThresholdFit& f) {
  return {{"p_th", f.p_th}, {"p_th_err", f.p_th_err}, {"nu", f.nu}, {"nu_err", f.nu_err},
          {"A", f.a}, {"B", f.b}, {"C", f.c}, {"chi2", f.chi2}, {"dof", f.dof}};
}

json diamond_json(const DiamondAnalysis& a) {
  json crossings = json::array();
  for (const auto& c : a.crossings) {
    crossings.push_back({{"d1", c.d1}, {"d2", c.d2}, {"found", c.found},
                         {"p", c.found ? json(c.p) : json(nullptr)}, {"p_err", nan_safe(c.p_err)},
                         {"note", c.note}});
  }
  return {{"crossings", crossings}, {"extrapolated", a.extrapolated},
          {"intercept", nan_safe(a.intercept)}, {"intercept_err", nan_safe(a.intercept_err)},
          {"slope", nan_safe(a.slope)}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surface-code simulator for coherent Z rotations with readout errors"};
  app.require_subcommand(0, 1);
  Overrides o;
  std::optional<int> dump_d;
  app.add_option("--dump-lattice", dump_d, "Print the lattice and Majorana network of distance d as JSON");

  auto* simulate = app.add_subcommand("simulate", "Run a sweep and write CSV + manifest");
  std::string config_path;
  simulate->add_option("--config", config_path, "Sweep config (JSON)")->required();
  simulate->add_option("--seed", o.seed, "Override the master seed");
  simulate->add_option("--workers", o.workers, "Worker threads");
  simulate->add_option("--out", o.out, "CSV output path (stdout if absent)");
  simulate->add_option("--trace", o.trace, "Per-shot JSON-lines trace");

  auto* fit = app.add_subcommand("threshold-fit", "Finite-size scaling fit of a sweep CSV");
  std::string in_path;
  std::string metric = "pli";
  std::optional<double> q_filter;
  std::string fit_out;
  fit->add_option("--in", in_path, "Sweep CSV")->required();
  fit->add_option("--metric", metric, "pli or pld")->check(CLI::IsMember({"pli", "pld"}));
  fit->add_option("--q", q_filter, "Use only rows with this readout rate");
  fit->add_option("--out", fit_out, "JSON output path");

  auto* diamond = app.add_subcommand("diamond-analysis", "Crossings of diamond-norm curves vs 1/d");
  diamond->add_option("--in", in_path, "Sweep CSV")->required();
  diamond->add_option("--q", q_filter, "Use only rows with this readout rate");
  diamond->add_option("--out", fit_out, "JSON output path");
  std::uint64_t diamond_seed = 1;
  diamond->add_option("--seed", diamond_seed, "Bootstrap seed");

  auto* map = app.add_subcommand("threshold-map", "Threshold brackets over a (p, q) grid");
  map->add_option("--config", config_path, "Sweep config with a q list");
  map->add_option("--in", in_path, "Existing sweep CSV instead of simulating");
  map->add_option("--seed", o.seed, "Override the master seed");
  map->add_option("--workers", o.workers, "Worker threads");
  map->add_option("--out", fit_out, "JSON output path");
  std::string map_csv;
  map->add_option("--csv", map_csv, "Also write the sweep CSV here");

  auto* validate = app.add_subcommand("validate", "Run the oracle comparisons");
  std::uint64_t validate_seed = 1;
  validate->add_option("--seed", validate_seed, "Seed of the sampled checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadConfig;
  }

  try {
    if (dump_d) {
      const CodePatch patch = build_patch(*dump_d);
      std::cout << lattice_dump_json(patch, build_majorana_network(patch)) << '\n';
      if (app.get_subcommands().empty()) return 0;
    }
    if (*simulate) {
      run_and_write(load_with_overrides(config_path, o));
    } else if (*fit) {
      const auto pts = curve_points(read_rows(in_path), metric, q_filter);
      emit(fit_json(fit_threshold(pts)), fit_out);
    } else if (*diamond) {
      const auto pts = curve_points(read_rows(in_path), "pld", q_filter);
      emit(diamond_json(diamond_intersection_analysis(pts, diamond_seed)), fit_out);
    } else if (*map) {
      if (config_path.empty() == in_path.empty()) throw ConfigError("give exactly one of --config and --in");
      std::vector<SweepRow> rows;
      if (!in_path.empty()) {
        rows = read_rows(in_path);
      } else {
        Overrides mo = o;
        mo.out = map_csv;
        rows = run_and_write(load_with_overrides(config_path, mo));
      }
      std::set<double> qs;
      for (const auto& r : rows) qs.insert(r.point.q);
      json out = json::array();
      for (double q : qs) {
        const auto b = bracket_threshold(q, curve_points(rows, "pli", q));
        json classes = json::array();
        for (const auto& [p, s] : b.classes) classes.push_back({{"p", p}, {"class", to_string(s)}});
        out.push_back({{"q", q}, {"lower", nan_safe(b.lower)}, {"upper", nan_safe(b.upper)},
                       {"points", classes}});
      }
      emit(out, fit_out);
    } else if (*validate) {
      bool all = true;
      for (const auto& c : run_validation(validate_seed)) {
        std::printf("%s  %-50s %.3g (tol %.1g)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value,
                    c.tolerance);
        all = all && c.passed;
      }
      return all ? 0 : kExitRuntime;
    } else if (!dump_d) {
      std::cout << app.help();
      return kExitBadConfig;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
