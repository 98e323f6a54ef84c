#include "flosurf/experiment.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

namespace flosurf {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKeys{
    "d",         "p",     "theta", "q",     "q_equals_p", "rounds",     "shots",
    "shots_scale_with_d", "resamples", "incoherent_shots", "seed", "workers", "out",
    "trace",     "update_path", "pipeline"};

template <typename T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// Shared immutable structures of one point.
struct PointContext {
  explicit PointContext(const SweepPoint& pt)
      : patch(build_patch(pt.d)),
        network(build_majorana_network(patch)),
        graph(patch, EdgeWeights::from_rates(pt.p, pt.q)) {}

  CodePatch patch;
  MajoranaNetwork network;
  DetectionGraph graph;
};

template <typename Body>
void parallel_strided(std::int64_t count, int workers, Body body) {
  workers = std::max(1, workers);
  if (workers == 1) {
    body(0, std::int64_t{1}, count);
    return;
  }
  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back([&, w] { body(w, workers, count); });
}

}  // namespace

SweepConfig parse_sweep_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKnownKeys.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  SweepConfig c;
  if (!j.contains("d")) throw ConfigError("config needs 'd'");
  c.d_list = get_as<std::vector<int>>(j, "d");
  if (c.d_list.empty()) throw ConfigError("'d' is empty");
  for (int d : c.d_list) {
    if (d < 1 || d % 2 == 0) throw ConfigError("distances must be odd and positive");
  }
  if (j.contains("p") == j.contains("theta")) throw ConfigError("give exactly one of 'p' and 'theta'");
  if (j.contains("p")) {
    for (double p : get_as<std::vector<double>>(j, "p")) {
      if (!(p >= 0.0 && p < 0.5)) throw ConfigError("rates 'p' must lie in [0, 0.5)");
      c.theta_list.push_back(angle_of_error_rate(p));
    }
  } else {
    c.theta_list = get_as<std::vector<double>>(j, "theta");
    for (double t : c.theta_list) {
      if (!std::isfinite(t) || error_rate_of_angle(t) >= 0.5) {
        throw ConfigError("angles must give sin^2(theta) below 0.5");
      }
    }
  }
  if (c.theta_list.empty()) throw ConfigError("no rates given");
  c.q_equals_p = j.value("q_equals_p", false);
  if (c.q_equals_p == j.contains("q")) throw ConfigError("give exactly one of 'q' and 'q_equals_p'");
  if (j.contains("q")) {
    c.q_list = get_as<std::vector<double>>(j, "q");
    if (c.q_list.empty()) throw ConfigError("'q' is empty");
    for (double q : c.q_list) {
      if (!(q >= 0.0 && q < 0.5)) throw ConfigError("readout rates must lie in [0, 0.5)");
    }
  }
  if (j.contains("rounds")) {
    if (j["rounds"].is_string()) {
      if (j["rounds"] != "d") throw ConfigError("'rounds' must be a positive integer or \"d\"");
    } else {
      c.rounds = get_as<int>(j, "rounds");
      if (c.rounds < 1) throw ConfigError("'rounds' must be positive");
    }
  }
  if (j.contains("shots")) c.shots = get_as<std::int64_t>(j, "shots");
  if (c.shots < 1) throw ConfigError("'shots' must be positive");
  if (j.contains("shots_scale_with_d")) c.shots_scale_with_d = get_as<bool>(j, "shots_scale_with_d");
  if (j.contains("resamples")) c.resamples = get_as<int>(j, "resamples");
  if (c.resamples < 1) throw ConfigError("'resamples' must be positive");
  if (j.contains("incoherent_shots")) c.incoherent_shots = get_as<std::int64_t>(j, "incoherent_shots");
  if (c.incoherent_shots < 0) throw ConfigError("'incoherent_shots' must not be negative");
  if (j.contains("seed")) c.master_seed = get_as<std::uint64_t>(j, "seed");
  if (j.contains("workers")) c.workers = get_as<int>(j, "workers");
  if (c.workers < 1) throw ConfigError("'workers' must be positive");
  if (j.contains("out")) c.out = get_as<std::string>(j, "out");
  if (j.contains("trace")) c.trace = get_as<std::string>(j, "trace");
  if (j.contains("pipeline")) {
    const auto kind = get_as<std::string>(j, "pipeline");
    if (kind == "coherent") {
      c.pipeline = Pipeline::Coherent;
    } else if (kind == "incoherent") {
      c.pipeline = Pipeline::Incoherent;
    } else {
      throw ConfigError("'pipeline' must be \"coherent\" or \"incoherent\"");
    }
  }
  if (j.contains("update_path")) {
    const auto path = get_as<std::string>(j, "update_path");
    if (path == "active") {
      c.update_path = UpdatePath::Active;
    } else if (path == "full") {
      c.update_path = UpdatePath::Full;
    } else {
      throw ConfigError("'update_path' must be \"active\" or \"full\"");
    }
  }
  return c;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return parse_sweep_config(j);
}

json to_json(const SweepConfig& c) {
  json j;
  j["pipeline"] = c.pipeline == Pipeline::Coherent ? "coherent" : "incoherent";
  j["d"] = c.d_list;
  j["theta"] = c.theta_list;
  if (c.q_equals_p) {
    j["q_equals_p"] = true;
  } else {
    j["q"] = c.q_list;
  }
  if (c.rounds > 0) {
    j["rounds"] = c.rounds;
  } else {
    j["rounds"] = "d";
  }
  j["shots"] = c.shots;
  j["shots_scale_with_d"] = c.shots_scale_with_d;
  j["resamples"] = c.resamples;
  j["incoherent_shots"] = c.incoherent_shots;
  j["seed"] = c.master_seed;
  j["workers"] = c.workers;
  if (!c.out.empty()) j["out"] = c.out;
  if (!c.trace.empty()) j["trace"] = c.trace;
  j["update_path"] = c.update_path == UpdatePath::Active ? "active" : "full";
  return j;
}

std::vector<SweepPoint> sweep_points(const SweepConfig& c) {
  std::vector<SweepPoint> out;
  for (int d : c.d_list) {
    for (double theta : c.theta_list) {
      const double p = error_rate_of_angle(theta);
      const std::vector<double> qs = c.q_equals_p ? std::vector<double>{p} : c.q_list;
      for (double q : qs) {
        SweepPoint pt;
        pt.d = d;
        pt.theta = theta;
        pt.p = p;
        pt.q = q;
        pt.rounds = c.rounds > 0 ? c.rounds : d;
        pt.shots = c.shots * (c.shots_scale_with_d ? d : 1);
        out.push_back(pt);
      }
    }
  }
  return out;
}

std::uint64_t point_seed(std::uint64_t master, const SweepPoint& pt) {
  return derive_seed(master, static_cast<std::uint64_t>(pt.d) << 32 | static_cast<std::uint32_t>(pt.rounds),
                     std::bit_cast<std::uint64_t>(pt.theta), std::bit_cast<std::uint64_t>(pt.q));
}

CoherentPipeline::CoherentPipeline(const CodePatch& patch, const MajoranaNetwork& network,
                                   const DetectionGraph& graph, UpdatePath path)
    : graph_(&graph),
      sampler_(patch, network, path),
      decode_([g = &graph](const Syndrome2D& s) { return flosurf::decode_2d(*g, s); }) {}

ShotOutcome CoherentPipeline::run_shot(double theta, double q, int rounds, int resamples, Rng& rng,
                                       std::vector<double>* theta_l, std::ostream* trace,
                                       std::size_t shot_index) {
  std::vector<MSyndrome> ms;
  const RoundsRecord record = sampler_.sample_rounds(theta, rounds, decode_, rng, trace ? &ms : nullptr);
  if (trace) write_trace_line(*trace, shot_index, record, ms);
  const ZSupport final_fix = decode_(record.s_rounds.back());
  ShotOutcome out;
  out.theta_star = record.theta_star;
  out.resamples = resamples;
  for (int r = 0; r < resamples; ++r) {
    const NoisySyndrome3D noisy = apply_readout_noise(record, q, rng);
    ZSupport combined = mwpm_decode(*graph_, detection_events(noisy)).z_support;
    for (std::size_t k = 0; k < combined.size(); ++k) combined[k] ^= final_fix[k];
    const LogicalClass cls = logical_class(combined, graph_->patch());
    out.logical_z += cls == LogicalClass::LogicalZ;
    if (theta_l) theta_l->push_back(final_angle(record.theta_star, cls));
  }
  return out;
}

double CoherentPipeline::perfect_readout_angle(double theta, Rng& rng) {
  return sampler_.sample_rounds(theta, 1, decode_, rng).theta_star;
}

std::vector<ShotOutcome> run_coherent_shots(const SweepPoint& pt, int resamples, std::uint64_t seed,
                                            int workers, UpdatePath path,
                                            std::vector<std::string>* trace_lines) {
  const PointContext ctx(pt);
  std::vector<ShotOutcome> out(pt.shots);
  if (trace_lines) trace_lines->assign(pt.shots, {});
  parallel_strided(pt.shots, workers, [&](std::int64_t first, std::int64_t step, std::int64_t count) {
    CoherentPipeline pipeline(ctx.patch, ctx.network, ctx.graph, path);
    for (std::int64_t k = first; k < count; k += step) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k), 1));
      if (trace_lines) {
        std::ostringstream line;
        out[k] = pipeline.run_shot(pt.theta, pt.q, pt.rounds, resamples, rng, nullptr, &line,
                                   static_cast<std::size_t>(k));
        (*trace_lines)[k] = line.str();
      } else {
        out[k] = pipeline.run_shot(pt.theta, pt.q, pt.rounds, resamples, rng);
      }
    }
  });
  return out;
}

MetricEstimate incoherent_metrics(const FailureEstimate& f) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  MetricEstimate m;
  m.shots = f.shots;
  m.resamples = 1;
  m.pli = f.rate();
  m.pli_err = f.error();
  m.pld = 2 * m.pli;
  m.pld_err = 2 * m.pli_err;
  m.coh_ratio = f.failures ? 1.0 : nan;
  m.coh_ratio_err = f.failures ? 0.0 : nan;
  m.twirl_i = m.twirl_i_err = m.twirl_d = m.twirl_d_err = nan;
  return m;
}

SweepRow run_point(const SweepConfig& config, const SweepPoint& pt, std::ostream* trace) {
  const std::uint64_t seed = point_seed(config.master_seed, pt);
  if (config.pipeline == Pipeline::Incoherent) {
    const PointContext ctx(pt);
    SweepRow row;
    row.point = pt;
    row.incoherent = estimate_incoherent_failure(ctx.graph, pt.p, pt.q, pt.rounds, pt.shots, seed, 2,
                                                 config.workers);
    row.metrics = incoherent_metrics(row.incoherent);
    return row;
  }
  std::vector<std::string> lines;
  const auto shots = run_coherent_shots(pt, config.resamples, seed, config.workers,
                                        config.update_path, trace ? &lines : nullptr);
  if (trace) {
    for (const auto& l : lines) *trace << l;
  }
  SweepRow row;
  row.point = pt;
  row.metrics = estimate_metrics(shots);
  if (config.incoherent_shots > 0) {
    const PointContext ctx(pt);
    row.incoherent = estimate_incoherent_failure(ctx.graph, pt.p, pt.q, pt.rounds,
                                                 config.incoherent_shots, seed, 2, config.workers);
    attach_twirl(row.metrics, row.incoherent);
  }
  return row;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config, std::ostream* trace,
                                const std::function<void(const SweepRow&)>& progress) {
  std::vector<SweepRow> rows;
  for (const SweepPoint& pt : sweep_points(config)) {
    rows.push_back(run_point(config, pt, trace));
    if (progress) progress(rows.back());
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out << r.point.d << ',' << format_double(r.point.p) << ',' << format_double(r.point.q) << ','
        << format_double(r.point.theta) << ',' << m.shots << ',' << m.resamples << ','
        << format_double(m.pli) << ',' << format_double(m.pli_err) << ',' << format_double(m.pld)
        << ',' << format_double(m.pld_err) << ',' << format_double(m.twirl_i) << ','
        << format_double(m.twirl_d) << ',' << format_double(m.coh_ratio) << ','
        << format_double(m.coh_ratio_err) << '\n';
  }
}

std::string csv_string(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  write_csv(out, rows);
  return out.str();
}

std::vector<SweepRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ConfigError("unexpected CSV header");
  std::vector<SweepRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 14) throw ConfigError("CSV line " + std::to_string(lineno) + " needs 14 fields");
    try {
      SweepRow r;
      r.point.d = std::stoi(f[0]);
      r.point.p = std::stod(f[1]);
      r.point.q = std::stod(f[2]);
      r.point.theta = std::stod(f[3]);
      r.point.shots = std::stoll(f[4]);
      auto& m = r.metrics;
      m.shots = r.point.shots;
      m.resamples = std::stoi(f[5]);
      m.pli = std::stod(f[6]);
      m.pli_err = std::stod(f[7]);
      m.pld = std::stod(f[8]);
      m.pld_err = std::stod(f[9]);
      m.twirl_i = std::stod(f[10]);
      m.twirl_d = std::stod(f[11]);
      m.coh_ratio = std::stod(f[12]);
      m.coh_ratio_err = std::stod(f[13]);
      m.twirl_i_err = m.twirl_d_err = std::nan("");
      rows.push_back(r);
    } catch (const std::exception&) {
      throw ConfigError("CSV line " + std::to_string(lineno) + " has a malformed number");
    }
  }
  return rows;
}

json manifest_json(const SweepConfig& config, const std::vector<SweepRow>& rows, double wall_seconds) {
  json j;
  j["version"] = version_string();
  j["config"] = to_json(config);
  j["master_seed"] = config.master_seed;
  j["points"] = rows.size();
  j["csv_columns"] = kCsvHeader;
  j["wall_time_seconds"] = wall_seconds;
  return j;
}

const char* version_string() { return "flosurf 0.1.0"; }

}  // namespace flosurf
