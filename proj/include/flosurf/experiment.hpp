#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "flosurf/coherent_sampler.hpp"
#include "flosurf/decoder.hpp"
#include "flosurf/incoherent.hpp"
#include "flosurf/metrics.hpp"

namespace flosurf {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Pipeline { Coherent, Incoherent };

/// Grid and sampling budget of a sweep. Either rates p or angles theta are
/// given (p = sin^2 theta); q is a list or tied to p.
struct SweepConfig {
  /// Incoherent sweeps report the failure rate f as pli and 2f as pld.
  Pipeline pipeline = Pipeline::Coherent;
  std::vector<int> d_list;
  std::vector<double> theta_list;
  std::vector<double> q_list;
  bool q_equals_p = false;
  /// Rounds per shot; 0 means d rounds.
  int rounds = 0;
  std::int64_t shots = 100;
  /// Multiply shots by d, as in the shots x d sampling scheme.
  bool shots_scale_with_d = false;
  int resamples = 1;
  /// Incoherent baseline shots per point for the twirl ratios; 0 skips it.
  std::int64_t incoherent_shots = 0;
  std::uint64_t master_seed = 1;
  int workers = 1;
  std::string out;
  std::string trace;
  UpdatePath update_path = UpdatePath::Active;
};

/// Parses the JSON config; see README for the keys. Throws ConfigError.
SweepConfig parse_sweep_config(const nlohmann::json& j);
SweepConfig load_sweep_config(const std::string& path);
nlohmann::json to_json(const SweepConfig& config);

struct SweepPoint {
  int d = 0;
  double theta = 0.0;
  double p = 0.0;
  double q = 0.0;
  int rounds = 0;
  std::int64_t shots = 0;
};

/// Grid points in d-major, then rate, then q order.
std::vector<SweepPoint> sweep_points(const SweepConfig& config);

/// Seed of a point, derived from its coordinates so adding points leaves
/// the others unchanged.
std::uint64_t point_seed(std::uint64_t master, const SweepPoint& point);

/// Coherent pipeline of one patch: FLO sampling of the noiseless 3D
/// syndrome, readout resampling, 3D matching and the final logical angle.
class CoherentPipeline {
 public:
  CoherentPipeline(const CodePatch& patch, const MajoranaNetwork& network,
                   const DetectionGraph& graph, UpdatePath path = UpdatePath::Active);

  /// One noiseless shot followed by `resamples` readout resamples. The
  /// final angles of the resamples are appended to theta_l if given.
  ShotOutcome run_shot(double theta, double q, int rounds, int resamples, Rng& rng,
                       std::vector<double>* theta_l = nullptr, std::ostream* trace = nullptr,
                       std::size_t shot_index = 0);

  /// Single round read perfectly: the logical angle is theta* itself.
  double perfect_readout_angle(double theta, Rng& rng);

  ZSupport decode_2d(const Syndrome2D& s) const { return flosurf::decode_2d(*graph_, s); }

 private:
  const DetectionGraph* graph_;
  CoherentSampler sampler_;
  Decode2D decode_;
};

struct SweepRow {
  SweepPoint point;
  MetricEstimate metrics;
  FailureEstimate incoherent;
};

/// Runs every grid point, shots spread over config.workers threads. Output
/// does not depend on the worker count. `progress` is called after each
/// point; `trace` receives one JSON line per noiseless shot.
std::vector<SweepRow> run_sweep(const SweepConfig& config, std::ostream* trace = nullptr,
                                const std::function<void(const SweepRow&)>& progress = {});

/// Row values of an incoherent point: f as pli, 2f as pld.
MetricEstimate incoherent_metrics(const FailureEstimate& f);

/// One point of a sweep (used by run_sweep).
SweepRow run_point(const SweepConfig& config, const SweepPoint& point,
                   std::ostream* trace = nullptr);

/// Per-shot outcomes of a point, in shot order.
std::vector<ShotOutcome> run_coherent_shots(const SweepPoint& point, int resamples,
                                            std::uint64_t seed, int workers, UpdatePath path,
                                            std::vector<std::string>* trace_lines = nullptr);

inline constexpr const char* kCsvHeader =
    "d,p,q,theta,shots,resamples,pli,pli_err,pld,pld_err,twirl_i,twirl_d,coh_ratio,coh_ratio_err";

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::string csv_string(const std::vector<SweepRow>& rows);

/// Reads rows written by write_csv (twirl errors are not stored and come
/// back as NaN). Throws ConfigError on a malformed file.
std::vector<SweepRow> read_csv(std::istream& in);

nlohmann::json manifest_json(const SweepConfig& config, const std::vector<SweepRow>& rows,
                             double wall_seconds);

/// Version string written to manifests.
const char* version_string();

}  // namespace flosurf
