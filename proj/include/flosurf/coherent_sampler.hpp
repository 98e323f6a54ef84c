#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "flosurf/covariance.hpp"
#include "flosurf/lattice.hpp"
#include "flosurf/rng.hpp"
#include "flosurf/types.hpp"

namespace flosurf {

/// Noiseless syndromes of all rounds of one shot and the accumulated
/// logical rotation. theta_star is the sum of theta_round folded into
/// (-pi/2, pi/2].
struct RoundsRecord {
  std::vector<Syndrome2D> s_rounds;
  double theta_star = 0.0;
  std::vector<double> theta_round;
};

/// Maps an X syndrome to a Z string returning it to the code space.
using Decode2D = std::function<ZSupport(const Syndrome2D&)>;

/// Logical angle of one round together with the consistency of the two
/// independent estimates, |cos^2(2 theta) + sin^2(2 theta) - 1|.
struct LogicalAngle {
  double theta = 0.0;
  double consistency = 0.0;
};

/// Diagnostics of the last sample_m call.
struct SamplingStats {
  /// Log probability of the sampled m syndrome.
  double log_probability = 0.0;
  /// Largest deviation of a per-qubit outcome normalisation from its exact
  /// value (1/2 for every qubit but the last, 1 for the last).
  double normalization_error = 0.0;
};

/// Samples m syndromes and logical angles of a patch under Z rotations using
/// Gaussian-state evolution of its Majorana network. Holds prepared initial
/// states; one instance per worker.
class CoherentSampler {
 public:
  CoherentSampler(const CodePatch& patch, const MajoranaNetwork& network,
                  UpdatePath path = UpdatePath::Active);

  const CodePatch& patch() const { return *patch_; }
  const MajoranaNetwork& network() const { return *network_; }

  /// Applies prod_k (1 + m_k S_k X_k)(1 + m_k X_k) exp(i theta_k Z_k) / 4
  /// qubit by qubit to |+_L>, drawing each m_k from its conditional
  /// distribution. The post-measurement state is available from state().
  MSyndrome sample_m(const AngleAssignment& angles, Rng& rng);

  const CovarianceMatrix<double>& state() const { return work_; }
  const SamplingStats& last_stats() const { return stats_; }

  /// Logical rotation left after correcting syndrome s with `correction`,
  /// from the probability of the all-+1 m outcome of four runs: |+_L> and
  /// |Y_L> starts, each with and without an extra logical Z.
  LogicalAngle logical_angle(const AngleAssignment& angles, const ZSupport& correction);

  /// log of the probability that every qubit reads m = +1 and stays in its
  /// C4 code space, starting from `basis`; -infinity if impossible.
  double all_plus_log_probability(const AngleAssignment& angles, LogicalBasis basis);

  /// Samples `rounds` rounds; round j uses angles theta + pi/2 on the
  /// support of the previous round's correction. The m syndromes of each
  /// round are appended to m_rounds if given.
  RoundsRecord sample_rounds(double theta, int rounds, const Decode2D& decode, Rng& rng,
                             std::vector<MSyndrome>* m_rounds = nullptr);

 private:
  void run_qubit_rotation(int k, double theta);

  const CodePatch* patch_;
  const MajoranaNetwork* network_;
  CovarianceMatrix<double> plus_;
  CovarianceMatrix<double> y_;
  CovarianceMatrix<double> work_;
  SamplingStats stats_;
};

/// s_f = product of m over the corners of X face f.
Syndrome2D syndrome_from_m(const MSyndrome& m, const CodePatch& patch);

/// Convenience wrappers constructing a temporary sampler.
MSyndrome sample_m(const CodePatch& patch, const MajoranaNetwork& network,
                   const AngleAssignment& angles, Rng& rng);
RoundsRecord sample_rounds(const CodePatch& patch, const MajoranaNetwork& network, double theta,
                           int rounds, const Decode2D& decode, Rng& rng);

/// One JSON line with m, the round syndromes and angles.
void write_trace_line(std::ostream& out, std::size_t shot, const RoundsRecord& record,
                      const std::vector<MSyndrome>& m_rounds);

}  // namespace flosurf
