#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flosurf/decoder.hpp"

namespace flosurf {

/// Pfaffian by expansion along the first row; exponential cost.
double pfaffian_by_expansion(const Eigen::MatrixXd& a);

/// Largest relative deviation of the Parlett-Reid Pfaffian from the
/// expansion over random antisymmetric matrices up to 8 x 8.
double pfaffian_max_error(int trials, std::uint64_t seed);

/// Largest entrywise deviation of the FLO engine (both update paths) from
/// the dense fermionic oracle, over random rotation and projection
/// sequences on 2 to 4 modes. Covers covariances and outcome probabilities.
double flo_vs_dense_max_error(int trials, std::uint64_t seed);

struct SamplerOracleReport {
  double tvd = 0.0;                // sampled syndromes vs exact table
  double max_angle_error = 0.0;    // per-syndrome theta_L
  double probability_defect = 0.0; // |sum of P(s) - 1|
  double plus_y_difference = 0.0;  // |+_L> vs |Y_L> starts
};

/// Single-round comparison at d = 3 with homogeneous angle theta.
SamplerOracleReport sampler_vs_oracle(double theta, std::int64_t shots, std::uint64_t seed);

/// Largest per-branch deviation of theta* from the round-by-round sampler
/// relative to direct multi-round evolution, d = 3.
double multi_round_max_error(double theta, int rounds);

/// Exact minimum pairing weight of events to each other or the boundary,
/// by dynamic programming over subsets (real weights).
double brute_force_matching_weight(const DetectionGraph& graph,
                                   const std::vector<DetectionEvent>& events);

struct DecoderReport {
  int instances = 0;
  int max_events = 0;
  double max_weight_gap = 0.0;
};

/// Random d = 3, p = q instances with at most max_events events, compared
/// against brute_force_matching_weight.
DecoderReport decoder_vs_brute_force(int instances, double rate, int max_events, std::uint64_t seed);

/// Worked d = 3 example over three rounds: corner errors on qubits 0 and 8
/// before the first round and one misrecorded bulk face in the second round.
/// Returns the decoder's correction.
Correction worked_example_correction();

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
};

/// The oracle comparisons as a pass/fail table.
std::vector<ValidationCheck> run_validation(std::uint64_t seed);

}  // namespace flosurf
