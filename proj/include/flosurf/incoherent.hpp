#pragma once

#include <cstdint>
#include <vector>

#include "flosurf/decoder.hpp"
#include "flosurf/rng.hpp"
#include "flosurf/types.hpp"

namespace flosurf {

/// One shot of the Pauli-twirled channel: independent Z errors with rate p
/// on every qubit in every round, readout flips with rate q.
struct IncoherentShot {
  std::vector<ZSupport> z_errors_per_round;
  NoisySyndrome3D recorded;
  ZSupport correction;
  bool failure = false;
};

/// Samples errors, builds the accumulated syndromes, adds readout noise
/// (last round clean) and decodes with the shared 3D matcher. Failure means
/// correction plus accumulated error is a logical Z. Throws for rates
/// outside [0, 1/2) or rounds < 1.
IncoherentShot simulate_incoherent_shot(const DetectionGraph& graph, double p, double q, int rounds,
                                        Rng& rng);

struct FailureEstimate {
  std::int64_t shots = 0;
  std::int64_t failures = 0;

  double rate() const { return shots ? double(failures) / double(shots) : 0.0; }
  /// Binomial standard error.
  double error() const;
};

/// Runs `shots` shots; shot k uses the stream derive_seed(seed, k, stream).
/// Deterministic for any worker count.
FailureEstimate estimate_incoherent_failure(const DetectionGraph& graph, double p, double q,
                                            int rounds, std::int64_t shots, std::uint64_t seed,
                                            std::uint64_t stream = 0, int workers = 1);

}  // namespace flosurf
