#include "flosurf/incoherent.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace flosurf {

IncoherentShot simulate_incoherent_shot(const DetectionGraph& graph, double p, double q, int rounds,
                                        Rng& rng) {
  if (p < 0.0 || p >= 0.5) throw std::invalid_argument("error rate must lie in [0, 1/2)");
  if (rounds < 1) throw std::invalid_argument("at least one round is required");
  const CodePatch& patch = graph.patch();
  const int n = patch.num_qubits();
  IncoherentShot shot;
  ZSupport total(n, 0);
  std::vector<Syndrome2D> clean;
  clean.reserve(rounds);
  for (int r = 0; r < rounds; ++r) {
    ZSupport err(n, 0);
    if (p > 0.0) {
      for (int k = 0; k < n; ++k) {
        if (rng.bernoulli(p)) {
          err[k] = 1;
          total[k] ^= 1;
        }
      }
    }
    clean.push_back(syndrome_of(total, patch));
    shot.z_errors_per_round.push_back(std::move(err));
  }
  shot.recorded = apply_readout_noise(clean, q, rng);
  shot.correction = mwpm_decode(graph, detection_events(shot.recorded)).z_support;
  ZSupport residual = shot.correction;
  for (int k = 0; k < n; ++k) residual[k] ^= total[k];
  shot.failure = logical_class(residual, patch) == LogicalClass::LogicalZ;
  return shot;
}

double FailureEstimate::error() const {
  if (shots == 0) return 0.0;
  const double f = rate();
  return std::sqrt(f * (1 - f) / double(shots));
}

FailureEstimate estimate_incoherent_failure(const DetectionGraph& graph, double p, double q,
                                            int rounds, std::int64_t shots, std::uint64_t seed,
                                            std::uint64_t stream, int workers) {
  workers = std::max(1, workers);
  std::vector<std::int64_t> failures(workers, 0);
  auto run = [&](int w) {
    for (std::int64_t k = w; k < shots; k += workers) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k), stream));
      failures[w] += simulate_incoherent_shot(graph, p, q, rounds, rng).failure;
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  FailureEstimate out{shots, 0};
  for (auto f : failures) out.failures += f;
  return out;
}

}  // namespace flosurf
