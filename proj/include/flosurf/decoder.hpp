#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "flosurf/coherent_sampler.hpp"
#include "flosurf/lattice.hpp"
#include "flosurf/rng.hpp"
#include "flosurf/types.hpp"

namespace flosurf {

/// Recorded syndromes of all rounds; the last round is always exact.
struct NoisySyndrome3D {
  std::vector<Syndrome2D> s_prime_rounds;
};

/// X face whose recorded value changed between round - 1 and round
/// (round 0 compares against the +1 initialisation).
struct DetectionEvent {
  int face;
  int round;

  bool operator==(const DetectionEvent&) const = default;
};

/// Edge weights ln((1-p)/p) for spacelike and ln((1-q)/q) for timelike
/// edges. A zero rate gives kInfiniteWeight.
struct EdgeWeights {
  static constexpr double kInfiniteWeight = 1e6;

  double spacelike = 1.0;
  double timelike = 1.0;

  static EdgeWeights from_rates(double p, double q);
};

enum class Boundary { Left, Right };

/// Matching graph of the X checks over rounds. Vertices are (face, round)
/// plus a left and a right boundary; spacelike edges join faces sharing a
/// qubit (or a face and the boundary through an edge-column qubit), timelike
/// edges join (f, t) and (f, t+1). Distances are exact shortest-path
/// lengths, with weights scaled to integers so ties are preserved.
class DetectionGraph {
 public:
  DetectionGraph(const CodePatch& patch, EdgeWeights weights);

  const CodePatch& patch() const { return *patch_; }
  const EdgeWeights& weights() const { return weights_; }
  int num_faces() const { return static_cast<int>(patch_->x_faces.size()); }

  /// Number of spacelike edges on a shortest face-to-face path.
  int face_hops(int f1, int f2) const { return hops_[f1 * num_faces() + f2]; }
  /// Number of spacelike edges to the nearer boundary, and which one
  /// (left on ties).
  int boundary_hops(int f) const { return boundary_hops_[f]; }
  Boundary nearest_boundary(int f) const { return nearest_[f]; }

  std::int64_t spacelike_unit() const { return ws_; }
  std::int64_t timelike_unit() const { return wt_; }

  std::int64_t distance(const DetectionEvent& a, const DetectionEvent& b) const;
  std::int64_t boundary_distance(const DetectionEvent& a) const;
  /// Same quantities in the original (real) weights.
  double real_distance(const DetectionEvent& a, const DetectionEvent& b) const;
  double real_boundary_distance(const DetectionEvent& a) const;

  /// XORs the qubits of a shortest path between two faces into `z`.
  void flip_path(int f1, int f2, ZSupport& z) const;
  /// XORs the qubits of a shortest path from f to its nearest boundary.
  void flip_boundary_path(int f, ZSupport& z) const;

 private:
  void build_paths();

  const CodePatch* patch_;
  EdgeWeights weights_;
  std::int64_t ws_ = 1;
  std::int64_t wt_ = 1;
  // Face adjacency: for each face, (neighbour face or -1 left / -2 right, qubit).
  std::vector<std::vector<std::pair<int, int>>> adj_;
  std::vector<int> hops_;
  // next_[src * F + dst] = (next face, qubit crossed) on a shortest path.
  std::vector<std::pair<int, int>> next_;
  std::vector<int> boundary_hops_;
  std::vector<Boundary> nearest_;
  std::vector<std::pair<int, int>> boundary_next_;
};

/// Pairing chosen by the decoder: indices into the event list, second = -1
/// for a boundary match.
struct Correction {
  ZSupport z_support;
  std::vector<std::pair<int, int>> matched_pairs;
  std::int64_t total_weight = 0;
};

/// Flips every recorded outcome of rounds 1..R-1 with probability q; the
/// last round is copied. Throws for q outside [0, 1/2).
NoisySyndrome3D apply_readout_noise(const RoundsRecord& record, double q, Rng& rng);
NoisySyndrome3D apply_readout_noise(const std::vector<Syndrome2D>& rounds, double q, Rng& rng);

std::vector<DetectionEvent> detection_events(const NoisySyndrome3D& noisy);

/// Exact minimum-weight perfect matching of the events to each other or to
/// the boundary, with the matched paths turned into a Z string.
Correction mwpm_decode(const DetectionGraph& graph, std::span<const DetectionEvent> events);

/// Single-round decoding of a perfectly measured syndrome.
ZSupport decode_2d(const DetectionGraph& graph, const Syndrome2D& s);

/// X syndrome of a Z string.
Syndrome2D syndrome_of(const ZSupport& z, const CodePatch& patch);

enum class LogicalClass { Identity, LogicalZ };

/// Class of a Z string with trivial syndrome: logical Z iff it overlaps
/// the logical X support on an odd number of qubits. Throws std::logic_error
/// if the syndrome is not trivial.
LogicalClass logical_class(const ZSupport& z, const CodePatch& patch);

/// theta* or theta* + pi/2, folded into (-pi/2, pi/2].
double final_angle(double theta_star, LogicalClass cls);

}  // namespace flosurf
