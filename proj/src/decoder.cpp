#include "flosurf/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "flosurf/blossom.hpp"

namespace flosurf {

namespace {

constexpr int kLeft = -1;
constexpr int kRight = -2;

double log_odds(double r) {
  if (r < 0.0 || r >= 0.5) throw std::invalid_argument("error rate must lie in [0, 1/2)");
  if (r == 0.0) return EdgeWeights::kInfiniteWeight;
  return std::log((1.0 - r) / r);
}

// Disjoint-set forest over event indices.
struct Components {
  explicit Components(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void join(int a, int b) { parent[find(a)] = find(b); }
  std::vector<int> parent;
};

}  // namespace

EdgeWeights EdgeWeights::from_rates(double p, double q) { return {log_odds(p), log_odds(q)}; }

DetectionGraph::DetectionGraph(const CodePatch& patch, EdgeWeights weights)
    : patch_(&patch), weights_(weights) {
  if (!(weights.spacelike > 0) || !(weights.timelike > 0)) {
    throw std::invalid_argument("edge weights must be positive");
  }
  // Integer weights relative to the smaller one; the scale keeps every
  // matching sum far from overflow while preserving ratios to ~1e-6.
  const double unit = std::min(weights.spacelike, weights.timelike);
  const double ratio = std::max(weights.spacelike, weights.timelike) / unit;
  const double scale = std::min(double(1 << 20), std::ldexp(1.0, 40) / ratio);
  ws_ = std::max<std::int64_t>(1, std::llround(weights.spacelike / unit * scale));
  wt_ = std::max<std::int64_t>(1, std::llround(weights.timelike / unit * scale));
  build_paths();
}

void DetectionGraph::build_paths() {
  const int nf = num_faces();
  const int d = patch_->d;
  adj_.assign(nf, {});
  for (int q = 0; q < patch_->num_qubits(); ++q) {
    const auto& faces = patch_->x_faces_of(q);
    if (faces.size() == 2) {
      adj_[faces[0]].push_back({faces[1], q});
      adj_[faces[1]].push_back({faces[0], q});
    } else if (faces.size() == 1) {
      const int side = patch_->col_of(q) == 0 ? kLeft : kRight;
      if (patch_->col_of(q) != 0 && patch_->col_of(q) != d - 1) {
        throw std::logic_error("qubit with a single X face away from the side boundaries");
      }
      adj_[faces[0]].push_back({side, q});
    }
  }

  hops_.assign(nf * nf, -1);
  next_.assign(nf * nf, {-1, -1});
  for (int dst = 0; dst < nf; ++dst) {
    std::deque<int> queue{dst};
    hops_[dst * nf + dst] = 0;
    while (!queue.empty()) {
      const int cur = queue.front();
      queue.pop_front();
      for (const auto& [nb, q] : adj_[cur]) {
        if (nb < 0 || hops_[nb * nf + dst] >= 0) continue;
        hops_[nb * nf + dst] = hops_[cur * nf + dst] + 1;
        next_[nb * nf + dst] = {cur, q};
        queue.push_back(nb);
      }
    }
  }
  for (int a = 0; a < nf; ++a) {
    for (int b = 0; b < nf; ++b) {
      if (hops_[a * nf + b] < 0) throw std::logic_error("X-face graph is disconnected");
    }
  }

  // Shortest paths to each side boundary.
  std::vector<int> dist[2];
  std::vector<std::pair<int, int>> parent[2];
  for (int side = 0; side < 2; ++side) {
    const int tag = side == 0 ? kLeft : kRight;
    dist[side].assign(nf, -1);
    parent[side].assign(nf, {-1, -1});
    std::deque<int> queue;
    for (int f = 0; f < nf; ++f) {
      for (const auto& [nb, q] : adj_[f]) {
        if (nb == tag && dist[side][f] < 0) {
          dist[side][f] = 1;
          parent[side][f] = {tag, q};
          queue.push_back(f);
        }
      }
    }
    while (!queue.empty()) {
      const int cur = queue.front();
      queue.pop_front();
      for (const auto& [nb, q] : adj_[cur]) {
        if (nb < 0 || dist[side][nb] >= 0) continue;
        dist[side][nb] = dist[side][cur] + 1;
        parent[side][nb] = {cur, q};
        queue.push_back(nb);
      }
    }
  }
  boundary_hops_.resize(nf);
  nearest_.resize(nf);
  boundary_next_.resize(2 * nf);
  for (int f = 0; f < nf; ++f) {
    const bool left = dist[0][f] <= dist[1][f];
    boundary_hops_[f] = left ? dist[0][f] : dist[1][f];
    nearest_[f] = left ? Boundary::Left : Boundary::Right;
    boundary_next_[2 * f] = parent[0][f];
    boundary_next_[2 * f + 1] = parent[1][f];
  }
}

std::int64_t DetectionGraph::distance(const DetectionEvent& a, const DetectionEvent& b) const {
  return ws_ * face_hops(a.face, b.face) + wt_ * std::abs(a.round - b.round);
}

std::int64_t DetectionGraph::boundary_distance(const DetectionEvent& a) const {
  return ws_ * boundary_hops(a.face);
}

double DetectionGraph::real_distance(const DetectionEvent& a, const DetectionEvent& b) const {
  return weights_.spacelike * face_hops(a.face, b.face) + weights_.timelike * std::abs(a.round - b.round);
}

double DetectionGraph::real_boundary_distance(const DetectionEvent& a) const {
  return weights_.spacelike * boundary_hops(a.face);
}

void DetectionGraph::flip_path(int f1, int f2, ZSupport& z) const {
  const int nf = num_faces();
  int cur = f1;
  while (cur != f2) {
    const auto [nx, q] = next_[cur * nf + f2];
    z[q] ^= 1;
    cur = nx;
  }
}

void DetectionGraph::flip_boundary_path(int f, ZSupport& z) const {
  const int slot = nearest_[f] == Boundary::Left ? 0 : 1;
  int cur = f;
  while (cur >= 0) {
    const auto [nx, q] = boundary_next_[2 * cur + slot];
    z[q] ^= 1;
    cur = nx;
  }
}

NoisySyndrome3D apply_readout_noise(const std::vector<Syndrome2D>& rounds, double q, Rng& rng) {
  if (q < 0.0 || q >= 0.5) throw std::invalid_argument("readout error rate must lie in [0, 1/2)");
  NoisySyndrome3D out{rounds};
  if (q == 0.0) return out;
  for (std::size_t t = 0; t + 1 < out.s_prime_rounds.size(); ++t) {
    for (auto& v : out.s_prime_rounds[t].s) {
      if (rng.bernoulli(q)) v = static_cast<std::int8_t>(-v);
    }
  }
  return out;
}

NoisySyndrome3D apply_readout_noise(const RoundsRecord& record, double q, Rng& rng) {
  return apply_readout_noise(record.s_rounds, q, rng);
}

std::vector<DetectionEvent> detection_events(const NoisySyndrome3D& noisy) {
  std::vector<DetectionEvent> events;
  const auto& r = noisy.s_prime_rounds;
  for (std::size_t t = 0; t < r.size(); ++t) {
    for (std::size_t f = 0; f < r[t].s.size(); ++f) {
      const int prev = t == 0 ? 1 : r[t - 1].s[f];
      if (r[t].s[f] != prev) events.push_back({static_cast<int>(f), static_cast<int>(t)});
    }
  }
  return events;
}

Correction mwpm_decode(const DetectionGraph& graph, std::span<const DetectionEvent> events) {
  Correction out;
  out.z_support.assign(graph.patch().num_qubits(), 0);
  const int k = static_cast<int>(events.size());
  if (k == 0) return out;

  std::vector<std::int64_t> bdist(k);
  for (int i = 0; i < k; ++i) bdist[i] = graph.boundary_distance(events[i]);
  // A pair is worth joining only if it beats sending both to the boundary.
  std::vector<std::vector<std::pair<int, std::int64_t>>> near(k);
  Components comps(k);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const std::int64_t dij = graph.distance(events[i], events[j]);
      if (dij < bdist[i] + bdist[j]) {
        near[i].push_back({j, dij});
        comps.join(i, j);
      }
    }
  }

  std::vector<std::vector<int>> groups(k);
  for (int i = 0; i < k; ++i) groups[comps.find(i)].push_back(i);
  std::vector<int> local(k, -1);
  for (const auto& members : groups) {
    if (members.empty()) continue;
    const int c = static_cast<int>(members.size());
    if (c == 1) {
      out.matched_pairs.push_back({members[0], -1});
      continue;
    }
    for (int a = 0; a < c; ++a) local[members[a]] = a;
    // Vertex a is event members[a], vertex c + a its private boundary copy.
    std::vector<WeightedEdge> edges;
    for (int a = 0; a < c; ++a) {
      const int i = members[a];
      edges.push_back({a, c + a, bdist[i]});
      for (const auto& [j, dij] : near[i]) {
        edges.push_back({a, local[j], dij});
        edges.push_back({c + a, c + local[j], 0});
      }
    }
    const auto mate = min_weight_perfect_matching(2 * c, edges);
    for (int a = 0; a < c; ++a) {
      if (mate[a] == c + a) {
        out.matched_pairs.push_back({members[a], -1});
      } else if (mate[a] < c && a < mate[a]) {
        out.matched_pairs.push_back({members[a], members[mate[a]]});
      }
    }
  }
  std::sort(out.matched_pairs.begin(), out.matched_pairs.end());
  for (const auto& [i, j] : out.matched_pairs) {
    if (j < 0) {
      graph.flip_boundary_path(events[i].face, out.z_support);
      out.total_weight += bdist[i];
    } else {
      graph.flip_path(events[i].face, events[j].face, out.z_support);
      out.total_weight += graph.distance(events[i], events[j]);
    }
  }
  return out;
}

ZSupport decode_2d(const DetectionGraph& graph, const Syndrome2D& s) {
  std::vector<DetectionEvent> events;
  for (std::size_t f = 0; f < s.s.size(); ++f) {
    if (s.s[f] != 1) events.push_back({static_cast<int>(f), 0});
  }
  return mwpm_decode(graph, events).z_support;
}

Syndrome2D syndrome_of(const ZSupport& z, const CodePatch& patch) {
  Syndrome2D s;
  s.s.reserve(patch.x_faces.size());
  for (const Face& f : patch.x_faces) {
    int parity = 0;
    for (int q : f.qubits) parity ^= z[q];
    s.s.push_back(parity ? -1 : 1);
  }
  return s;
}

LogicalClass logical_class(const ZSupport& z, const CodePatch& patch) {
  if (!syndrome_of(z, patch).trivial()) {
    throw std::logic_error("correction leaves a non-trivial syndrome");
  }
  int parity = 0;
  for (int q : patch.x_logical_support) parity ^= z[q];
  return parity ? LogicalClass::LogicalZ : LogicalClass::Identity;
}

double final_angle(double theta_star, LogicalClass cls) {
  return fold_angle(cls == LogicalClass::LogicalZ ? theta_star + std::numbers::pi / 2 : theta_star);
}

}  // namespace flosurf
