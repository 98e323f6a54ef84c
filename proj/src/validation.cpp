#include "flosurf/validation.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "flosurf/coherent_sampler.hpp"
#include "flosurf/covariance.hpp"
#include "flosurf/oracle.hpp"
#include "flosurf/pfaffian.hpp"

namespace flosurf {

namespace {

using oracle::FermionOp;

Eigen::MatrixXd random_antisymmetric(int n, std::mt19937_64& gen) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      a(i, j) = g(gen);
      a(j, i) = -a(i, j);
    }
  }
  return a;
}

double angle_distance(double a, double b) { return std::abs(fold_angle(a - b)); }

struct D3 {
  D3()
      : patch(build_patch(3)),
        network(build_majorana_network(patch)),
        graph(patch, EdgeWeights{1.0, 1.0}),
        decode([this](const Syndrome2D& s) { return decode_2d(graph, s); }) {}
  CodePatch patch;
  MajoranaNetwork network;
  DetectionGraph graph;
  Decode2D decode;
};

}  // namespace

double pfaffian_by_expansion(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  if (n == 0) return 1.0;
  if (n % 2) return 0.0;
  double total = 0.0;
  for (Eigen::Index j = 1; j < n; ++j) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 1; k < n; ++k) {
      if (k != j) keep.push_back(k);
    }
    Eigen::MatrixXd minor(n - 2, n - 2);
    for (std::size_t r = 0; r < keep.size(); ++r) {
      for (std::size_t c = 0; c < keep.size(); ++c) minor(r, c) = a(keep[r], keep[c]);
    }
    total += (j % 2 == 1 ? 1.0 : -1.0) * a(0, j) * pfaffian_by_expansion(minor);
  }
  return total;
}

double pfaffian_max_error(int trials, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    for (int n : {2, 4, 6, 8}) {
      const Eigen::MatrixXd a = random_antisymmetric(n, gen);
      const double ref = pfaffian_by_expansion(a);
      worst = std::max(worst, std::abs(pfaffian(a) - ref) / std::max(1.0, std::abs(ref)));
    }
  }
  return worst;
}

double flo_vs_dense_max_error(int trials, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  double worst = 0.0;
  int done = 0;
  while (done < trials) {
    const int modes = 2 + done % 3;
    std::uniform_int_distribution<int> idx(0, 2 * modes - 1);
    std::vector<MajoranaPair> pairs;
    for (int k = 0; k < modes; ++k) pairs.push_back({2 * k, 2 * k + 1});
    std::vector<FermionOp> ops;
    for (int k = 0; k < 12; ++k) {
      int p = idx(gen), q = idx(gen);
      while (q == p) q = idx(gen);
      if (k % 4 == 3) {
        ops.push_back({FermionOp::Kind::Project, p, q});
      } else {
        ops.push_back({FermionOp::Kind::Rotate, p, q, ang(gen)});
      }
    }
    // Skip sequences with a near-impossible projection.
    bool usable = true;
    for (UpdatePath path : {UpdatePath::Active, UpdatePath::Full}) {
      auto m = init_pair_stabilized<double>(pairs, modes);
      m.set_update_path(path);
      std::vector<double> probs;
      for (const auto& op : ops) {
        if (op.kind == FermionOp::Kind::Rotate) {
          m.rotate(op.theta, op.p, op.q);
        } else if (m.probability(op.p, op.q) < 1e-3) {
          usable = false;
          break;
        } else {
          probs.push_back(m.project(op.p, op.q));
        }
      }
      if (!usable) break;
      const auto dense = oracle::dense_fermion_check(pairs, ops, modes);
      worst = std::max(worst, (m.matrix() - dense.covariance).cwiseAbs().maxCoeff());
      for (std::size_t k = 0; k < probs.size(); ++k) {
        worst = std::max(worst, std::abs(probs[k] - dense.probabilities[k]));
      }
    }
    if (usable) ++done;
  }
  return worst;
}

SamplerOracleReport sampler_vs_oracle(double theta, std::int64_t shots, std::uint64_t seed) {
  D3 fx;
  const AngleAssignment angles = AngleAssignment::homogeneous(9, theta);
  const auto plus = oracle::enumerate_syndromes(fx.patch, angles, 1, fx.decode);
  const auto y = oracle::enumerate_syndromes(fx.patch, angles, 1, fx.decode, oracle::LogicalState::Y);
  SamplerOracleReport r;
  CoherentSampler sampler(fx.patch, fx.network);
  std::map<std::vector<std::int8_t>, double> exact;
  double total = 0.0;
  for (std::size_t i = 0; i < plus.size(); ++i) {
    const auto& b = plus[i];
    total += b.probability;
    exact[b.rounds[0].s] = b.probability;
    const double tl = sampler.logical_angle(angles, fx.decode(b.rounds[0])).theta;
    r.max_angle_error = std::max(r.max_angle_error, angle_distance(tl, b.theta_star));
  }
  r.probability_defect = std::abs(total - 1.0);
  if (plus.size() != y.size()) {
    r.plus_y_difference = std::numeric_limits<double>::infinity();
  } else {
    for (std::size_t i = 0; i < plus.size(); ++i) {
      r.plus_y_difference = std::max({r.plus_y_difference,
                                      std::abs(plus[i].probability - y[i].probability),
                                      angle_distance(plus[i].theta_star, y[i].theta_star)});
    }
  }
  std::map<std::vector<std::int8_t>, std::int64_t> counts;
  Rng rng(seed);
  for (std::int64_t k = 0; k < shots; ++k) {
    ++counts[syndrome_from_m(sampler.sample_m(angles, rng), fx.patch).s];
  }
  double tvd = 0.0;
  for (const auto& [key, p] : exact) {
    const auto it = counts.find(key);
    tvd += std::abs(p - (it == counts.end() ? 0.0 : double(it->second) / shots));
  }
  for (const auto& [key, c] : counts) {
    if (!exact.contains(key)) tvd += double(c) / shots;
  }
  r.tvd = tvd / 2;
  return r;
}

double multi_round_max_error(double theta, int rounds) {
  D3 fx;
  const AngleAssignment base = AngleAssignment::homogeneous(9, theta);
  CoherentSampler sampler(fx.patch, fx.network);
  double worst = 0.0;
  for (const auto& b : oracle::enumerate_syndromes(fx.patch, base, rounds, fx.decode)) {
    ZSupport previous(9, 0);
    double total = 0.0;
    for (const auto& s : b.rounds) {
      AngleAssignment a = base;
      for (int k = 0; k < 9; ++k) {
        if (previous[k]) a.theta[k] += std::numbers::pi / 2;
      }
      const ZSupport c = fx.decode(s);
      total += sampler.logical_angle(a, c).theta;
      previous = c;
    }
    worst = std::max(worst, angle_distance(fold_angle(total), b.theta_star));
  }
  return worst;
}

double brute_force_matching_weight(const DetectionGraph& g, const std::vector<DetectionEvent>& ev) {
  const int k = static_cast<int>(ev.size());
  if (k > 24) throw std::invalid_argument("too many events for exhaustive matching");
  const std::uint32_t full = k ? (1u << k) - 1 : 0;
  std::vector<double> best(full + 1, std::numeric_limits<double>::infinity());
  best[0] = 0.0;
  for (std::uint32_t m = 1; m <= full; ++m) {
    const int i = std::countr_zero(m);
    const std::uint32_t rest = m & ~(1u << i);
    double b = best[rest] + g.real_boundary_distance(ev[i]);
    for (int j = i + 1; j < k; ++j) {
      if (rest >> j & 1) b = std::min(b, best[rest & ~(1u << j)] + g.real_distance(ev[i], ev[j]));
    }
    best[m] = b;
  }
  return best[full];
}

DecoderReport decoder_vs_brute_force(int instances, double rate, int max_events, std::uint64_t seed) {
  const CodePatch patch = build_patch(3);
  const DetectionGraph g(patch, EdgeWeights::from_rates(rate, rate));
  Rng rng(seed);
  DecoderReport r;
  while (r.instances < instances) {
    ZSupport total(9, 0);
    std::vector<Syndrome2D> rounds;
    for (int t = 0; t < 3; ++t) {
      for (auto& z : total) z ^= rng.bernoulli(rate);
      rounds.push_back(syndrome_of(total, patch));
    }
    const auto ev = detection_events(apply_readout_noise(rounds, rate, rng));
    if (ev.empty() || static_cast<int>(ev.size()) > max_events) continue;
    const Correction c = mwpm_decode(g, ev);
    double w = 0.0;
    for (const auto& [i, j] : c.matched_pairs) {
      w += j < 0 ? g.real_boundary_distance(ev[i]) : g.real_distance(ev[i], ev[j]);
    }
    r.max_weight_gap = std::max(r.max_weight_gap, std::abs(w - brute_force_matching_weight(g, ev)));
    r.max_events = std::max(r.max_events, static_cast<int>(ev.size()));
    ++r.instances;
  }
  return r;
}

Correction worked_example_correction() {
  static const CodePatch patch = build_patch(3);
  const DetectionGraph g(patch, EdgeWeights::from_rates(0.05, 0.05));
  ZSupport err(9, 0);
  err[0] = 1;
  err[8] = 1;
  const Syndrome2D s = syndrome_of(err, patch);
  NoisySyndrome3D noisy{{s, s, s}};
  const int bulk = patch.x_faces_of(4).front();
  noisy.s_prime_rounds[1].s[bulk] = static_cast<std::int8_t>(-noisy.s_prime_rounds[1].s[bulk]);
  return mwpm_decode(g, detection_events(noisy));
}

std::vector<ValidationCheck> run_validation(std::uint64_t seed) {
  std::vector<ValidationCheck> out;
  auto add = [&](std::string name, double value, double tol) {
    out.push_back({std::move(name), value <= tol, value, tol});
  };
  add("pfaffian vs expansion (relative)", pfaffian_max_error(20, seed), 1e-12);
  add("FLO vs dense fermion oracle", flo_vs_dense_max_error(60, seed), 1e-10);
  double net = 0.0;
  for (int d = 1; d <= 9; d += 2) {
    const CodePatch p = build_patch(d);
    net += verify_network(p, build_majorana_network(p)).ok() ? 0.0 : 1.0;
  }
  add("Majorana network verification d=1..9 (failures)", net, 0.0);
  for (double theta : {0.1, 0.2, 0.3}) {
    const auto r = sampler_vs_oracle(theta, 100000, derive_seed(seed, 1, std::bit_cast<std::uint64_t>(theta)));
    const std::string t = std::to_string(theta).substr(0, 3);
    add("sampler syndrome TVD d=3 theta=" + t, r.tvd, 0.01);
    add("per-syndrome theta_L d=3 theta=" + t, r.max_angle_error, 1e-8);
    add("syndrome completeness d=3 theta=" + t, r.probability_defect, 1e-12);
    add("|+_L> vs |Y_L> start d=3 theta=" + t, r.plus_y_difference, 1e-10);
  }
  add("multi-round theta* per branch d=3 rounds=3", multi_round_max_error(0.2, 3), 1e-8);
  const auto dec = decoder_vs_brute_force(1000, 0.05, 8, seed);
  add("MWPM vs exhaustive matching (weight gap)", dec.max_weight_gap, 1e-9);
  int zs = 0;
  for (auto v : worked_example_correction().z_support) zs += v;
  add("worked d=3 example Z count minus 2", std::abs(zs - 2), 0.0);
  return out;
}

}  // namespace flosurf
