#include "flosurf/coherent_sampler.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace flosurf {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

AngleAssignment shifted(const AngleAssignment& base, const ZSupport& support) {
  AngleAssignment out = base;
  for (std::size_t q = 0; q < support.size(); ++q) {
    if (support[q]) out.theta[q] += kHalfPi;
  }
  return out;
}

// Estimate of cos(2 theta) or sin(2 theta) from the log probabilities with
// and without the extra logical Z.
double contrast(double log_without, double log_with) {
  const double inf = std::numeric_limits<double>::infinity();
  if (log_without == -inf && log_with == -inf) {
    throw FloError("both all-plus runs have zero probability; the correction is inconsistent");
  }
  return std::tanh((log_without - log_with) / 2);
}

}  // namespace

CoherentSampler::CoherentSampler(const CodePatch& patch, const MajoranaNetwork& network,
                                 UpdatePath path)
    : patch_(&patch), network_(&network) {
  const auto plus_pairs = network.initial_pairs(LogicalBasis::Plus);
  const auto y_pairs = network.initial_pairs(LogicalBasis::Y);
  plus_ = init_pair_stabilized<double>(plus_pairs, network.mode_count());
  y_ = init_pair_stabilized<double>(y_pairs, network.mode_count());
  plus_.set_update_path(path);
  y_.set_update_path(path);
  work_ = plus_;
}

void CoherentSampler::run_qubit_rotation(int k, double theta) {
  // exp(i theta Z) with Z = i c2 c3 equals exp(theta c3 c2).
  const MajoranaPair z = network_->pauli_reps[k].z;
  work_.rotate(theta, z.second, z.first);
}

MSyndrome CoherentSampler::sample_m(const AngleAssignment& angles, Rng& rng) {
  const int n = patch_->num_qubits();
  if (static_cast<int>(angles.theta.size()) != n) throw std::invalid_argument("angle count mismatch");
  work_ = plus_;
  stats_ = {};
  MSyndrome out;
  out.m.resize(n);
  for (int k = 0; k < n; ++k) {
    run_qubit_rotation(k, angles.theta[k]);
    const int c1 = 4 * k, c2 = 4 * k + 1, c3 = 4 * k + 2, c4 = 4 * k + 3;
    const double mx = work_(c1, c2);
    const double msx = work_(c3, c4);
    const double cross = work_(c1, c4) * work_(c2, c3) - work_(c1, c3) * work_(c2, c4);
    // Joint probabilities of X = m and then S X = m, from Wick's theorem.
    const double w_plus = std::max(0.0, (1 + mx + msx + mx * msx + cross) / 4);
    const double w_minus = std::max(0.0, (1 - mx - msx + mx * msx + cross) / 4);
    const double total = w_plus + w_minus;
    const double expected = k + 1 == n ? 1.0 : 0.5;
    stats_.normalization_error = std::max(stats_.normalization_error, std::abs(total - expected));
    if (total <= 0.0) throw FloError("qubit has no admissible m outcome");
    const bool plus = rng.uniform() * total < w_plus;
    out.m[k] = plus ? 1 : -1;
    stats_.log_probability += std::log((plus ? w_plus : w_minus) / total);
    if (plus) {
      work_.project(c1, c2);
      work_.project(c3, c4);
    } else {
      work_.project(c2, c1);
      work_.project(c4, c3);
    }
  }
  return out;
}

double CoherentSampler::all_plus_log_probability(const AngleAssignment& angles, LogicalBasis basis) {
  const int n = patch_->num_qubits();
  work_ = basis == LogicalBasis::Plus ? plus_ : y_;
  double log_p = 0.0;
  for (int k = 0; k < n; ++k) {
    run_qubit_rotation(k, angles.theta[k]);
    const auto& reps = network_->pauli_reps[k];
    for (const MajoranaPair& pair : {reps.x, reps.sx}) {
      const double p = work_.probability(pair.first, pair.second);
      if (p < kMeasureEpsilon) return -std::numeric_limits<double>::infinity();
      work_.project(pair.first, pair.second);
      log_p += std::log(p);
    }
  }
  return log_p;
}

LogicalAngle CoherentSampler::logical_angle(const AngleAssignment& angles, const ZSupport& correction) {
  const AngleAssignment corrected = shifted(angles, correction);
  ZSupport top(patch_->num_qubits(), 0);
  for (int q : patch_->z_logical_support) top[q] = 1;
  const AngleAssignment flipped = shifted(corrected, top);

  const double cos2 = contrast(all_plus_log_probability(corrected, LogicalBasis::Plus),
                               all_plus_log_probability(flipped, LogicalBasis::Plus));
  const double sin2 = contrast(all_plus_log_probability(corrected, LogicalBasis::Y),
                               all_plus_log_probability(flipped, LogicalBasis::Y));
  LogicalAngle out;
  out.theta = fold_angle(0.5 * std::atan2(sin2, cos2));
  out.consistency = std::abs(cos2 * cos2 + sin2 * sin2 - 1.0);
  return out;
}

RoundsRecord CoherentSampler::sample_rounds(double theta, int rounds, const Decode2D& decode,
                                            Rng& rng, std::vector<MSyndrome>* m_rounds) {
  if (rounds < 1) throw std::invalid_argument("at least one round is required");
  const int n = patch_->num_qubits();
  const AngleAssignment base = AngleAssignment::homogeneous(n, theta);
  RoundsRecord record;
  ZSupport previous(n, 0);
  double total = 0.0;
  for (int r = 0; r < rounds; ++r) {
    const AngleAssignment angles = shifted(base, previous);
    MSyndrome m = sample_m(angles, rng);
    Syndrome2D s = syndrome_from_m(m, *patch_);
    ZSupport correction = decode(s);
    const double theta_l = logical_angle(angles, correction).theta;
    record.theta_round.push_back(theta_l);
    record.s_rounds.push_back(std::move(s));
    if (m_rounds) m_rounds->push_back(std::move(m));
    total += theta_l;
    previous = std::move(correction);
  }
  record.theta_star = fold_angle(total);
  return record;
}

Syndrome2D syndrome_from_m(const MSyndrome& m, const CodePatch& patch) {
  if (static_cast<int>(m.m.size()) != patch.num_qubits()) throw std::invalid_argument("m length mismatch");
  Syndrome2D s;
  s.s.reserve(patch.x_faces.size());
  for (const Face& f : patch.x_faces) {
    int v = 1;
    for (int q : f.qubits) v *= m.m[q];
    s.s.push_back(static_cast<std::int8_t>(v));
  }
  return s;
}

MSyndrome sample_m(const CodePatch& patch, const MajoranaNetwork& network,
                   const AngleAssignment& angles, Rng& rng) {
  CoherentSampler sampler(patch, network);
  return sampler.sample_m(angles, rng);
}

RoundsRecord sample_rounds(const CodePatch& patch, const MajoranaNetwork& network, double theta,
                           int rounds, const Decode2D& decode, Rng& rng) {
  CoherentSampler sampler(patch, network);
  return sampler.sample_rounds(theta, rounds, decode, rng);
}

void write_trace_line(std::ostream& out, std::size_t shot, const RoundsRecord& record,
                      const std::vector<MSyndrome>& m_rounds) {
  nlohmann::json line;
  line["shot"] = shot;
  nlohmann::json ms = nlohmann::json::array();
  for (const auto& m : m_rounds) ms.push_back(m.m);
  line["m"] = ms;
  nlohmann::json ss = nlohmann::json::array();
  for (const auto& s : record.s_rounds) ss.push_back(s.s);
  line["s"] = ss;
  line["theta_round"] = record.theta_round;
  line["theta_star"] = record.theta_star;
  out << line.dump() << '\n';
}

}  // namespace flosurf
