#include "flosurf/decoder.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

using namespace flosurf;

namespace {

// Exhaustive minimum over pairings of events with each other or the boundary.
double brute_force_weight(const DetectionGraph& g, const std::vector<DetectionEvent>& ev) {
  const int k = static_cast<int>(ev.size());
  std::vector<char> used(k, 0);
  std::function<double()> rec = [&]() -> double {
    int i = 0;
    while (i < k && used[i]) ++i;
    if (i == k) return 0.0;
    used[i] = 1;
    double best = g.real_boundary_distance(ev[i]) + rec();
    for (int j = i + 1; j < k; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      best = std::min(best, g.real_distance(ev[i], ev[j]) + rec());
      used[j] = 0;
    }
    used[i] = 0;
    return best;
  };
  return rec();
}

double real_weight(const DetectionGraph& g, const std::vector<DetectionEvent>& ev, const Correction& c) {
  double w = 0.0;
  for (const auto& [i, j] : c.matched_pairs) {
    w += j < 0 ? g.real_boundary_distance(ev[i]) : g.real_distance(ev[i], ev[j]);
  }
  return w;
}

// Noiseless syndromes of accumulated random Z errors.
std::vector<Syndrome2D> random_history(const CodePatch& p, double pz, int rounds, Rng& rng,
                                       ZSupport& total) {
  total.assign(p.num_qubits(), 0);
  std::vector<Syndrome2D> out;
  for (int r = 0; r < rounds; ++r) {
    for (auto& z : total) {
      if (rng.bernoulli(pz)) z ^= 1;
    }
    out.push_back(syndrome_of(total, p));
  }
  return out;
}

int weight(const ZSupport& z) {
  int w = 0;
  for (auto v : z) w += v;
  return w;
}

}  // namespace

TEST(EdgeWeights, LogOdds) {
  const auto w = EdgeWeights::from_rates(0.1, 0.2);
  EXPECT_NEAR(w.spacelike, std::log(9.0), 1e-15);
  EXPECT_NEAR(w.timelike, std::log(4.0), 1e-15);
  EXPECT_EQ(EdgeWeights::from_rates(0.0, 0.1).spacelike, EdgeWeights::kInfiniteWeight);
  EXPECT_THROW(EdgeWeights::from_rates(0.5, 0.1), std::invalid_argument);
  EXPECT_THROW(EdgeWeights::from_rates(0.1, -0.1), std::invalid_argument);
  const auto eq = EdgeWeights::from_rates(0.03, 0.03);
  EXPECT_EQ(eq.spacelike, eq.timelike);
}

TEST(DetectionGraph, DistanceThreeGeometry) {
  const CodePatch p = build_patch(3);
  const DetectionGraph g(p, EdgeWeights{1.0, 1.0});
  for (int f = 0; f < g.num_faces(); ++f) {
    EXPECT_EQ(g.boundary_hops(f), 1);
    EXPECT_EQ(g.face_hops(f, f), 0);
  }
  EXPECT_EQ(g.spacelike_unit(), g.timelike_unit());
}

TEST(DetectionGraph, PathsReproduceFaceSyndrome) {
  for (int d : {3, 5, 7}) {
    const CodePatch p = build_patch(d);
    const DetectionGraph g(p, EdgeWeights{1.0, 1.0});
    for (int a = 0; a < g.num_faces(); ++a) {
      ZSupport z(p.num_qubits(), 0);
      g.flip_boundary_path(a, z);
      EXPECT_EQ(weight(z), g.boundary_hops(a));
      Syndrome2D s = syndrome_of(z, p);
      for (int f = 0; f < g.num_faces(); ++f) EXPECT_EQ(s.s[f], f == a ? -1 : 1);
      for (int b = 0; b < g.num_faces(); ++b) {
        ZSupport zz(p.num_qubits(), 0);
        g.flip_path(a, b, zz);
        EXPECT_EQ(weight(zz), g.face_hops(a, b));
        const Syndrome2D ss = syndrome_of(zz, p);
        for (int f = 0; f < g.num_faces(); ++f) EXPECT_EQ(ss.s[f], (f == a) != (f == b) ? -1 : 1);
      }
    }
  }
}

TEST(Readout, ZeroRateIsIdentity) {
  const CodePatch p = build_patch(3);
  Rng rng(1);
  ZSupport total;
  const auto rounds = random_history(p, 0.2, 3, rng, total);
  EXPECT_EQ(apply_readout_noise(rounds, 0.0, rng).s_prime_rounds, rounds);
  EXPECT_THROW(apply_readout_noise(rounds, 0.5, rng), std::invalid_argument);
}

TEST(Readout, FlipFractionAndCleanLastRound) {
  const CodePatch p = build_patch(5);
  Rng rng(2);
  const std::vector<Syndrome2D> clean(5, Syndrome2D{std::vector<std::int8_t>(p.x_faces.size(), 1)});
  long flips = 0;
  long total = 0;
  for (int shot = 0; shot < 2100; ++shot) {
    const auto noisy = apply_readout_noise(clean, 0.03, rng);
    EXPECT_EQ(noisy.s_prime_rounds.back(), clean.back());
    for (int t = 0; t < 4; ++t) {
      for (auto v : noisy.s_prime_rounds[t].s) {
        flips += v == -1;
        ++total;
      }
    }
  }
  ASSERT_GE(total, 100000);
  EXPECT_NEAR(double(flips) / total, 0.03, 0.002);
}

TEST(DetectionEvents, Differences) {
  const std::size_t nf = 4;
  const Syndrome2D triv{std::vector<std::int8_t>(nf, 1)};
  EXPECT_TRUE(detection_events({{triv, triv, triv}}).empty());
  // A single misrecorded value in a middle round marks it and the next round.
  Syndrome2D flipped = triv;
  flipped.s[2] = -1;
  const auto ev = detection_events({{triv, flipped, triv}});
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0], (DetectionEvent{2, 1}));
  EXPECT_EQ(ev[1], (DetectionEvent{2, 2}));
}

TEST(DetectionEvents, PersistingErrorMarksBothFacesOnce) {
  const CodePatch p = build_patch(3);
  ZSupport z(9, 0);
  z[4] = 1;  // centre qubit, shared by two X faces
  const Syndrome2D triv{std::vector<std::int8_t>(p.x_faces.size(), 1)};
  const Syndrome2D s = syndrome_of(z, p);
  const auto ev = detection_events({{triv, s, s}});
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0].round, 1);
  EXPECT_EQ(ev[1].round, 1);
  EXPECT_EQ(p.x_faces_of(4), (std::vector<int>{ev[0].face, ev[1].face}));
}

TEST(Mwpm, EmptyEventsGiveEmptyCorrection) {
  const CodePatch p = build_patch(5);
  const DetectionGraph g(p, EdgeWeights{1.0, 1.0});
  const Correction c = mwpm_decode(g, {});
  EXPECT_EQ(weight(c.z_support), 0);
  EXPECT_TRUE(c.matched_pairs.empty());
}

TEST(Mwpm, WorkedExampleNeedsTwoZ) {
  // d = 3 over three rounds: a Z error on the centre qubit before the
  // second round, a misrecorded face in the second round, and the last
  // round read perfectly.
  const CodePatch p = build_patch(3);
  const DetectionGraph g(p, EdgeWeights::from_rates(0.05, 0.05));
  ZSupport err(9, 0);
  err[4] = 1;
  const Syndrome2D triv{std::vector<std::int8_t>(p.x_faces.size(), 1)};
  const Syndrome2D s = syndrome_of(err, p);
  NoisySyndrome3D noisy{{triv, s, s}};
  const int other = p.x_faces_of(0).front();
  noisy.s_prime_rounds[1].s[other] = static_cast<std::int8_t>(-noisy.s_prime_rounds[1].s[other]);
  const auto ev = detection_events(noisy);
  EXPECT_EQ(ev.size(), 4u);
  const Correction c = mwpm_decode(g, ev);
  // Correction acts on the perfect final syndrome and the combination with
  // the actual error is a stabiliser.
  EXPECT_EQ(syndrome_of(c.z_support, p), s);
  ZSupport residual = c.z_support;
  for (int q = 0; q < 9; ++q) residual[q] ^= err[q];
  EXPECT_EQ(logical_class(residual, p), LogicalClass::Identity);
  EXPECT_EQ(weight(c.z_support), 1);

  // Two corner errors seen in the second round and a misrecorded centre
  // face in the first. With q > p the readout flip is cheaper to explain
  // than a spacelike detour, so only the two corners are corrected.
  const DetectionGraph g2(p, EdgeWeights::from_rates(0.02, 0.1));
  ZSupport err2(9, 0);
  err2[0] = 1;
  err2[8] = 1;
  const Syndrome2D s2 = syndrome_of(err2, p);
  NoisySyndrome3D noisy2{{triv, s2, s2}};
  noisy2.s_prime_rounds[0].s[p.x_faces_of(4).front()] *= -1;
  const Correction c2 = mwpm_decode(g2, detection_events(noisy2));
  EXPECT_EQ(c2.matched_pairs.size(), 3u);
  EXPECT_EQ(weight(c2.z_support), 2);
  EXPECT_EQ(c2.z_support, err2);
}

TEST(Mwpm, MatchesBruteForceOnRandomInstances) {
  const CodePatch p = build_patch(3);
  const DetectionGraph g(p, EdgeWeights::from_rates(0.05, 0.05));
  Rng rng(123);
  int checked = 0;
  while (checked < 1000) {
    ZSupport total;
    auto rounds = random_history(p, 0.05, 3, rng, total);
    const auto noisy = apply_readout_noise(rounds, 0.05, rng);
    const auto ev = detection_events(noisy);
    if (ev.empty() || ev.size() > 8) continue;
    const Correction c = mwpm_decode(g, ev);
    EXPECT_NEAR(real_weight(g, ev, c), brute_force_weight(g, ev), 1e-9);
    EXPECT_EQ(syndrome_of(c.z_support, p), noisy.s_prime_rounds.back());
    ++checked;
  }
}

TEST(Mwpm, ExactOnLargerPatchesAgainstBruteForce) {
  const CodePatch p = build_patch(7);
  const DetectionGraph g(p, EdgeWeights::from_rates(0.02, 0.05));
  Rng rng(5);
  int checked = 0;
  while (checked < 300) {
    ZSupport total;
    auto rounds = random_history(p, 0.02, 4, rng, total);
    const auto noisy = apply_readout_noise(rounds, 0.05, rng);
    const auto ev = detection_events(noisy);
    if (ev.empty() || ev.size() > 10) continue;
    const Correction c = mwpm_decode(g, ev);
    EXPECT_NEAR(real_weight(g, ev, c), brute_force_weight(g, ev), 1e-6);
    ++checked;
  }
}

TEST(Mwpm, InvariantUnderUniformScaling) {
  const CodePatch p = build_patch(5);
  const DetectionGraph a(p, EdgeWeights{2.0, 2.0});
  const DetectionGraph b(p, EdgeWeights{7.5, 7.5});
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    ZSupport total;
    auto rounds = random_history(p, 0.04, 5, rng, total);
    const auto ev = detection_events(apply_readout_noise(rounds, 0.04, rng));
    EXPECT_EQ(mwpm_decode(a, ev).z_support, mwpm_decode(b, ev).z_support);
  }
}

TEST(Decode2D, ReturnsToCodeSpace) {
  for (int d : {3, 5, 9}) {
    const CodePatch p = build_patch(d);
    const DetectionGraph g(p, EdgeWeights{1.0, 1.0});
    Rng rng(d);
    for (int trial = 0; trial < 200; ++trial) {
      ZSupport err(p.num_qubits(), 0);
      for (auto& z : err) z = rng.bernoulli(0.1);
      const Syndrome2D s = syndrome_of(err, p);
      const ZSupport c = decode_2d(g, s);
      EXPECT_EQ(syndrome_of(c, p), s);
    }
  }
}

TEST(LogicalClass, Examples) {
  const CodePatch p = build_patch(3);
  ZSupport z(9, 0);
  EXPECT_EQ(logical_class(z, p), LogicalClass::Identity);
  for (int q : p.z_logical_support) z[q] = 1;
  EXPECT_EQ(logical_class(z, p), LogicalClass::LogicalZ);
  ZSupport stab(9, 0);
  for (int q : p.z_faces.front().qubits) stab[q] = 1;
  EXPECT_EQ(logical_class(stab, p), LogicalClass::Identity);
  ZSupport bad(9, 0);
  bad[4] = 1;
  EXPECT_THROW(logical_class(bad, p), std::logic_error);
}

TEST(FinalAngle, AddsQuarterTurnForLogicalZ) {
  const double pi = std::numbers::pi;
  EXPECT_DOUBLE_EQ(final_angle(0.2, LogicalClass::Identity), 0.2);
  EXPECT_NEAR(final_angle(0.2, LogicalClass::LogicalZ), 0.2 + pi / 2 - pi, 1e-15);
  EXPECT_NEAR(final_angle(0.0, LogicalClass::LogicalZ), pi / 2, 1e-15);
  EXPECT_NEAR(std::pow(std::sin(final_angle(0.0, LogicalClass::LogicalZ)), 2), 1.0, 1e-15);
}
