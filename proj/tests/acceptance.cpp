// End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
// if any fails. The threshold sweeps take about an hour on a single core.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "flosurf/experiment.hpp"
#include "flosurf/lattice.hpp"
#include "flosurf/metrics.hpp"
#include "flosurf/rng.hpp"
#include "flosurf/threshold.hpp"
#include "flosurf/validation.hpp"

namespace {

using namespace flosurf;

constexpr std::uint64_t kSeed = 20240611;

// Rates shared by the threshold sweeps and the diamond analysis.
const std::vector<double> kRates = {0.016, 0.019, 0.022, 0.025, 0.028, 0.031, 0.034, 0.037, 0.040};
// Half width of the rate window around a first estimate used for the final
// threshold fit; the quadratic scaling form only holds near the crossing.
constexpr double kFitWindow = 0.0075;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::vector<double> thetas_of(const std::vector<double>& rates) {
  std::vector<double> out;
  for (double p : rates) out.push_back(std::asin(std::sqrt(p)));
  return out;
}

std::vector<CurvePoint> curve(const std::vector<SweepRow>& rows, bool diamond) {
  std::vector<CurvePoint> out;
  for (const auto& r : rows) {
    out.push_back({r.point.d, r.point.p, diamond ? r.metrics.pld : r.metrics.pli,
                   diamond ? r.metrics.pld_err : r.metrics.pli_err});
  }
  return out;
}

// Fit over all rates, then refit on the rates within kFitWindow of the
// first estimate.
ThresholdFit windowed_fit(const std::vector<CurvePoint>& points) {
  const ThresholdFit first = fit_threshold(points);
  std::vector<CurvePoint> near;
  std::set<double> rates;
  for (const auto& pt : points) {
    if (std::abs(pt.p - first.p_th) <= kFitWindow + 1e-12) {
      near.push_back(pt);
      rates.insert(pt.p);
    }
  }
  if (rates.size() < 5) return first;
  return fit_threshold(near);
}

void save_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  write_csv(out, rows);
}

Outcome criterion1() {
  const double pf = pfaffian_max_error(50, kSeed);
  const double flo = flo_vs_dense_max_error(200, kSeed);
  return {pf <= 1e-12 && flo <= 1e-10,
          fmt("pfaffian rel err %.2e (tol 1e-12), FLO vs dense %.2e (tol 1e-10)", pf, flo)};
}

Outcome criterion2() {
  const auto r = sampler_vs_oracle(0.3, 100000, kSeed);
  const double multi = multi_round_max_error(0.3, 3);
  return {r.tvd < 0.01 && r.max_angle_error <= 1e-8 && multi <= 1e-8,
          fmt("TVD %.4f (< 0.01), theta_L err %.2e, multi-round theta* err %.2e (tol 1e-8)", r.tvd,
              r.max_angle_error, multi)};
}

Outcome criterion3() {
  const auto r = decoder_vs_brute_force(1000, 0.05, 8, kSeed);
  int zs = 0;
  for (auto v : worked_example_correction().z_support) zs += v;
  return {r.instances == 1000 && r.max_weight_gap <= 1e-9 && zs == 2,
          fmt("%d instances up to %d events, max weight gap %.2e; worked example %d Z", r.instances,
              r.max_events, r.max_weight_gap, zs)};
}

std::vector<SweepRow> incoherent_sweep() {
  SweepConfig c;
  c.pipeline = Pipeline::Incoherent;
  c.d_list = {3, 5, 7, 9, 11};
  c.theta_list = thetas_of(kRates);
  c.q_equals_p = true;
  c.shots = 100000;
  c.master_seed = kSeed;
  c.workers = workers();
  return run_sweep(c);
}

std::vector<SweepRow> coherent_sweep() {
  SweepConfig c;
  c.d_list = {3, 5, 7, 9};
  c.theta_list = thetas_of(kRates);
  c.q_equals_p = true;
  c.shots = 1000;
  c.shots_scale_with_d = true;
  c.resamples = 20;
  c.master_seed = kSeed;
  c.workers = workers();
  return run_sweep(c);
}

Outcome threshold_outcome(const std::vector<SweepRow>& rows, double lo, double hi, double* p_th) {
  try {
    const ThresholdFit fit = windowed_fit(curve(rows, false));
    *p_th = fit.p_th;
    const bool pass = fit.p_th >= lo && fit.p_th <= hi;
    return {pass, fmt("p_th = %.4f +- %.4f, nu = %.3f, chi2/dof = %.1f/%d (window [%.3f, %.3f])",
                      fit.p_th, fit.p_th_err, fit.nu, fit.chi2, fit.dof, lo, hi)};
  } catch (const FitError& e) {
    *p_th = std::nan("");
    return {false, std::string("fit failed: ") + e.what()};
  }
}

// Twirl ratios are checked below p_twirl, the coherence ratio at the rate
// nearest p_near_target.
Outcome criterion6(std::vector<SweepRow>& coherent, const std::vector<SweepRow>& incoherent,
                   double p_twirl, double p_near_target) {
  std::map<std::pair<int, double>, FailureEstimate> baseline;
  for (const auto& r : incoherent) baseline[{r.point.d, r.point.p}] = r.incoherent;
  int bound_violations = 0;
  int twirl_checked = 0, twirl_violations = 0;
  for (auto& r : coherent) {
    attach_twirl(r.metrics, baseline.at({r.point.d, r.point.p}));
    const auto& m = r.metrics;
    if (m.pld < 2 * m.pli || !(m.coh_ratio >= 1.0)) ++bound_violations;
    if (r.point.p < p_twirl) {
      ++twirl_checked;
      if (!(m.twirl_i - 2 * m.twirl_i_err >= 1.0)) ++twirl_violations;
    }
  }
  save_csv("acceptance_coherent.csv", coherent);

  // Coherence ratio at the sampled rate nearest the threshold.
  double p_near = kRates.front();
  for (double p : kRates) {
    if (std::abs(p - p_near_target) < std::abs(p_near - p_near_target)) p_near = p;
  }
  std::vector<const SweepRow*> at;
  for (const auto& r : coherent) {
    if (r.point.p == p_near) at.push_back(&r);
  }
  std::sort(at.begin(), at.end(), [](auto* a, auto* b) { return a->point.d < b->point.d; });
  bool decreasing = at.size() >= 2;
  std::string ratios;
  for (std::size_t i = 0; i < at.size(); ++i) {
    ratios += fmt(" %.3f+-%.3f", at[i]->metrics.coh_ratio, at[i]->metrics.coh_ratio_err);
    if (i == 0) continue;
    const auto& a = at[i - 1]->metrics;
    const auto& b = at[i]->metrics;
    if (!(a.coh_ratio - b.coh_ratio > 2 * std::hypot(a.coh_ratio_err, b.coh_ratio_err))) {
      decreasing = false;
    }
  }
  const bool pass = bound_violations == 0 && twirl_checked > 0 && twirl_violations == 0 && decreasing;
  return {pass, fmt("%d rows, %d bound violations; twirl ratio >= 1 at 2 sigma on %d/%d rows "
                    "below p_th; coherence ratio at p = %.3f over d:%s",
                    int(coherent.size()), bound_violations, twirl_checked - twirl_violations,
                    twirl_checked, p_near, ratios.c_str())};
}

Outcome criterion7() {
  // Perfect readout and a single round: the 3D pipeline must reproduce the
  // 2D angle exactly under the same random stream.
  int mismatches = 0, shots = 0;
  for (int d : {3, 5}) {
    const CodePatch patch = build_patch(d);
    const MajoranaNetwork net = build_majorana_network(patch);
    const DetectionGraph graph(patch, EdgeWeights::from_rates(0.03, 0.0));
    CoherentPipeline a(patch, net, graph), b(patch, net, graph);
    for (int k = 0; k < 500; ++k, ++shots) {
      const double theta = std::asin(std::sqrt(0.03));
      Rng ra(derive_seed(kSeed, d, k)), rb(derive_seed(kSeed, d, k));
      std::vector<double> angles;
      a.run_shot(theta, 0.0, 1, 1, ra, &angles);
      if (std::bit_cast<std::uint64_t>(angles.at(0)) !=
          std::bit_cast<std::uint64_t>(b.perfect_readout_angle(theta, rb))) {
        ++mismatches;
      }
    }
  }
  SweepConfig zero;
  zero.d_list = {3, 5, 7};
  zero.theta_list = {0.0};
  zero.q_list = {0.0, 0.05};
  zero.shots = 200;
  zero.resamples = 5;
  zero.master_seed = kSeed;
  zero.workers = workers();
  bool exact_zero = true;
  for (const auto& r : run_sweep(zero)) {
    exact_zero = exact_zero && r.metrics.pli == 0.0 && r.metrics.pld == 0.0;
  }
  return {mismatches == 0 && exact_zero,
          fmt("%d/%d shots differ between q=0 rounds=1 and perfect readout; theta=0 gives "
              "pli = pld = 0 exactly: %s",
              mismatches, shots, exact_zero ? "yes" : "no")};
}

Outcome criterion8(const std::vector<SweepRow>& coherent) {
  const auto points = curve(coherent, true);
  const DiamondAnalysis a = diamond_intersection_analysis(points, kSeed);
  std::string list;
  bool monotone = a.crossings.size() >= 3;
  for (std::size_t i = 0; i < a.crossings.size(); ++i) {
    const auto& c = a.crossings[i];
    if (!c.found) {
      monotone = false;
      list += fmt(" %d/%d none", c.d1, c.d2);
      continue;
    }
    list += fmt(" %d/%d %.4f+-%.4f", c.d1, c.d2, c.p, c.p_err);
    if (i == 0) continue;
    const auto& prev = a.crossings[i - 1];
    if (!prev.found || !(prev.p - c.p > 2 * std::hypot(prev.p_err, c.p_err))) monotone = false;
  }
  return {monotone, fmt("crossings:%s; 1/d intercept %.4f +- %.4f", list.c_str(), a.intercept,
                        a.intercept_err)};
}

Outcome criterion9() {
  SweepConfig c;
  c.d_list = {3, 5};
  c.theta_list = thetas_of({0.02, 0.03});
  c.q_equals_p = true;
  c.shots = 150;
  c.resamples = 4;
  c.incoherent_shots = 3000;
  c.master_seed = kSeed;
  c.workers = 1;
  const std::string one = csv_string(run_sweep(c));
  c.workers = 3;
  const std::string three = csv_string(run_sweep(c));
  const std::string again = csv_string(run_sweep(c));
  return {one == three && three == again,
          fmt("CSV of %zu bytes; workers 1 vs 3 identical: %s, rerun identical: %s", one.size(),
              one == three ? "yes" : "no", three == again ? "yes" : "no")};
}

}  // namespace

// Optional arguments select criteria by number; the default runs all nine.
int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0, skipped = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& run) {
    if (!selected.empty() && !selected.contains(id)) {
      ++skipped;
      return;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s criterion %d (%s): %s [%.0f s]\n", o.pass ? "PASS" : "FAIL", id, name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  };

  report(1, "oracle equivalence", criterion1);
  report(2, "sampler distribution", criterion2);
  report(3, "decoder exactness", criterion3);

  std::vector<SweepRow> incoherent, coherent;
  double p_th_incoherent = 0.0, p_th_coherent = 0.0;
  report(4, "incoherent threshold", [&] {
    incoherent = incoherent_sweep();
    save_csv("acceptance_incoherent.csv", incoherent);
    return threshold_outcome(incoherent, 0.026, 0.032, &p_th_incoherent);
  });
  report(5, "coherent threshold", [&] {
    coherent = coherent_sweep();
    return threshold_outcome(coherent, 0.022, 0.030, &p_th_coherent);
  });
  report(6, "metric structure", [&] {
    if (coherent.empty() || incoherent.empty()) return Outcome{false, "sweeps unavailable"};
    // A failed fit falls back to the other one, then to the nominal 2.6%.
    double coh = std::isnan(p_th_coherent) ? p_th_incoherent : p_th_coherent;
    if (std::isnan(coh)) coh = 0.026;
    const double inc = std::isnan(p_th_incoherent) ? coh : p_th_incoherent;
    return criterion6(coherent, incoherent, std::min(coh, inc), coh);
  });
  report(7, "reduction checks", criterion7);
  report(8, "diamond-norm crossings", [&] {
    if (coherent.empty()) return Outcome{false, "coherent sweep unavailable"};
    return criterion8(coherent);
  });
  report(9, "determinism", criterion9);

  std::printf("%d of %d criteria failed\n", failures, 9 - skipped);
  return failures == 0 ? 0 : 1;
}
