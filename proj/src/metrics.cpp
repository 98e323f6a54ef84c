#include "flosurf/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace flosurf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Error of a / b for independent a, b.
double ratio_error(double a, double ea, double b, double eb) {
  return std::abs(a / b) * std::hypot(ea / a, eb / b);
}

}  // namespace

MetricEstimate estimate_metrics(std::span<const ShotOutcome> shots) {
  if (shots.empty()) throw std::invalid_argument("no shots to estimate from");
  const double n = static_cast<double>(shots.size());
  double si = 0.0, sd = 0.0, sii = 0.0, sdd = 0.0, sid = 0.0;
  for (const ShotOutcome& s : shots) {
    if (s.resamples < 1 || s.logical_z < 0 || s.logical_z > s.resamples) {
      throw std::invalid_argument("shot needs between 0 and resamples logical-Z outcomes");
    }
    const double sin2 = std::pow(std::sin(s.theta_star), 2);
    const double cos2 = std::pow(std::cos(s.theta_star), 2);
    const double flip = double(s.logical_z) / s.resamples;
    const double xi = (1 - flip) * sin2 + flip * cos2;
    const double xd = 2 * ((1 - flip) * std::abs(std::sin(s.theta_star)) +
                           flip * std::abs(std::cos(s.theta_star)));
    si += xi;
    sd += xd;
    sii += xi * xi;
    sdd += xd * xd;
    sid += xi * xd;
  }
  MetricEstimate m;
  m.shots = static_cast<std::int64_t>(shots.size());
  m.resamples = shots.front().resamples;
  m.pli = si / n;
  m.pld = sd / n;
  // Sample (co)variances of the per-shot averages over n - 1.
  const double denom = n > 1 ? n * (n - 1) : kNaN;
  const double var_i = std::max(0.0, sii - n * m.pli * m.pli) / denom;
  const double var_d = std::max(0.0, sdd - n * m.pld * m.pld) / denom;
  const double cov = (sid - n * m.pli * m.pld) / denom;
  m.pli_err = std::sqrt(var_i);
  m.pld_err = std::sqrt(var_d);
  if (m.pli > 0) {
    m.coh_ratio = m.pld / (2 * m.pli);
    const double rel = var_d / (m.pld * m.pld) + var_i / (m.pli * m.pli) - 2 * cov / (m.pli * m.pld);
    m.coh_ratio_err = m.coh_ratio * std::sqrt(std::max(0.0, rel));
  } else {
    m.coh_ratio = kNaN;
    m.coh_ratio_err = kNaN;
  }
  m.twirl_i = m.twirl_i_err = m.twirl_d = m.twirl_d_err = kNaN;
  return m;
}

void attach_twirl(MetricEstimate& m, const FailureEstimate& baseline) {
  if (baseline.failures == 0) {
    m.twirl_i = m.twirl_i_err = m.twirl_d = m.twirl_d_err = kNaN;
    return;
  }
  const double f = baseline.rate();
  const double ef = baseline.error();
  m.twirl_i = m.pli / f;
  m.twirl_i_err = m.pli > 0 ? ratio_error(m.pli, m.pli_err, f, ef) : kNaN;
  m.twirl_d = m.pld / (2 * f);
  m.twirl_d_err = m.pld > 0 ? ratio_error(m.pld, m.pld_err, 2 * f, 2 * ef) : kNaN;
}

}  // namespace flosurf
