#pragma once

#include <cstdint>
#include <span>

#include "flosurf/incoherent.hpp"

namespace flosurf {

/// One noiseless shot with its readout resamples. Each resample ends in
/// theta* (identity class) or theta* + pi/2 (logical Z class).
struct ShotOutcome {
  double theta_star = 0.0;
  int resamples = 0;
  int logical_z = 0;
};

/// Logical error measures averaged over shots and resamples. Standard
/// errors come from the spread of per-shot averages, since resamples of one
/// shot share theta*. Twirl ratios are NaN until a baseline is attached.
struct MetricEstimate {
  std::int64_t shots = 0;
  int resamples = 0;
  double pli = 0.0;  // mean sin^2(theta_L), maximum infidelity
  double pli_err = 0.0;
  double pld = 0.0;  // mean 2|sin(theta_L)|, diamond-norm distance
  double pld_err = 0.0;
  double coh_ratio = 0.0;  // pld / (2 pli); NaN if pli = 0
  double coh_ratio_err = 0.0;
  double twirl_i = 0.0;  // pli / baseline failure rate
  double twirl_i_err = 0.0;
  double twirl_d = 0.0;  // pld / (2 baseline failure rate)
  double twirl_d_err = 0.0;
};

/// Throws std::invalid_argument for an empty input or a shot without
/// resamples.
MetricEstimate estimate_metrics(std::span<const ShotOutcome> shots);

/// Fills the twirl ratios against the incoherent failure rate at the same
/// physical rates (first-order error propagation, independent samples).
void attach_twirl(MetricEstimate& m, const FailureEstimate& baseline);

}  // namespace flosurf
