#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace flosurf {

/// One measured point of a logical error curve.
struct CurvePoint {
  int d = 0;
  double p = 0.0;
  double y = 0.0;
  double sigma = 0.0;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finite-size scaling fit y = A + B x + C x^2 with x = (p - p_th) d^(1/nu).
/// Parameters are ordered (p_th, nu, A, B, C); covariance is (J^T W J)^-1
/// at the optimum.
struct ThresholdFit {
  double p_th = 0.0;
  double p_th_err = 0.0;
  double nu = 0.0;
  double nu_err = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  Eigen::Matrix<double, 5, 5> covariance = Eigen::Matrix<double, 5, 5>::Zero();
  double chi2 = 0.0;
  int dof = 0;
  int iterations = 0;
};

/// Weighted Levenberg-Marquardt fit with nu kept inside [0.5, 2.5]
/// (starting at 1). Needs at least 3 distances and 5 rates; points with
/// non-positive sigma are rejected. Throws FitError with diagnostics if no
/// start converges.
ThresholdFit fit_threshold(std::span<const CurvePoint> points);

/// Crossing of the quadratic fits of distances d1 < d2 inside the sampled
/// rate range.
struct Crossing {
  int d1 = 0;
  int d2 = 0;
  bool found = false;
  double p = 0.0;
  double p_err = 0.0;  // parametric bootstrap over the input errors
  std::string note;
};

struct DiamondAnalysis {
  std::vector<Crossing> crossings;
  /// Weighted line p_cross = intercept + slope / d1 through the crossings
  /// found; the intercept is the large-distance extrapolation.
  double intercept = 0.0;
  double intercept_err = 0.0;
  double slope = 0.0;
  bool extrapolated = false;
};

/// Quadratic fit per distance, crossings of consecutive distances and their
/// extrapolation in 1/d. Needs at least 4 distances with 3 points each.
DiamondAnalysis diamond_intersection_analysis(std::span<const CurvePoint> points,
                                              std::uint64_t seed = 1);

enum class Scaling { Scalable, Unscalable, Indeterminate };

const char* to_string(Scaling s);

/// Scalable if the curve decreases between every pair of consecutive
/// distances by more than 2 sigma, unscalable if it increases that way,
/// indeterminate otherwise. Points must share one (p, q).
Scaling classify_scaling(std::span<const CurvePoint> same_rate_points);

struct ThresholdBracket {
  double q = 0.0;
  /// Last rate, scanning upward, where every smaller rate is scalable;
  /// NaN if the smallest rate is not scalable.
  double lower = 0.0;
  /// First rate classified unscalable; NaN if none.
  double upper = 0.0;
  std::vector<std::pair<double, Scaling>> classes;
};

/// Brackets the threshold in p at fixed q from curves over several
/// distances. Indeterminate points stop the lower bound but not the upper.
ThresholdBracket bracket_threshold(double q, std::span<const CurvePoint> points);

}  // namespace flosurf
