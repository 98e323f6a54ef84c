#include "flosurf/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <unsupported/Eigen/LevenbergMarquardt>

#include "flosurf/rng.hpp"

namespace flosurf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNuMid = 1.5;

double nu_of(double u) { return kNuMid + std::tanh(u); }

struct ScalingFunctor : Eigen::DenseFunctor<double> {
  ScalingFunctor(std::span<const CurvePoint> pts)
      : Eigen::DenseFunctor<double>(5, static_cast<int>(pts.size())), pts(pts) {}

  // Parameters (p_th, u, A, B, C) with nu = 1.5 + tanh(u).
  int operator()(const InputType& x, ValueType& f) const {
    const double nu = nu_of(x[1]);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double s = (pts[i].p - x[0]) * std::pow(pts[i].d, 1 / nu);
      f[i] = (x[2] + x[3] * s + x[4] * s * s - pts[i].y) / pts[i].sigma;
    }
    return 0;
  }

  int df(const InputType& x, JacobianType& j) const {
    const double u = x[1];
    const double nu = nu_of(u);
    const double dnu = 1 - std::tanh(u) * std::tanh(u);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double scale = std::pow(pts[i].d, 1 / nu);
      const double s = (pts[i].p - x[0]) * scale;
      const double dy = x[3] + 2 * x[4] * s;
      const double w = 1 / pts[i].sigma;
      j(i, 0) = -dy * scale * w;
      j(i, 1) = dy * s * std::log(pts[i].d) * (-1 / (nu * nu)) * dnu * w;
      j(i, 2) = w;
      j(i, 3) = s * w;
      j(i, 4) = s * s * w;
    }
    return 0;
  }

  std::span<const CurvePoint> pts;
};

// Weighted least squares for y = c0 + c1 p + c2 p^2.
Eigen::Vector3d quadratic_fit(const std::vector<CurvePoint>& pts) {
  Eigen::MatrixXd a(pts.size(), 3);
  Eigen::VectorXd b(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double w = 1 / pts[i].sigma;
    a(i, 0) = w;
    a(i, 1) = pts[i].p * w;
    a(i, 2) = pts[i].p * pts[i].p * w;
    b[i] = pts[i].y * w;
  }
  return a.colPivHouseholderQr().solve(b);
}

// Root of the difference of two quadratics inside [lo, hi], nearest the
// middle if there are two.
bool crossing_of(const Eigen::Vector3d& f, const Eigen::Vector3d& g, double lo, double hi,
                 double& root) {
  const Eigen::Vector3d h = f - g;
  std::vector<double> roots;
  const double scale = std::max({std::abs(h[0]), std::abs(h[1]) * hi, std::abs(h[2]) * hi * hi});
  if (scale == 0) return false;
  if (std::abs(h[2]) * hi * hi < 1e-12 * scale) {
    if (h[1] != 0) roots.push_back(-h[0] / h[1]);
  } else {
    const double disc = h[1] * h[1] - 4 * h[2] * h[0];
    if (disc < 0) return false;
    const double sq = std::sqrt(disc);
    // Numerically stable pair of roots.
    const double t = -0.5 * (h[1] + std::copysign(sq, h[1]));
    if (t != 0) roots.push_back(h[0] / t);
    roots.push_back(t / h[2]);
  }
  const double mid = 0.5 * (lo + hi);
  bool found = false;
  for (double r : roots) {
    if (r < lo || r > hi) continue;
    if (!found || std::abs(r - mid) < std::abs(root - mid)) root = r;
    found = true;
  }
  return found;
}

std::map<int, std::vector<CurvePoint>> by_distance(std::span<const CurvePoint> points) {
  std::map<int, std::vector<CurvePoint>> out;
  for (const auto& pt : points) out[pt.d].push_back(pt);
  return out;
}

}  // namespace

ThresholdFit fit_threshold(std::span<const CurvePoint> points) {
  std::set<int> ds;
  std::set<double> ps;
  for (const auto& pt : points) {
    if (!(pt.sigma > 0)) throw FitError("every point needs a positive standard error");
    ds.insert(pt.d);
    ps.insert(pt.p);
  }
  if (ds.size() < 3 || ps.size() < 5) {
    throw FitError("threshold fit needs at least 3 distances and 5 error rates");
  }
  const double pmin = *ps.begin();
  const double pmax = *ps.rbegin();
  double ymean = 0.0;
  for (const auto& pt : points) ymean += pt.y;
  ymean /= points.size();

  ScalingFunctor functor(points);
  ThresholdFit best;
  bool have = false;
  std::ostringstream diag;
  // Several starting thresholds across the sampled range; keep the best.
  for (int k = 1; k <= 7; ++k) {
    const double start = pmin + (pmax - pmin) * k / 8.0;
    Eigen::VectorXd x(5);
    x << start, std::atanh(1.0 - kNuMid), ymean, 0.0, 0.0;
    // Linear parameters by least squares at the starting nonlinear ones.
    {
      Eigen::MatrixXd a(points.size(), 3);
      Eigen::VectorXd b(points.size());
      for (std::size_t i = 0; i < points.size(); ++i) {
        const double s = (points[i].p - start) * points[i].d;
        const double w = 1 / points[i].sigma;
        a.row(i) << w, s * w, s * s * w;
        b[i] = points[i].y * w;
      }
      x.tail<3>() = a.colPivHouseholderQr().solve(b);
    }
    Eigen::LevenbergMarquardt<ScalingFunctor> lm(functor);
    lm.setMaxfev(4000);
    const auto status = lm.minimize(x);
    const bool ok = status == Eigen::LevenbergMarquardtSpace::RelativeReductionTooSmall ||
                    status == Eigen::LevenbergMarquardtSpace::RelativeErrorTooSmall ||
                    status == Eigen::LevenbergMarquardtSpace::RelativeErrorAndReductionTooSmall ||
                    status == Eigen::LevenbergMarquardtSpace::CosinusTooSmall ||
                    status == Eigen::LevenbergMarquardtSpace::XtolTooSmall ||
                    status == Eigen::LevenbergMarquardtSpace::FtolTooSmall ||
                    status == Eigen::LevenbergMarquardtSpace::GtolTooSmall;
    Eigen::VectorXd f(points.size());
    functor(x, f);
    const double chi2 = f.squaredNorm();
    diag << "start p_th=" << start << " status=" << int(status) << " chi2=" << chi2
         << " p_th=" << x[0] << "; ";
    if (!ok || !std::isfinite(chi2) || x[0] < pmin || x[0] > pmax) continue;
    if (have && chi2 >= best.chi2) continue;
    have = true;
    best.p_th = x[0];
    best.nu = nu_of(x[1]);
    best.a = x[2];
    best.b = x[3];
    best.c = x[4];
    best.chi2 = chi2;
    best.iterations = static_cast<int>(lm.iterations());
  }
  if (!have) throw FitError("threshold fit did not converge inside the sampled range: " + diag.str());

  // Covariance in (p_th, nu, A, B, C).
  Eigen::MatrixXd j(points.size(), 5);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    const double scale = std::pow(pt.d, 1 / best.nu);
    const double s = (pt.p - best.p_th) * scale;
    const double dy = best.b + 2 * best.c * s;
    const double w = 1 / pt.sigma;
    j.row(i) << -dy * scale * w, -dy * s * std::log(pt.d) / (best.nu * best.nu) * w, w, s * w,
        s * s * w;
  }
  const Eigen::Matrix<double, 5, 5> info = j.transpose() * j;
  best.covariance = info.completeOrthogonalDecomposition().pseudoInverse();
  best.p_th_err = std::sqrt(std::max(0.0, best.covariance(0, 0)));
  best.nu_err = std::sqrt(std::max(0.0, best.covariance(1, 1)));
  best.dof = static_cast<int>(points.size()) - 5;
  return best;
}

DiamondAnalysis diamond_intersection_analysis(std::span<const CurvePoint> points,
                                              std::uint64_t seed) {
  const auto curves = by_distance(points);
  if (curves.size() < 4) throw FitError("diamond analysis needs at least 4 distances");
  for (const auto& [d, pts] : curves) {
    if (pts.size() < 3) throw FitError("each distance needs at least 3 rates for a quadratic fit");
    for (const auto& pt : pts) {
      if (!(pt.sigma > 0)) throw FitError("every point needs a positive standard error");
    }
  }
  std::vector<int> ds;
  std::map<int, Eigen::Vector3d> fits;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& [d, pts] : curves) {
    ds.push_back(d);
    fits[d] = quadratic_fit(pts);
    for (const auto& pt : pts) {
      lo = std::min(lo, pt.p);
      hi = std::max(hi, pt.p);
    }
  }

  DiamondAnalysis out;
  constexpr int kBootstrap = 400;
  for (std::size_t k = 0; k + 1 < ds.size(); ++k) {
    Crossing c;
    c.d1 = ds[k];
    c.d2 = ds[k + 1];
    c.found = crossing_of(fits[c.d1], fits[c.d2], lo, hi, c.p);
    if (!c.found) {
      c.note = "quadratic fits do not cross inside the sampled range";
      out.crossings.push_back(c);
      continue;
    }
    // Parametric bootstrap: redraw every point from N(y, sigma).
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c.d1), static_cast<std::uint64_t>(c.d2)));
    std::normal_distribution<double> normal;
    double sum = 0.0, sum2 = 0.0;
    int hits = 0;
    for (int b = 0; b < kBootstrap; ++b) {
      std::vector<CurvePoint> r1 = curves.at(c.d1);
      std::vector<CurvePoint> r2 = curves.at(c.d2);
      for (auto& pt : r1) pt.y += pt.sigma * normal(rng.engine());
      for (auto& pt : r2) pt.y += pt.sigma * normal(rng.engine());
      double root = 0.0;
      if (crossing_of(quadratic_fit(r1), quadratic_fit(r2), lo, hi, root)) {
        sum += root;
        sum2 += root * root;
        ++hits;
      }
    }
    if (hits > 1) {
      const double mean = sum / hits;
      c.p_err = std::sqrt(std::max(0.0, (sum2 - hits * mean * mean) / (hits - 1)));
    } else {
      c.p_err = kNaN;
    }
    if (hits < kBootstrap) {
      c.note = std::to_string(kBootstrap - hits) + " bootstrap draws without a crossing";
    }
    out.crossings.push_back(c);
  }

  // Weighted line through the crossings in 1/d1.
  std::vector<const Crossing*> used;
  for (const auto& c : out.crossings) {
    if (c.found && std::isfinite(c.p_err) && c.p_err > 0) used.push_back(&c);
  }
  if (used.size() >= 2) {
    Eigen::MatrixXd a(used.size(), 2);
    Eigen::VectorXd b(used.size());
    for (std::size_t i = 0; i < used.size(); ++i) {
      const double w = 1 / used[i]->p_err;
      a.row(i) << w, w / used[i]->d1;
      b[i] = used[i]->p * w;
    }
    const Eigen::Vector2d line = a.colPivHouseholderQr().solve(b);
    out.intercept = line[0];
    out.slope = line[1];
    const Eigen::Matrix2d cov = (a.transpose() * a).inverse();
    out.intercept_err = std::sqrt(cov(0, 0));
    out.extrapolated = true;
  } else {
    out.intercept = out.intercept_err = out.slope = kNaN;
  }
  return out;
}

const char* to_string(Scaling s) {
  switch (s) {
    case Scaling::Scalable:
      return "scalable";
    case Scaling::Unscalable:
      return "unscalable";
    case Scaling::Indeterminate:
      return "indeterminate";
  }
  return "?";
}

Scaling classify_scaling(std::span<const CurvePoint> same_rate_points) {
  std::vector<CurvePoint> pts(same_rate_points.begin(), same_rate_points.end());
  if (pts.size() < 2) throw std::invalid_argument("scaling needs at least two distances");
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.d < b.d; });
  bool down = true;
  bool up = true;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double diff = pts[i + 1].y - pts[i].y;
    const double sig = 2 * std::hypot(pts[i].sigma, pts[i + 1].sigma);
    down = down && diff < -sig;
    up = up && diff > sig;
  }
  if (down) return Scaling::Scalable;
  if (up) return Scaling::Unscalable;
  return Scaling::Indeterminate;
}

ThresholdBracket bracket_threshold(double q, std::span<const CurvePoint> points) {
  std::map<double, std::vector<CurvePoint>> by_rate;
  for (const auto& pt : points) by_rate[pt.p].push_back(pt);
  ThresholdBracket out;
  out.q = q;
  out.lower = kNaN;
  out.upper = kNaN;
  bool clean = true;
  for (const auto& [p, pts] : by_rate) {
    const Scaling s = classify_scaling(pts);
    out.classes.push_back({p, s});
    if (clean && s == Scaling::Scalable) {
      out.lower = p;
    } else {
      clean = false;
    }
    if (s == Scaling::Unscalable && std::isnan(out.upper)) out.upper = p;
  }
  return out;
}

}  // namespace flosurf
