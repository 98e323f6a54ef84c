#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flosurf/majorana_algebra.hpp"
#include "flosurf/pfaffian.hpp"

namespace flosurf {

/// Projection onto an outcome whose probability is below kMeasureEpsilon.
class FloError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kMeasureEpsilon = 1e-12;

/// How measurement updates touch the matrix. Active restricts the rank-2
/// update to the rows and columns where the measured pair has non-zero
/// correlations, which gives the same result; Full updates every entry.
enum class UpdatePath { Full, Active };

/// Covariance matrix M_jk = <i c_j c_k> (j != k) of a Gaussian fermionic
/// state on `modes` modes, i.e. 2*modes Majorana operators.
template <typename Scalar = double>
class CovarianceMatrix {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  static constexpr std::size_t kHygieneInterval = 1000;
  static constexpr double kDriftTolerance = 1e-6;

  CovarianceMatrix() = default;

  /// Maximally mixed state (zero matrix).
  explicit CovarianceMatrix(int modes) : m_(Matrix::Zero(2 * modes, 2 * modes)) {
    if (modes < 0) throw std::invalid_argument("negative mode count");
  }

  explicit CovarianceMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() % 2 != 0) {
      throw std::invalid_argument("covariance matrix must be square with even side");
    }
    if ((m_ + m_.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12)) {
      throw std::invalid_argument("covariance matrix must be antisymmetric");
    }
  }

  int modes() const { return static_cast<int>(m_.rows() / 2); }
  int size() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  Scalar operator()(int j, int k) const { return m_(j, k); }

  UpdatePath update_path() const { return path_; }
  void set_update_path(UpdatePath path) { path_ = path; }
  std::size_t operation_count() const { return ops_; }

  /// Evolves the state by exp(theta c_p c_q), i.e. M -> R M R^T with
  /// c_p -> cos(2 theta) c_p + sin(2 theta) c_q and
  /// c_q -> cos(2 theta) c_q - sin(2 theta) c_p.
  void rotate(Scalar theta, int p, int q) {
    check_pair(p, q);
    using std::cos;
    using std::sin;
    const Scalar c = cos(2 * theta);
    const Scalar s = sin(2 * theta);
    const Eigen::Index n = m_.rows();
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == p || k == q) continue;
      const Scalar a = m_(k, p);
      const Scalar b = m_(k, q);
      if (a == Scalar(0) && b == Scalar(0)) continue;
      const Scalar np = c * a + s * b;
      const Scalar nq = c * b - s * a;
      m_(k, p) = np;
      m_(p, k) = -np;
      m_(k, q) = nq;
      m_(q, k) = -nq;
    }
    after_operation();
  }

  /// Probability of the +1 outcome of i c_p c_q.
  Scalar probability(int p, int q) const {
    check_pair(p, q);
    return (Scalar(1) + m_(p, q)) / Scalar(2);
  }

  /// Projects onto the +1 eigenspace of i c_p c_q and returns the outcome
  /// probability. The -1 outcome is project(q, p). Throws FloError if the
  /// outcome probability is below kMeasureEpsilon.
  Scalar project(int p, int q) {
    const Scalar prob = probability(p, q);
    if (prob < Scalar(kMeasureEpsilon)) {
      throw FloError("projection onto an outcome of probability " + std::to_string(double(prob)));
    }
    const Scalar scale = Scalar(1) / (Scalar(2) * prob);
    // Columns are contiguous; col(p) = -K and col(q) = -L, and the update
    // L K^T - K L^T is unchanged by negating both.
    kcol_ = m_.col(p);
    lcol_ = m_.col(q);
    if (path_ == UpdatePath::Full) {
      m_.noalias() += scale * (lcol_ * kcol_.transpose() - kcol_ * lcol_.transpose());
    } else {
      support_.clear();
      const Eigen::Index n = m_.rows();
      for (Eigen::Index k = 0; k < n; ++k) {
        if (kcol_(k) != Scalar(0) || lcol_(k) != Scalar(0)) support_.push_back(static_cast<int>(k));
      }
      for (int k : support_) {
        const Scalar kk = scale * kcol_(k);
        const Scalar lk = scale * lcol_(k);
        for (int j : support_) m_(j, k) += lcol_(j) * kk - kcol_(j) * lk;
      }
    }
    for (int idx : {p, q}) {
      m_.col(idx).setZero();
      m_.row(idx).setZero();
    }
    m_(p, q) = Scalar(1);
    m_(q, p) = Scalar(-1);
    after_operation();
    return prob;
  }

  /// max |M M^T - I|; zero for a pure state.
  Scalar orthogonality_error() const {
    const Matrix prod = m_ * m_.transpose();
    return (prod - Matrix::Identity(m_.rows(), m_.cols())).cwiseAbs().maxCoeff();
  }

  bool is_pure(Scalar tol = Scalar(kDriftTolerance)) const { return orthogonality_error() <= tol; }

  /// Replaces M by the antisymmetrised orthogonal polar factor of M.
  void reorthogonalize() {
    Eigen::JacobiSVD<Matrix> svd(m_, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix q = svd.matrixU() * svd.matrixV().transpose();
    m_ = (q - q.transpose()) / Scalar(2);
  }

  /// Runs the periodic clean-up immediately: antisymmetrise, estimate the
  /// orthogonality drift with a probe vector and repair it if needed.
  /// Returns true if a re-orthogonalisation happened.
  bool clean_up() {
    m_ = ((m_ - m_.transpose()) / Scalar(2)).eval();
    if (m_.rows() == 0) return false;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(m_.rows());
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      probe_state_ = probe_state_ * 6364136223846793005ULL + 1442695040888963407ULL;
      v(k) = (probe_state_ >> 40) & 1 ? Scalar(1) : Scalar(-1);
    }
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w = m_ * (m_.transpose() * v);
    if ((w - v).cwiseAbs().maxCoeff() <= Scalar(kDriftTolerance)) return false;
    const Scalar err = orthogonality_error();
    // A far-from-orthogonal matrix is a mixed state, not drift.
    if (err <= Scalar(kDriftTolerance) || err > Scalar(0.5)) return false;
    std::cerr << "flosurf: covariance drift " << double(err) << " after " << ops_
              << " operations, re-orthogonalising\n";
    reorthogonalize();
    return true;
  }

 private:
  void check_pair(int p, int q) const {
    if (p == q) throw std::invalid_argument("Majorana pair needs two distinct indices");
    if (p < 0 || q < 0 || p >= size() || q >= size()) {
      throw std::out_of_range("Majorana index out of range");
    }
  }

  void after_operation() {
    if (++ops_ % kHygieneInterval == 0) clean_up();
  }

  Matrix m_;
  UpdatePath path_ = UpdatePath::Active;
  std::size_t ops_ = 0;
  std::uint64_t probe_state_ = 0x853c49e6748fea9bULL;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> kcol_;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lcol_;
  std::vector<int> support_;
};

/// Pure state stabilised by i c_p c_q = +1 for every pair. Pairs must be
/// disjoint; Majoranas not covered stay uncorrelated.
template <typename Scalar = double>
CovarianceMatrix<Scalar> init_pair_stabilized(std::span<const MajoranaPair> pairs, int modes) {
  using Matrix = typename CovarianceMatrix<Scalar>::Matrix;
  Matrix m = Matrix::Zero(2 * modes, 2 * modes);
  std::vector<char> used(2 * modes, 0);
  for (const auto& [p, q] : pairs) {
    if (p == q || p < 0 || q < 0 || p >= 2 * modes || q >= 2 * modes) {
      throw std::invalid_argument("invalid Majorana pair");
    }
    if (used[p] || used[q]) throw std::invalid_argument("stabilising pairs overlap");
    used[p] = used[q] = 1;
    m(p, q) = Scalar(1);
    m(q, p) = Scalar(-1);
  }
  return CovarianceMatrix<Scalar>(std::move(m));
}

template <typename Scalar>
CovarianceMatrix<Scalar> apply_rotation(CovarianceMatrix<Scalar> m, Scalar theta, int p, int q) {
  m.rotate(theta, p, q);
  return m;
}

template <typename Scalar>
struct Measured {
  CovarianceMatrix<Scalar> state;
  Scalar probability;
};

/// Outcome +1 of i c_p c_q; swap p and q for the -1 outcome.
template <typename Scalar>
Measured<Scalar> measure_pair(CovarianceMatrix<Scalar> m, int p, int q) {
  const Scalar prob = m.project(p, q);
  return {std::move(m), prob};
}

/// i^k <c_{j1} ... c_{j2k}>, the Pfaffian of M restricted to `indices`.
template <typename Scalar>
Scalar pfaffian_expectation(const CovarianceMatrix<Scalar>& m, std::span<const int> indices) {
  if (indices.size() % 2 != 0) throw std::invalid_argument("odd number of Majorana indices");
  std::vector<int> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("repeated Majorana index");
  }
  const auto n = static_cast<Eigen::Index>(indices.size());
  typename CovarianceMatrix<Scalar>::Matrix sub(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    if (indices[a] < 0 || indices[a] >= m.size()) throw std::out_of_range("Majorana index out of range");
    for (Eigen::Index b = 0; b < n; ++b) sub(a, b) = a == b ? Scalar(0) : m(indices[a], indices[b]);
  }
  return pfaffian(sub);
}

}  // namespace flosurf
