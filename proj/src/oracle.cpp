#include "flosurf/oracle.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace flosurf::oracle {

namespace {

constexpr Complex kI{0.0, 1.0};

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Operator acting as `local` on bit `site` and `left` on all lower bits.
DenseMatrix embed(int modes, int site, const DenseMatrix& left, const DenseMatrix& local) {
  DenseMatrix out = DenseMatrix::Identity(1, 1);
  // Higher bits are more significant, so build from the top mode down.
  for (int k = modes - 1; k >= 0; --k) {
    const DenseMatrix& factor = k == site ? local : (k < site ? left : DenseMatrix(DenseMatrix::Identity(2, 2)));
    out = kron(out, factor);
  }
  return out;
}

std::uint32_t mask_of(const std::vector<int>& qubits) {
  std::uint32_t m = 0;
  for (int q : qubits) m |= 1u << q;
  return m;
}

DenseVector apply_x_mask(const DenseVector& v, std::uint32_t mask) {
  DenseVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i ^ mask) = v(i);
  return out;
}

void check_qubits(const CodePatch& patch) {
  if (patch.num_qubits() > kMaxQubits) throw std::invalid_argument("dense oracle limited to d <= 3");
}

}  // namespace

int DenseState::qubits() const { return std::countr_zero(static_cast<std::uint64_t>(amplitudes.size())); }

std::vector<DenseMatrix> majorana_matrices(int modes) {
  if (modes < 1 || modes > kMaxModes) throw std::invalid_argument("fermion oracle mode count out of range");
  DenseMatrix x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, -kI, kI, 0;
  z << 1, 0, 0, -1;
  std::vector<DenseMatrix> c;
  for (int k = 0; k < modes; ++k) {
    c.push_back(embed(modes, k, z, x));
    c.push_back(embed(modes, k, z, y));
  }
  return c;
}

DenseVector pair_stabilized_vector(const std::vector<DenseMatrix>& c,
                                   std::span<const MajoranaPair> pairs) {
  const Eigen::Index dim = c.front().rows();
  if (2 * pairs.size() != c.size()) throw std::invalid_argument("pairs must cover every Majorana");
  DenseMatrix proj = DenseMatrix::Identity(dim, dim);
  for (const auto& [p, q] : pairs) {
    proj = (0.5 * (DenseMatrix::Identity(dim, dim) + kI * c[p] * c[q])) * proj;
  }
  Eigen::Index best = 0;
  proj.colwise().norm().maxCoeff(&best);
  DenseVector v = proj.col(best);
  return v / v.norm();
}

Eigen::MatrixXd covariance_of(const std::vector<DenseMatrix>& c, const DenseVector& psi) {
  const int n = static_cast<int>(c.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j != k) m(j, k) = (psi.adjoint() * (kI * c[j] * c[k]) * psi)(0, 0).real();
    }
  }
  return m;
}

Complex majorana_expectation(const std::vector<DenseMatrix>& c, const DenseVector& psi,
                             std::span<const int> indices) {
  DenseVector v = psi;
  for (auto it = indices.rbegin(); it != indices.rend(); ++it) v = c[*it] * v;
  Complex phase = 1.0;
  for (std::size_t k = 0; k < indices.size() / 2; ++k) phase *= kI;
  return phase * psi.dot(v);
}

DenseFermionResult dense_fermion_check(std::span<const MajoranaPair> initial_pairs,
                                       std::span<const FermionOp> ops, int modes) {
  const auto c = majorana_matrices(modes);
  const Eigen::Index dim = c.front().rows();
  const DenseMatrix id = DenseMatrix::Identity(dim, dim);
  DenseVector psi = pair_stabilized_vector(c, initial_pairs);
  DenseFermionResult out;
  for (const FermionOp& op : ops) {
    const DenseMatrix cc = c[op.p] * c[op.q];
    if (op.kind == FermionOp::Kind::Rotate) {
      // (c_p c_q)^2 = -1, so exp(theta c_p c_q) = cos(theta) + sin(theta) c_p c_q.
      psi = (std::cos(op.theta) * id + std::sin(op.theta) * cc) * psi;
    } else {
      psi = 0.5 * (id + kI * cc) * psi;
      const double prob = psi.squaredNorm();
      out.probabilities.push_back(prob);
      if (prob <= 0.0) throw std::runtime_error("dense projection onto a zero-probability outcome");
      psi /= std::sqrt(prob);
    }
  }
  out.covariance = covariance_of(c, psi);
  return out;
}

std::vector<DenseMatrix> c4_majoranas() {
  const auto jw = majorana_matrices(2);
  // a_k + a_k^dag = jw[2k], i(a_k - a_k^dag) = -jw[2k+1].
  return {-jw[3], jw[0], -jw[1], jw[2]};
}

DenseState encode_logical(const CodePatch& patch, LogicalState state) {
  check_qubits(patch);
  const int n = patch.num_qubits();
  const Eigen::Index dim = Eigen::Index(1) << n;
  auto encode_basis = [&](std::uint32_t start) {
    DenseVector v = DenseVector::Zero(dim);
    v(start) = 1.0;
    for (const Face& f : patch.x_faces) v = 0.5 * (v + apply_x_mask(v, mask_of(f.qubits)));
    return DenseVector(patch.normalization() * v);
  };
  const DenseVector zero = encode_basis(0);
  const DenseVector one = encode_basis(static_cast<std::uint32_t>(dim - 1));
  const double r = 1.0 / std::sqrt(2.0);
  switch (state) {
    case LogicalState::Zero:
      return {zero};
    case LogicalState::One:
      return {one};
    case LogicalState::Plus:
      return {r * (zero + one)};
    case LogicalState::Minus:
      return {r * (zero - one)};
    case LogicalState::Y:
      return {r * (zero + kI * one)};
  }
  throw std::invalid_argument("unknown logical state");
}

double pauli_expectation(const DenseState& psi, const std::vector<int>& x_support,
                         const std::vector<int>& z_support) {
  const std::uint32_t xm = mask_of(x_support);
  const std::uint32_t zm = mask_of(z_support);
  Complex acc = 0.0;
  for (Eigen::Index i = 0; i < psi.amplitudes.size(); ++i) {
    const double sign = std::popcount(static_cast<std::uint32_t>(i) & zm) % 2 ? -1.0 : 1.0;
    acc += std::conj(psi.amplitudes(i ^ xm)) * sign * psi.amplitudes(i);
  }
  return acc.real();
}

void apply_z_rotations(DenseState& psi, const AngleAssignment& angles) {
  const int n = psi.qubits();
  for (Eigen::Index i = 0; i < psi.amplitudes.size(); ++i) {
    double phase = 0.0;
    for (int q = 0; q < n; ++q) phase += ((i >> q) & 1) ? -angles.theta[q] : angles.theta[q];
    psi.amplitudes(i) *= std::exp(kI * phase);
  }
}

void apply_z_string(DenseState& psi, const ZSupport& support) {
  std::uint32_t zm = 0;
  for (std::size_t q = 0; q < support.size(); ++q) {
    if (support[q]) zm |= 1u << q;
  }
  for (Eigen::Index i = 0; i < psi.amplitudes.size(); ++i) {
    if (std::popcount(static_cast<std::uint32_t>(i) & zm) % 2) psi.amplitudes(i) = -psi.amplitudes(i);
  }
}

void project_x_syndrome(DenseState& psi, const CodePatch& patch, const Syndrome2D& s) {
  for (std::size_t f = 0; f < patch.x_faces.size(); ++f) {
    const DenseVector flipped = apply_x_mask(psi.amplitudes, mask_of(patch.x_faces[f].qubits));
    psi.amplitudes = 0.5 * (psi.amplitudes + double(s.s[f]) * flipped);
  }
}

double logical_phase(const CodePatch& patch, const DenseState& phi, const DenseState& psi0) {
  const DenseState zero = encode_logical(patch, LogicalState::Zero);
  const DenseState one = encode_logical(patch, LogicalState::One);
  const Complex a0 = zero.amplitudes.dot(phi.amplitudes);
  const Complex a1 = one.amplitudes.dot(phi.amplitudes);
  const Complex b0 = zero.amplitudes.dot(psi0.amplitudes);
  const Complex b1 = one.amplitudes.dot(psi0.amplitudes);
  return fold_angle(0.5 * std::arg(a0 * std::conj(a1) * std::conj(b0) * b1));
}

std::vector<Syndrome2D> all_syndromes(const CodePatch& patch) {
  const std::size_t nf = patch.x_faces.size();
  std::vector<Syndrome2D> out;
  for (std::uint32_t bits = 0; bits < (1u << nf); ++bits) {
    Syndrome2D s;
    for (std::size_t f = 0; f < nf; ++f) s.s.push_back((bits >> f) & 1 ? -1 : 1);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SyndromeBranch> enumerate_syndromes(const CodePatch& patch,
                                                const AngleAssignment& angles, int rounds,
                                                const Decoder2D& decode, LogicalState initial) {
  check_qubits(patch);
  if (rounds < 1 || rounds > 3) throw std::invalid_argument("oracle enumeration limited to 1..3 rounds");
  const DenseState psi0 = encode_logical(patch, initial);
  const auto syndromes = all_syndromes(patch);
  std::vector<SyndromeBranch> out;

  std::function<void(const DenseState&, double, std::vector<Syndrome2D>&)> recurse =
      [&](const DenseState& psi, double prob, std::vector<Syndrome2D>& history) {
        DenseState rotated = psi;
        apply_z_rotations(rotated, angles);
        for (const Syndrome2D& s : syndromes) {
          DenseState branch = rotated;
          project_x_syndrome(branch, patch, s);
          const double p = branch.amplitudes.squaredNorm();
          if (p < 1e-14) continue;
          branch.amplitudes /= std::sqrt(p);
          history.push_back(s);
          if (static_cast<int>(history.size()) == rounds) {
            DenseState corrected = branch;
            apply_z_string(corrected, decode(s));
            out.push_back({history, prob * p, logical_phase(patch, corrected, psi0)});
          } else {
            recurse(branch, prob * p, history);
          }
          history.pop_back();
        }
      };
  std::vector<Syndrome2D> history;
  recurse(psi0, 1.0, history);
  return out;
}

}  // namespace flosurf::oracle
