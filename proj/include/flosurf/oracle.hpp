#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "flosurf/lattice.hpp"
#include "flosurf/majorana_algebra.hpp"
#include "flosurf/types.hpp"

/// Exact dense references: state vectors of at most nine qubits and Fock
/// spaces of at most a few fermionic modes. Used to validate the Gaussian
/// engine, the sampler and the logical angles.
namespace flosurf::oracle {

using Complex = std::complex<double>;
using DenseVector = Eigen::VectorXcd;
using DenseMatrix = Eigen::MatrixXcd;

inline constexpr int kMaxQubits = 9;
inline constexpr int kMaxModes = 6;

/// Normalised state vector; qubit q is bit q of the basis index.
struct DenseState {
  DenseVector amplitudes;

  int qubits() const;
  double norm() const { return amplitudes.norm(); }
};

// ---------------------------------------------------------------------------
// Fermionic reference

/// Jordan-Wigner Majorana matrices c_0 .. c_{2N-1} on 2^N-dimensional Fock
/// space: c_{2k} = a_k + a_k^dag, c_{2k+1} = i(a_k^dag - a_k) up to string.
std::vector<DenseMatrix> majorana_matrices(int modes);

/// Unique (up to phase) state with i c_p c_q = +1 for the given pairs, which
/// must cover all 2N Majoranas.
DenseVector pair_stabilized_vector(const std::vector<DenseMatrix>& c,
                                   std::span<const MajoranaPair> pairs);

/// Real covariance M_jk = <i c_j c_k>, zero diagonal.
Eigen::MatrixXd covariance_of(const std::vector<DenseMatrix>& c, const DenseVector& psi);

/// i^k <c_{j1} ... c_{j2k}> evaluated densely.
Complex majorana_expectation(const std::vector<DenseMatrix>& c, const DenseVector& psi,
                             std::span<const int> indices);

struct FermionOp {
  enum class Kind { Rotate, Project };
  Kind kind;
  int p;
  int q;
  double theta = 0.0;
};

struct DenseFermionResult {
  Eigen::MatrixXd covariance;
  std::vector<double> probabilities;  // one per Project op
};

/// Applies exp(theta c_p c_q) and (1 + i c_p c_q)/2 projections densely,
/// starting from the pair-stabilised state.
DenseFermionResult dense_fermion_check(std::span<const MajoranaPair> initial_pairs,
                                       std::span<const FermionOp> ops, int modes);

/// Majoranas c1..c4 of one C4 code on two modes: c1 = i(a2 - a2^dag),
/// c2 = a1 + a1^dag, c3 = i(a1 - a1^dag), c4 = a2 + a2^dag, so that
/// i c2 c3 = 1 - 2 n1.
std::vector<DenseMatrix> c4_majoranas();

// ---------------------------------------------------------------------------
// Qubit reference

enum class LogicalState { Zero, One, Plus, Minus, Y };

/// Code state built as N_d prod_f (1 + A_f)/2 applied to |0..0> (|1..1> for
/// logical one), so that X^L |0_L> = |1_L>. Rejects d > 3.
DenseState encode_logical(const CodePatch& patch, LogicalState state);

/// Expectation of the product of Paulis `x_support` (X) and `z_support` (Z).
double pauli_expectation(const DenseState& psi, const std::vector<int>& x_support,
                         const std::vector<int>& z_support);

/// prod_j exp(i theta_j Z_j).
void apply_z_rotations(DenseState& psi, const AngleAssignment& angles);

void apply_z_string(DenseState& psi, const ZSupport& support);

/// Unnormalised projection onto the X-check outcomes s.
void project_x_syndrome(DenseState& psi, const CodePatch& patch, const Syndrome2D& s);

/// Angle theta with phi = g exp(i theta Z^L) psi0 for code states phi, psi0,
/// folded into (-pi/2, pi/2].
double logical_phase(const CodePatch& patch, const DenseState& phi, const DenseState& psi0);

/// All X syndromes of a patch, in binary order over x_faces.
std::vector<Syndrome2D> all_syndromes(const CodePatch& patch);

using Decoder2D = std::function<ZSupport(const Syndrome2D&)>;

struct SyndromeBranch {
  std::vector<Syndrome2D> rounds;
  double probability = 0.0;
  double theta_star = 0.0;  // folded
};

/// Exhaustive evolution Pi_{s_R} U ... Pi_{s_1} U |psi0> over all syndrome
/// histories with non-zero probability; the final state is returned to the
/// code space by decode(s_R) and its logical phase read off.
std::vector<SyndromeBranch> enumerate_syndromes(const CodePatch& patch,
                                                const AngleAssignment& angles, int rounds,
                                                const Decoder2D& decode,
                                                LogicalState initial = LogicalState::Plus);

}  // namespace flosurf::oracle
