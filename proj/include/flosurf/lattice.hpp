#pragma once

#include <array>
#include <string>
#include <vector>

#include "flosurf/majorana_algebra.hpp"

namespace flosurf {

enum class FaceType { X, Z };

/// A parity check of the rotated surface code. Bulk faces have four corners,
/// boundary faces two. (row, col) is the face's position on the dual grid:
/// bulk face (i, j) sits between qubit rows i, i+1 and columns j, j+1, so
/// boundary faces have row or column equal to -1 or d-1.
struct Face {
  FaceType type;
  int row;
  int col;
  std::vector<int> qubits;
};

/// Distance-d rotated surface code patch. Qubits are indexed row-major from
/// the top-left corner. Top and bottom boundaries carry X checks, left and
/// right boundaries Z checks; logical X runs down the left column and logical
/// Z along the top row.
struct CodePatch {
  int d = 0;
  std::vector<Face> x_faces;
  std::vector<Face> z_faces;
  std::vector<int> x_logical_support;
  std::vector<int> z_logical_support;

  int num_qubits() const { return d * d; }
  int num_stabilizers() const { return static_cast<int>(x_faces.size() + z_faces.size()); }
  int qubit(int row, int col) const { return row * d + col; }
  int row_of(int q) const { return q / d; }
  int col_of(int q) const { return q % d; }

  /// Normalisation of the logical basis states, 2^((d^2-1)/4).
  double normalization() const;

  /// Indices of the X faces containing qubit q (zero, one or two entries).
  const std::vector<int>& x_faces_of(int q) const { return qubit_x_faces_[q]; }

  friend CodePatch build_patch(int d);

 private:
  std::vector<std::vector<int>> qubit_x_faces_;
};

/// Throws std::invalid_argument unless d is odd and positive.
CodePatch build_patch(int d);

/// Majorana pairs representing single-qubit operators inside one C4 code.
/// x, z, y are the encoded Paulis; sx = S*X is the pair measured to project
/// the qubit back into the C4 code space.
struct QubitPauliReps {
  MajoranaPair x;
  MajoranaPair z;
  MajoranaPair y;
  MajoranaPair sx;
};

enum class LogicalBasis { Plus, Y };

/// Majorana representation of a code patch. Qubit m owns Majoranas 4m..4m+3
/// (its C4 code c1..c4). Every Majorana belongs to exactly one link operator
/// except four corner Majoranas, which together form the logical C4 code.
struct MajoranaNetwork {
  int d = 0;
  int majorana_count = 0;
  std::vector<std::array<int, 4>> c4_groups;
  /// Majorana of each qubit pointing up, right, down and left on the grid.
  std::vector<std::array<int, 4>> by_direction;
  std::vector<MajoranaPair> link_ops;
  /// Corner Majoranas (c1^L, c2^L, c3^L, c4^L); logical X_C4 lives on
  /// (c1^L, c2^L) and logical Z_C4 on (c2^L, c3^L).
  std::array<int, 4> logical_c4{};
  std::vector<QubitPauliReps> pauli_reps;

  /// Logical C4 bilinears and the complementary corner pair whose orientation
  /// puts the link state in the sector where all C4 projections survive.
  MajoranaPair logical_x;
  MajoranaPair logical_z;
  MajoranaPair logical_y;
  MajoranaPair plus_partner;
  MajoranaPair y_partner;

  int mode_count() const { return majorana_count / 2; }

  /// Pairs whose +1 stabilisation defines |Phi_link> (x) |psi^L_C4>.
  std::vector<MajoranaPair> initial_pairs(LogicalBasis basis) const;
};

/// Builds the network and verifies every face product symbolically. Throws
/// std::logic_error if the verification fails.
MajoranaNetwork build_majorana_network(const CodePatch& patch);

/// Result of the symbolic checks on a network.
struct NetworkCheck {
  bool faces_ok = true;
  bool logicals_ok = true;
  bool parity_ok = true;
  std::vector<std::string> failures;

  bool ok() const { return faces_ok && logicals_ok && parity_ok; }
};

/// Re-derives, with exact sign bookkeeping, that the product of link
/// operators around each face equals its stabiliser, that the logical
/// operators factor through the logical C4 bilinears, and that the initial
/// pairs fix the total parity to the sector surviving all C4 projections.
NetworkCheck verify_network(const CodePatch& patch, const MajoranaNetwork& network);

/// Stabiliser S_f of a face written with the Majorana Pauli representation.
MajoranaMonomial face_stabilizer(const CodePatch& patch, const MajoranaNetwork& network,
                                 const Face& face);

/// Product of the link operators whose endpoints both lie in the face's
/// corner Majoranas.
MajoranaMonomial face_link_product(const CodePatch& patch, const MajoranaNetwork& network,
                                   const Face& face);

/// Debug dump as a JSON document: qubit coordinates, face supports, link
/// pairs and the logical corner Majoranas.
std::string lattice_dump_json(const CodePatch& patch, const MajoranaNetwork& network);

}  // namespace flosurf
