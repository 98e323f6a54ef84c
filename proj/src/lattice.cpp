#include "flosurf/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace flosurf {

namespace {

enum Dir { Up = 0, Right = 1, Down = 2, Left = 3 };

bool face_is_x(int row, int col) { return ((row + col) % 2 + 2) % 2 == 1; }

// Dense GF(2) system; each row holds the coefficients followed by the
// right-hand side bit.
class Gf2System {
 public:
  explicit Gf2System(int vars) : vars_(vars), words_((vars + 1 + 63) / 64) {}

  void add_row(const std::vector<int>& vars, bool rhs) {
    std::vector<std::uint64_t> row(words_, 0);
    for (int v : vars) row[v / 64] ^= 1ULL << (v % 64);
    if (rhs) row[vars_ / 64] ^= 1ULL << (vars_ % 64);
    rows_.push_back(std::move(row));
  }

  std::optional<std::vector<std::uint8_t>> solve() {
    std::vector<int> pivots;
    std::size_t rank = 0;
    for (int col = 0; col < vars_ && rank < rows_.size(); ++col) {
      std::size_t pivot = rank;
      while (pivot < rows_.size() && !bit(rows_[pivot], col)) ++pivot;
      if (pivot == rows_.size()) continue;
      std::swap(rows_[rank], rows_[pivot]);
      for (std::size_t r = 0; r < rows_.size(); ++r) {
        if (r != rank && bit(rows_[r], col)) {
          for (int w = 0; w < words_; ++w) rows_[r][w] ^= rows_[rank][w];
        }
      }
      pivots.push_back(col);
      ++rank;
    }
    for (std::size_t r = rank; r < rows_.size(); ++r) {
      if (bit(rows_[r], vars_)) return std::nullopt;
    }
    std::vector<std::uint8_t> x(vars_, 0);
    for (std::size_t r = 0; r < rank; ++r) x[pivots[r]] = bit(rows_[r], vars_) ? 1 : 0;
    return x;
  }

 private:
  static bool bit(const std::vector<std::uint64_t>& row, int i) {
    return (row[i / 64] >> (i % 64)) & 1ULL;
  }

  int vars_;
  int words_;
  std::vector<std::vector<std::uint64_t>> rows_;
};

// Corner Majoranas of `face` at qubit (r, c), ordered by C4 label, which is
// the orientation of the Pauli they represent in that region.
MajoranaPair corner_pair(const MajoranaNetwork& net, const CodePatch& patch, const Face& face,
                         int q) {
  const int r = patch.row_of(q);
  const int c = patch.col_of(q);
  Dir a;
  Dir b;
  if (r == face.row && c == face.col) {
    a = Right, b = Down;
  } else if (r == face.row && c == face.col + 1) {
    a = Down, b = Left;
  } else if (r == face.row + 1 && c == face.col) {
    a = Up, b = Right;
  } else if (r == face.row + 1 && c == face.col + 1) {
    a = Left, b = Up;
  } else {
    throw std::logic_error("qubit is not a corner of the face");
  }
  int ma = net.by_direction[q][a];
  int mb = net.by_direction[q][b];
  if (ma > mb) std::swap(ma, mb);
  return {ma, mb};
}

MajoranaMonomial monomial(const MajoranaPair& p) { return MajoranaMonomial::bilinear(p.first, p.second); }

MajoranaMonomial qubit_stabilizer(int q) {
  return MajoranaMonomial::product({4 * q, 4 * q + 1, 4 * q + 2, 4 * q + 3}, 2);
}

// Turns a Hermitian bilinear monomial into the oriented pair it stands for.
std::optional<MajoranaPair> as_pair(const MajoranaMonomial& m) {
  if (m.support().size() != 2) return std::nullopt;
  if (m.i_power() == 1) return MajoranaPair{m.support()[0], m.support()[1]};
  if (m.i_power() == 3) return MajoranaPair{m.support()[1], m.support()[0]};
  return std::nullopt;
}

// Multiplies `op` by qubit stabilisers and link operators until its support
// lies on the corner Majoranas, and returns the remaining bilinear.
std::optional<MajoranaPair> reduce_to_corners(const MajoranaNetwork& net,
                                              const MajoranaMonomial& op) {
  const int n = static_cast<int>(net.c4_groups.size());
  const int links = static_cast<int>(net.link_ops.size());
  std::vector<int> link_of(net.majorana_count, -1);
  for (int e = 0; e < links; ++e) {
    link_of[net.link_ops[e].first] = e;
    link_of[net.link_ops[e].second] = e;
  }
  std::vector<std::uint8_t> in_op(net.majorana_count, 0);
  for (int m : op.support()) in_op[m] = 1;

  Gf2System system(n + links);
  for (int mu = 0; mu < net.majorana_count; ++mu) {
    if (link_of[mu] < 0) continue;
    system.add_row({mu / 4, n + link_of[mu]}, in_op[mu] != 0);
  }
  auto x = system.solve();
  if (!x) return std::nullopt;

  MajoranaMonomial out = op;
  for (int j = 0; j < n; ++j) {
    if ((*x)[j]) out *= qubit_stabilizer(j);
  }
  for (int e = 0; e < links; ++e) {
    if ((*x)[n + e]) out *= monomial(net.link_ops[e]);
  }
  return as_pair(out);
}

MajoranaMonomial x_logical_rep(const CodePatch& patch, const MajoranaNetwork& net) {
  MajoranaMonomial m;
  for (int q : patch.x_logical_support) m *= monomial(net.pauli_reps[q].x);
  return m;
}

MajoranaMonomial z_logical_rep(const CodePatch& patch, const MajoranaNetwork& net) {
  MajoranaMonomial m;
  for (int q : patch.z_logical_support) m *= monomial(net.pauli_reps[q].z);
  return m;
}

// Sign r in prod_j S_j = r * prod(pairs); 0 if the supports differ.
int parity_sign(const MajoranaNetwork& net, const std::vector<MajoranaPair>& pairs) {
  MajoranaMonomial total;
  for (int j = 0; j < static_cast<int>(net.c4_groups.size()); ++j) total *= qubit_stabilizer(j);
  MajoranaMonomial prod;
  for (const auto& p : pairs) prod *= monomial(p);
  if (total.support() != prod.support()) return 0;
  const int diff = ((total.i_power() - prod.i_power()) % 4 + 4) % 4;
  if (diff == 0) return 1;
  if (diff == 2) return -1;
  return 0;
}

MajoranaPair orient_partner(const MajoranaNetwork& net, MajoranaPair logical,
                            MajoranaPair partner) {
  std::vector<MajoranaPair> pairs = net.link_ops;
  pairs.push_back(logical);
  pairs.push_back(partner);
  const int r = parity_sign(net, pairs);
  if (r == 0) throw std::logic_error("partner pair does not complete the Majorana set");
  return r == 1 ? partner : partner.reversed();
}

MajoranaPair complement(const std::array<int, 4>& corners, MajoranaPair used) {
  std::vector<int> rest;
  for (int m : corners) {
    if (m != used.first && m != used.second) rest.push_back(m);
  }
  if (rest.size() != 2) throw std::logic_error("logical pair is not on the corners");
  return {rest[0], rest[1]};
}

}  // namespace

double CodePatch::normalization() const {
  return std::pow(2.0, static_cast<double>(d * d - 1) / 4.0);
}

CodePatch build_patch(int d) {
  if (d < 1 || d % 2 == 0) throw std::invalid_argument("code distance must be odd and positive");
  CodePatch p;
  p.d = d;
  auto add = [&p](int row, int col, std::vector<int> qubits) {
    Face f{face_is_x(row, col) ? FaceType::X : FaceType::Z, row, col, std::move(qubits)};
    (f.type == FaceType::X ? p.x_faces : p.z_faces).push_back(std::move(f));
  };
  for (int i = 0; i + 1 < d; ++i) {
    for (int j = 0; j + 1 < d; ++j) {
      add(i, j, {p.qubit(i, j), p.qubit(i, j + 1), p.qubit(i + 1, j), p.qubit(i + 1, j + 1)});
    }
  }
  for (int j = 0; j + 1 < d; j += 2) add(-1, j, {p.qubit(0, j), p.qubit(0, j + 1)});
  for (int j = 1; j + 1 < d; j += 2) add(d - 1, j, {p.qubit(d - 1, j), p.qubit(d - 1, j + 1)});
  for (int i = 1; i + 1 < d; i += 2) add(i, -1, {p.qubit(i, 0), p.qubit(i + 1, 0)});
  for (int i = 0; i + 1 < d; i += 2) add(i, d - 1, {p.qubit(i, d - 1), p.qubit(i + 1, d - 1)});

  for (int i = 0; i < d; ++i) p.x_logical_support.push_back(p.qubit(i, 0));
  for (int j = 0; j < d; ++j) p.z_logical_support.push_back(p.qubit(0, j));

  p.qubit_x_faces_.assign(d * d, {});
  for (int f = 0; f < static_cast<int>(p.x_faces.size()); ++f) {
    for (int q : p.x_faces[f].qubits) p.qubit_x_faces_[q].push_back(f);
  }
  return p;
}

std::vector<MajoranaPair> MajoranaNetwork::initial_pairs(LogicalBasis basis) const {
  std::vector<MajoranaPair> pairs = link_ops;
  if (basis == LogicalBasis::Plus) {
    pairs.push_back(logical_x);
    pairs.push_back(plus_partner);
  } else {
    pairs.push_back(logical_y);
    pairs.push_back(y_partner);
  }
  return pairs;
}

MajoranaNetwork build_majorana_network(const CodePatch& patch) {
  const int d = patch.d;
  const int n = patch.num_qubits();
  MajoranaNetwork net;
  net.d = d;
  net.majorana_count = 4 * n;
  net.c4_groups.resize(n);
  net.by_direction.resize(n);
  net.pauli_reps.resize(n);
  for (int q = 0; q < n; ++q) {
    const int base = 4 * q;
    net.c4_groups[q] = {base, base + 1, base + 2, base + 3};
    const int r = patch.row_of(q);
    const int c = patch.col_of(q);
    // The labelling puts c1 and c2 on the X-type regions around the qubit.
    if (face_is_x(r - 1, c)) {
      net.by_direction[q] = {base, base + 1, base + 2, base + 3};
    } else {
      net.by_direction[q] = {base + 3, base, base + 1, base + 2};
    }
    net.pauli_reps[q] = {{base, base + 1}, {base + 1, base + 2}, {base + 2, base}, {base + 2, base + 3}};
  }

  auto link = [&net](int a, int b) { net.link_ops.push_back({std::min(a, b), std::max(a, b)}); };
  const auto& dir = net.by_direction;
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c + 1 < d; ++c) link(dir[patch.qubit(r, c)][Right], dir[patch.qubit(r, c + 1)][Left]);
  }
  for (int r = 0; r + 1 < d; ++r) {
    for (int c = 0; c < d; ++c) link(dir[patch.qubit(r, c)][Down], dir[patch.qubit(r + 1, c)][Up]);
  }
  for (const auto* faces : {&patch.x_faces, &patch.z_faces}) {
    for (const Face& f : *faces) {
      if (f.qubits.size() != 2) continue;
      Dir out = f.row < 0 ? Up : f.row == d - 1 ? Down : f.col < 0 ? Left : Right;
      link(dir[f.qubits[0]][out], dir[f.qubits[1]][out]);
    }
  }

  // Flip link orientations so every face product carries a + sign.
  const int links = static_cast<int>(net.link_ops.size());
  if (links > 0) {
    std::vector<int> link_of(net.majorana_count, -1);
    for (int e = 0; e < links; ++e) {
      link_of[net.link_ops[e].first] = e;
      link_of[net.link_ops[e].second] = e;
    }
    Gf2System system(links);
    for (const auto* faces : {&patch.x_faces, &patch.z_faces}) {
      for (const Face& f : *faces) {
        const MajoranaMonomial target = face_stabilizer(patch, net, f);
        const MajoranaMonomial have = face_link_product(patch, net, f);
        if (target.support() != have.support()) throw std::logic_error("face links do not cover the face");
        const int diff = ((target.i_power() - have.i_power()) % 4 + 4) % 4;
        if (diff % 2 != 0) throw std::logic_error("face product has a non-real relative phase");
        std::set<int> in_face;
        for (int m : target.support()) in_face.insert(link_of[m]);
        system.add_row(std::vector<int>(in_face.begin(), in_face.end()), diff == 2);
      }
    }
    auto flips = system.solve();
    if (!flips) throw std::logic_error("no consistent link orientation exists");
    for (int e = 0; e < links; ++e) {
      if ((*flips)[e]) net.link_ops[e] = net.link_ops[e].reversed();
    }
  }

  std::vector<std::uint8_t> linked(net.majorana_count, 0);
  for (const auto& l : net.link_ops) linked[l.first] = linked[l.second] = 1;
  std::vector<int> corners;
  for (int m = 0; m < net.majorana_count; ++m) {
    if (!linked[m]) corners.push_back(m);
  }
  if (corners.size() != 4) throw std::logic_error("expected four unlinked corner Majoranas");

  auto lx = reduce_to_corners(net, x_logical_rep(patch, net));
  auto lz = reduce_to_corners(net, z_logical_rep(patch, net));
  if (!lx || !lz) throw std::logic_error("logical operator does not reduce to the corners");
  const MajoranaMonomial y_rep = x_logical_rep(patch, net) * z_logical_rep(patch, net);
  auto ly = reduce_to_corners(net, y_rep.times_i(1));
  if (!ly) throw std::logic_error("logical Y does not reduce to the corners");
  net.logical_x = *lx;
  net.logical_z = *lz;
  net.logical_y = *ly;

  int shared = -1;
  for (int m : {lx->first, lx->second}) {
    if (m == lz->first || m == lz->second) shared = m;
  }
  if (shared < 0) throw std::logic_error("logical X and Z pairs do not overlap");
  const int x_only = lx->first == shared ? lx->second : lx->first;
  const int z_only = lz->first == shared ? lz->second : lz->first;
  int last = -1;
  for (int m : corners) {
    if (m != shared && m != x_only && m != z_only) last = m;
  }
  net.logical_c4 = {x_only, shared, z_only, last};

  std::array<int, 4> corner_arr{corners[0], corners[1], corners[2], corners[3]};
  net.plus_partner = orient_partner(net, net.logical_x, complement(corner_arr, net.logical_x));
  net.y_partner = orient_partner(net, net.logical_y, complement(corner_arr, net.logical_y));

  NetworkCheck check = verify_network(patch, net);
  if (!check.ok()) {
    std::string msg = "Majorana network verification failed";
    for (const auto& f : check.failures) msg += "; " + f;
    throw std::logic_error(msg);
  }
  return net;
}

MajoranaMonomial face_stabilizer(const CodePatch& patch, const MajoranaNetwork& network,
                                 const Face& face) {
  MajoranaMonomial m;
  for (int q : face.qubits) m *= monomial(corner_pair(network, patch, face, q));
  return m;
}

MajoranaMonomial face_link_product(const CodePatch& patch, const MajoranaNetwork& network,
                                   const Face& face) {
  std::set<int> members;
  for (int q : face.qubits) {
    const MajoranaPair p = corner_pair(network, patch, face, q);
    members.insert(p.first);
    members.insert(p.second);
  }
  MajoranaMonomial m;
  for (const auto& l : network.link_ops) {
    if (members.count(l.first) && members.count(l.second)) m *= monomial(l);
  }
  return m;
}

NetworkCheck verify_network(const CodePatch& patch, const MajoranaNetwork& network) {
  NetworkCheck check;
  for (const auto* faces : {&patch.x_faces, &patch.z_faces}) {
    for (const Face& f : *faces) {
      // The corner pair of an X face must be the qubit's X-equivalent pair
      // and likewise for Z faces.
      for (int q : f.qubits) {
        const MajoranaPair p = corner_pair(network, patch, f, q);
        const int a = p.first - 4 * q;
        const int b = p.second - 4 * q;
        const bool x_like = (a == 0 && b == 1) || (a == 2 && b == 3);
        if (x_like != (f.type == FaceType::X)) {
          check.faces_ok = false;
          check.failures.push_back("face (" + std::to_string(f.row) + "," + std::to_string(f.col) +
                                   ") uses the wrong Pauli at qubit " + std::to_string(q));
        }
      }
      if (!(face_stabilizer(patch, network, f) == face_link_product(patch, network, f))) {
        check.faces_ok = false;
        check.failures.push_back("link product differs from stabiliser on face (" +
                                 std::to_string(f.row) + "," + std::to_string(f.col) + ")");
      }
    }
  }

  const auto lx = reduce_to_corners(network, x_logical_rep(patch, network));
  const auto lz = reduce_to_corners(network, z_logical_rep(patch, network));
  const auto ly = reduce_to_corners(
      network, (x_logical_rep(patch, network) * z_logical_rep(patch, network)).times_i(1));
  if (!lx || !(*lx == network.logical_x)) {
    check.logicals_ok = false;
    check.failures.push_back("logical X does not reduce to the stored corner pair");
  }
  if (!lz || !(*lz == network.logical_z)) {
    check.logicals_ok = false;
    check.failures.push_back("logical Z does not reduce to the stored corner pair");
  }
  if (!ly || !(*ly == network.logical_y)) {
    check.logicals_ok = false;
    check.failures.push_back("logical Y does not reduce to the stored corner pair");
  }

  for (LogicalBasis basis : {LogicalBasis::Plus, LogicalBasis::Y}) {
    if (parity_sign(network, network.initial_pairs(basis)) != 1) {
      check.parity_ok = false;
      check.failures.push_back(basis == LogicalBasis::Plus ? "|+> initial pairs have odd parity"
                                                           : "|Y> initial pairs have odd parity");
    }
  }
  return check;
}

std::string lattice_dump_json(const CodePatch& patch, const MajoranaNetwork& network) {
  using nlohmann::json;
  auto pair = [](const MajoranaPair& p) { return json::array({p.first, p.second}); };
  json doc;
  doc["d"] = patch.d;
  doc["majorana_count"] = network.majorana_count;
  json qubits = json::array();
  for (int q = 0; q < patch.num_qubits(); ++q) {
    const auto& dir = network.by_direction[q];
    qubits.push_back({{"index", q},
                      {"row", patch.row_of(q)},
                      {"col", patch.col_of(q)},
                      {"c4", network.c4_groups[q]},
                      {"up", dir[Up]},
                      {"right", dir[Right]},
                      {"down", dir[Down]},
                      {"left", dir[Left]}});
  }
  doc["qubits"] = qubits;
  auto faces = [](const std::vector<Face>& list) {
    json out = json::array();
    for (const Face& f : list) out.push_back({{"row", f.row}, {"col", f.col}, {"qubits", f.qubits}});
    return out;
  };
  doc["x_faces"] = faces(patch.x_faces);
  doc["z_faces"] = faces(patch.z_faces);
  doc["x_logical_support"] = patch.x_logical_support;
  doc["z_logical_support"] = patch.z_logical_support;
  json links = json::array();
  for (const auto& l : network.link_ops) links.push_back(pair(l));
  doc["links"] = links;
  doc["logical_c4"] = network.logical_c4;
  doc["logical_x"] = pair(network.logical_x);
  doc["logical_z"] = pair(network.logical_z);
  doc["logical_y"] = pair(network.logical_y);
  doc["plus_partner"] = pair(network.plus_partner);
  doc["y_partner"] = pair(network.y_partner);
  return doc.dump(2);
}

}  // namespace flosurf
