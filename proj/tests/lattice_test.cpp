#include "flosurf/lattice.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"

using namespace flosurf;

namespace {

int count_weight(const std::vector<Face>& faces, std::size_t w) {
  return static_cast<int>(std::count_if(faces.begin(), faces.end(),
                                        [w](const Face& f) { return f.qubits.size() == w; }));
}

bool commute(const Face& x, const Face& z) {
  int overlap = 0;
  for (int q : x.qubits) overlap += std::count(z.qubits.begin(), z.qubits.end(), q);
  return overlap % 2 == 0;
}

}  // namespace

TEST(Patch, RejectsEvenOrNonPositiveDistance) {
  EXPECT_THROW(build_patch(0), std::invalid_argument);
  EXPECT_THROW(build_patch(2), std::invalid_argument);
  EXPECT_THROW(build_patch(-3), std::invalid_argument);
}

TEST(Patch, DistanceThreeLayout) {
  const CodePatch p = build_patch(3);
  EXPECT_EQ(p.num_qubits(), 9);
  EXPECT_EQ(p.x_faces.size(), 4u);
  EXPECT_EQ(p.z_faces.size(), 4u);
  EXPECT_EQ(count_weight(p.x_faces, 4), 2);
  EXPECT_EQ(count_weight(p.x_faces, 2), 2);
  EXPECT_EQ(p.x_logical_support, (std::vector<int>{0, 3, 6}));
  EXPECT_EQ(p.z_logical_support, (std::vector<int>{0, 1, 2}));
  EXPECT_DOUBLE_EQ(p.normalization(), 4.0);
}

class PatchSizes : public ::testing::TestWithParam<int> {};

TEST_P(PatchSizes, StabilizerCountsAndCommutation) {
  const int d = GetParam();
  const CodePatch p = build_patch(d);
  EXPECT_EQ(p.num_stabilizers(), d * d - 1);
  EXPECT_EQ(p.x_faces.size(), p.z_faces.size());
  for (const Face& x : p.x_faces) {
    for (const Face& z : p.z_faces) EXPECT_TRUE(commute(x, z));
  }
  // Logical X (on the left column) commutes with Z faces, logical Z (top row)
  // with X faces, and they overlap on a single qubit.
  Face lx{FaceType::X, 0, 0, p.x_logical_support};
  Face lz{FaceType::Z, 0, 0, p.z_logical_support};
  for (const Face& z : p.z_faces) EXPECT_TRUE(commute(lx, z));
  for (const Face& x : p.x_faces) EXPECT_TRUE(commute(x, lz));
  EXPECT_FALSE(commute(lx, lz));
  EXPECT_DOUBLE_EQ(p.normalization(), std::pow(2.0, (d * d - 1) / 4.0));
}

TEST_P(PatchSizes, QubitXFaceIncidence) {
  const int d = GetParam();
  const CodePatch p = build_patch(d);
  for (int q = 0; q < p.num_qubits(); ++q) {
    const auto expected = (d > 1 && (p.col_of(q) == 0 || p.col_of(q) == d - 1)) ? 1u : 2u;
    if (d == 1) {
      EXPECT_TRUE(p.x_faces_of(q).empty());
    } else {
      EXPECT_EQ(p.x_faces_of(q).size(), expected) << "qubit " << q;
    }
  }
}

TEST_P(PatchSizes, NetworkVerifies) {
  const int d = GetParam();
  const CodePatch p = build_patch(d);
  const MajoranaNetwork net = build_majorana_network(p);
  EXPECT_EQ(net.majorana_count, 4 * d * d);
  EXPECT_EQ(static_cast<int>(net.link_ops.size()), 2 * d * d - 2);
  const NetworkCheck check = verify_network(p, net);
  EXPECT_TRUE(check.ok());
  for (const auto& f : check.failures) ADD_FAILURE() << f;

  // Every Majorana is used exactly once by the links and logical corners.
  std::multiset<int> used;
  for (const auto& l : net.link_ops) {
    used.insert(l.first);
    used.insert(l.second);
  }
  for (int m : net.logical_c4) used.insert(m);
  for (int m = 0; m < net.majorana_count; ++m) EXPECT_EQ(used.count(m), 1u) << m;

  for (const auto basis : {LogicalBasis::Plus, LogicalBasis::Y}) {
    const auto pairs = net.initial_pairs(basis);
    EXPECT_EQ(static_cast<int>(pairs.size()), net.mode_count());
  }
}

TEST_P(PatchSizes, LogicalCornerLabels) {
  const CodePatch p = build_patch(GetParam());
  const MajoranaNetwork net = build_majorana_network(p);
  const auto& c = net.logical_c4;
  const std::set<int> x{net.logical_x.first, net.logical_x.second};
  const std::set<int> z{net.logical_z.first, net.logical_z.second};
  EXPECT_EQ(x, (std::set<int>{c[0], c[1]}));
  EXPECT_EQ(z, (std::set<int>{c[1], c[2]}));
  const std::set<int> y{net.logical_y.first, net.logical_y.second};
  EXPECT_EQ(y, (std::set<int>{c[0], c[2]}));
}

INSTANTIATE_TEST_SUITE_P(Distances, PatchSizes, ::testing::Values(1, 3, 5, 7, 9, 11));

TEST(Network, DistanceOneIsSingleC4) {
  const MajoranaNetwork net = build_majorana_network(build_patch(1));
  EXPECT_EQ(net.majorana_count, 4);
  EXPECT_TRUE(net.link_ops.empty());
  EXPECT_EQ(net.logical_x, (MajoranaPair{0, 1}));
  EXPECT_EQ(net.logical_z, (MajoranaPair{1, 2}));
  EXPECT_EQ(net.logical_y, (MajoranaPair{2, 0}));
  EXPECT_EQ(net.plus_partner, (MajoranaPair{2, 3}));
}

TEST(Network, TamperedLinkFailsVerification) {
  const CodePatch p = build_patch(3);
  MajoranaNetwork net = build_majorana_network(p);
  net.link_ops[0] = net.link_ops[0].reversed();
  const NetworkCheck check = verify_network(p, net);
  EXPECT_FALSE(check.faces_ok);
  EXPECT_FALSE(check.failures.empty());
}

TEST(Network, DumpIsValidJson) {
  const CodePatch p = build_patch(3);
  const MajoranaNetwork net = build_majorana_network(p);
  const auto doc = nlohmann::json::parse(lattice_dump_json(p, net));
  EXPECT_EQ(doc["d"], 3);
  EXPECT_EQ(doc["qubits"].size(), 9u);
  EXPECT_EQ(doc["links"].size(), 16u);
  EXPECT_EQ(doc["logical_c4"].size(), 4u);
}
