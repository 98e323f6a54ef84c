#pragma once

#include <cstdint>
#include <vector>

namespace flosurf {

struct WeightedEdge {
  int u;
  int v;
  std::int64_t weight;
};

/// Maximum-weight matching on a general graph by Edmonds' blossom algorithm
/// with dual variables, O(V^3). With max_cardinality the result is a
/// maximum-weight matching among the maximum-cardinality ones. Returns the
/// mate of every vertex, -1 if unmatched.
std::vector<int> max_weight_matching(int vertices, const std::vector<WeightedEdge>& edges,
                                     bool max_cardinality);

/// Minimum-weight perfect matching; throws std::runtime_error if the graph
/// has no perfect matching.
std::vector<int> min_weight_perfect_matching(int vertices, const std::vector<WeightedEdge>& edges);

}  // namespace flosurf
