#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fpsub {

inline constexpr int kPartitionCap = 12;

/// Set partition of {0, ..., k-1}. Blocks are sorted internally and ordered
/// by their least element.
struct NCPartition {
  int k = 0;
  std::vector<std::vector<int>> blocks;

  friend bool operator==(const NCPartition&, const NCPartition&) = default;
};

/// All non-crossing partitions of {0..k-1}, each exactly once, in the
/// deterministic order produced by inserting k-1 into NC(k-1) (singleton
/// first, then each admissible block left to right).
std::vector<NCPartition> enumerate_nc(int k, int cap = kPartitionCap);

/// Non-crossing partitions whose blocks each carry a single color.
/// Same ordering rule as enumerate_nc; `colors.size()` is the ground set.
std::vector<NCPartition> enumerate_nc_monochromatic(std::span<const int> colors,
                                                    int cap = kPartitionCap);

/// Blocks are disjoint, nonempty, sorted and cover {0..k-1}.
bool is_valid_set_partition(const NCPartition& p);

/// No p < q < r < s with p, r in one block and q, s in another.
bool is_noncrossing(const NCPartition& p);

/// Index of an interval block (consecutive integers): the leftmost one,
/// ties broken by length.
std::size_t find_interval_block(const NCPartition& p);

bool is_monochromatic(const NCPartition& p, std::span<const int> colors);

}  // namespace fpsub
