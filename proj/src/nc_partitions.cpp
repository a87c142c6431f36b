#include "fpsub/nc_partitions.hpp"

#include <algorithm>
#include <string>

#include "fpsub/errors.hpp"

namespace fpsub {

namespace {

// Element m may join `block` iff nothing in (max(block), m) belongs to a
// block reaching back below max(block).
bool can_join(const std::vector<int>& owner, const std::vector<std::vector<int>>& blocks,
              std::size_t block, int m) {
  const int top = blocks[block].back();
  for (int j = top + 1; j < m; ++j)
    if (blocks[owner[j]].front() < top) return false;
  return true;
}

template <typename Accept>
void extend(int k, int m, std::vector<std::vector<int>>& blocks, std::vector<int>& owner,
            const Accept& accept, std::vector<NCPartition>& out) {
  if (m == k) {
    out.push_back(NCPartition{k, blocks});
    return;
  }
  blocks.push_back({m});
  owner[m] = int(blocks.size()) - 1;
  extend(k, m + 1, blocks, owner, accept, out);
  blocks.pop_back();

  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (!accept(blocks[b], m) || !can_join(owner, blocks, b, m)) continue;
    blocks[b].push_back(m);
    owner[m] = int(b);
    extend(k, m + 1, blocks, owner, accept, out);
    blocks[b].pop_back();
  }
}

void check_cap(int k, int cap) {
  if (k < 1) throw DimensionError("non-crossing partitions need k >= 1");
  if (k > cap)
    throw CapExceeded("partition size " + std::to_string(k) + " exceeds cap " +
                      std::to_string(cap));
}

}  // namespace

std::vector<NCPartition> enumerate_nc(int k, int cap) {
  check_cap(k, cap);
  std::vector<NCPartition> out;
  std::vector<std::vector<int>> blocks;
  std::vector<int> owner(k, -1);
  extend(k, 0, blocks, owner, [](const std::vector<int>&, int) { return true; }, out);
  return out;
}

std::vector<NCPartition> enumerate_nc_monochromatic(std::span<const int> colors, int cap) {
  const int k = int(colors.size());
  check_cap(k, cap);
  std::vector<NCPartition> out;
  std::vector<std::vector<int>> blocks;
  std::vector<int> owner(k, -1);
  extend(
      k, 0, blocks, owner,
      [&](const std::vector<int>& block, int m) { return colors[block.front()] == colors[m]; },
      out);
  return out;
}

bool is_valid_set_partition(const NCPartition& p) {
  std::vector<int> seen(p.k, 0);
  for (const auto& block : p.blocks) {
    if (block.empty() || !std::is_sorted(block.begin(), block.end())) return false;
    for (int i : block) {
      if (i < 0 || i >= p.k || seen[i]) return false;
      seen[i] = 1;
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

bool is_noncrossing(const NCPartition& p) {
  std::vector<int> label(p.k);
  for (std::size_t b = 0; b < p.blocks.size(); ++b)
    for (int i : p.blocks[b]) label[i] = int(b);
  // Pairwise check: blocks A, B cross iff a1 < b1 < a2 < b2 for some
  // elements; scanning positions between consecutive elements of A suffices.
  for (std::size_t a = 0; a < p.blocks.size(); ++a) {
    const auto& A = p.blocks[a];
    for (std::size_t i = 0; i + 1 < A.size(); ++i) {
      // Any block with an element strictly inside (A[i], A[i+1]) must lie
      // entirely inside that gap.
      for (int q = A[i] + 1; q < A[i + 1]; ++q) {
        const auto& B = p.blocks[label[q]];
        if (B.front() < A[i] || B.back() > A[i + 1]) return false;
      }
    }
  }
  return true;
}

std::size_t find_interval_block(const NCPartition& p) {
  std::size_t best = p.blocks.size();
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const auto& block = p.blocks[b];
    if (block.back() - block.front() + 1 != int(block.size())) continue;
    if (best == p.blocks.size() || block.front() < p.blocks[best].front() ||
        (block.front() == p.blocks[best].front() && block.size() < p.blocks[best].size()))
      best = b;
  }
  if (best == p.blocks.size()) throw Error("find_interval_block: partition has no interval block");
  return best;
}

bool is_monochromatic(const NCPartition& p, std::span<const int> colors) {
  for (const auto& block : p.blocks)
    for (int i : block)
      if (colors[i] != colors[block.front()]) return false;
  return true;
}

}  // namespace fpsub
