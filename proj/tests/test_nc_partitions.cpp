#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <set>

#include "fpsub/errors.hpp"
#include "fpsub/nc_partitions.hpp"

using namespace fpsub;

namespace {

// Brute force: every set partition via restricted growth strings.
std::vector<std::vector<int>> all_set_partitions(int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> rgs(k, 0);
  std::function<void(int, int)> rec = [&](int i, int maxlabel) {
    if (i == k) {
      out.push_back(rgs);
      return;
    }
    for (int l = 0; l <= maxlabel + 1; ++l) {
      rgs[i] = l;
      rec(i + 1, std::max(maxlabel, l));
    }
  };
  rgs[0] = 0;
  rec(1, 0);
  return out;
}

// Quadruple scan, independent of the library's check.
bool crossing_free(const std::vector<int>& label) {
  const int k = int(label.size());
  for (int p = 0; p < k; ++p)
    for (int q = p + 1; q < k; ++q)
      for (int r = q + 1; r < k; ++r)
        for (int s = r + 1; s < k; ++s)
          if (label[p] == label[r] && label[q] == label[s] && label[p] != label[q]) return false;
  return true;
}

std::vector<int> labels_of(const NCPartition& p) {
  // canonical restricted growth string
  std::vector<int> label(p.k);
  for (std::size_t b = 0; b < p.blocks.size(); ++b)
    for (int i : p.blocks[b]) label[i] = int(b);
  std::vector<int> remap(p.blocks.size(), -1);
  int next = 0;
  for (int& l : label) {
    if (remap[l] < 0) remap[l] = next++;
    l = remap[l];
  }
  return label;
}

long catalan(int k) {
  std::vector<long> c(k + 1, 0);
  c[0] = 1;
  for (int n = 1; n <= k; ++n)
    for (int i = 0; i < n; ++i) c[n] += c[i] * c[n - 1 - i];
  return c[k];
}

NCPartition make(int k, std::vector<std::vector<int>> blocks) { return NCPartition{k, blocks}; }

}  // namespace

TEST(EnumerateNC, SmallCounts) {
  EXPECT_EQ(enumerate_nc(1).size(), 1u);
  EXPECT_EQ(enumerate_nc(4).size(), 14u);
  EXPECT_EQ(enumerate_nc(6).size(), 132u);
}

TEST(EnumerateNC, MatchesBruteForceFilter) {
  for (int k = 1; k <= 7; ++k) {
    std::set<std::vector<int>> expected;
    for (const auto& rgs : all_set_partitions(k))
      if (crossing_free(rgs)) expected.insert(rgs);
    std::set<std::vector<int>> got;
    for (const auto& p : enumerate_nc(k)) {
      EXPECT_TRUE(is_valid_set_partition(p));
      EXPECT_TRUE(got.insert(labels_of(p)).second) << "duplicate partition for k=" << k;
    }
    EXPECT_EQ(got, expected) << "k=" << k;
  }
  EXPECT_EQ(all_set_partitions(4).size(), 15u);
}

TEST(EnumerateNC, CatalanCountsAndInvariants) {
  for (int k = 1; k <= 10; ++k) {
    const auto parts = enumerate_nc(k);
    EXPECT_EQ(long(parts.size()), catalan(k)) << "k=" << k;
    for (const auto& p : parts) {
      ASSERT_TRUE(is_noncrossing(p));
      const auto& b = p.blocks[find_interval_block(p)];
      EXPECT_EQ(b.back() - b.front() + 1, int(b.size()));
    }
  }
}

TEST(EnumerateNC, DeterministicOrderAndCap) {
  EXPECT_EQ(enumerate_nc(5), enumerate_nc(5));
  EXPECT_THROW(enumerate_nc(13), CapExceeded);
  EXPECT_NO_THROW(enumerate_nc(13, 13));
  EXPECT_THROW(enumerate_nc(0), DimensionError);
}

TEST(IsNoncrossing, CanonicalCases) {
  EXPECT_FALSE(is_noncrossing(make(4, {{0, 2}, {1, 3}})));
  EXPECT_TRUE(is_noncrossing(make(4, {{0, 3}, {1, 2}})));
  for (int k = 1; k <= 6; ++k)
    for (const auto& rgs : all_set_partitions(k)) {
      NCPartition p{k, {}};
      int nb = *std::max_element(rgs.begin(), rgs.end()) + 1;
      p.blocks.resize(nb);
      for (int i = 0; i < k; ++i) p.blocks[rgs[i]].push_back(i);
      EXPECT_EQ(is_noncrossing(p), crossing_free(rgs));
    }
}

TEST(FindIntervalBlock, TieBreaks) {
  auto pick = [](const NCPartition& p) { return p.blocks[find_interval_block(p)]; };
  EXPECT_EQ(pick(make(3, {{0, 1, 2}})), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(pick(make(4, {{0, 3}, {1, 2}})), (std::vector<int>{1, 2}));
  EXPECT_EQ(pick(make(4, {{0}, {1, 2}, {3}})), (std::vector<int>{0}));
}

TEST(Monochromatic, Cases) {
  std::vector<int> same{1, 1, 1, 1};
  for (const auto& p : enumerate_nc(4)) EXPECT_TRUE(is_monochromatic(p, same));
  std::vector<int> c12{1, 2};
  EXPECT_FALSE(is_monochromatic(make(2, {{0, 1}}), c12));
  std::vector<int> c1221{1, 2, 2, 1};
  EXPECT_TRUE(is_monochromatic(make(4, {{0, 3}, {1, 2}}), c1221));
}

TEST(Monochromatic, EnumerationIsTheFilteredSet) {
  std::vector<std::vector<int>> colorings{{1, 2, 1, 2, 1, 2}, {1, 1, 2, 1, 2, 2, 1}, {2, 2, 2}};
  for (const auto& colors : colorings) {
    std::set<std::vector<int>> expected, got;
    for (const auto& p : enumerate_nc(int(colors.size())))
      if (is_monochromatic(p, colors)) expected.insert(labels_of(p));
    for (const auto& p : enumerate_nc_monochromatic(colors)) {
      EXPECT_TRUE(is_noncrossing(p));
      got.insert(labels_of(p));
    }
    EXPECT_EQ(got, expected);
  }
}
