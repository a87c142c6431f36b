#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "fpsub/moments.hpp"
#include "fpsub/nc_partitions.hpp"

namespace fpsub::testing {

// Test-side evaluation of kappa_pi by interval contraction, using only the
// public joint_cumulant entry point on explicit sub-words.
inline CMatrix kappa_pi(const MatrixModel& m, std::vector<std::string> letters,
                 std::vector<CMatrix> coeffs, const NCPartition& pi) {
  std::vector<int> label(pi.k);
  for (std::size_t b = 0; b < pi.blocks.size(); ++b)
    for (int i : pi.blocks[b]) label[i] = int(b);
  const int n = m.base_dim();
  CMatrix left = identity(n), right = identity(n);
  while (true) {
    NCPartition cur{int(letters.size()), {}};
    std::map<int, std::vector<int>> blocks;
    for (int i = 0; i < cur.k; ++i) blocks[label[i]].push_back(i);
    for (auto& [l, b] : blocks) cur.blocks.push_back(b);
    std::sort(cur.blocks.begin(), cur.blocks.end());
    const auto& blk = cur.blocks[find_interval_block(cur)];
    const int p = blk.front(), s = int(blk.size());
    std::vector<std::string> sub(letters.begin() + p, letters.begin() + p + s);
    std::vector<CMatrix> subc(coeffs.begin() + p, coeffs.begin() + p + s - 1);
    CMatrix v = joint_cumulant(m, sub, subc);
    if (s == int(letters.size())) return left * v * right;
    if (p == 0) {
      left = left * v * coeffs[s - 1];
      coeffs.erase(coeffs.begin(), coeffs.begin() + s);
    } else if (p + s == int(letters.size())) {
      right = coeffs[p - 1] * v * right;
      coeffs.erase(coeffs.begin() + p - 1, coeffs.end());
    } else {
      CMatrix c = coeffs[p - 1] * v * coeffs[p + s - 1];
      coeffs.erase(coeffs.begin() + p, coeffs.begin() + p + s);
      coeffs[p - 1] = c;
    }
    letters.erase(letters.begin() + p, letters.begin() + p + s);
    label.erase(label.begin() + p, label.begin() + p + s);
  }
}

}  // namespace fpsub::testing
