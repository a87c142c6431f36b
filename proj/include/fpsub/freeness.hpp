#pragma once

#include <concepts>
#include <sstream>
#include <utility>
#include <vector>

#include "fpsub/algebra.hpp"
#include "fpsub/check_report.hpp"
#include "fpsub/rng.hpp"

namespace fpsub {

/// A joint realization of two classes whose alternating centred words can be
/// evaluated: generators (cls, index) are centred inside the realization.
template <typename R>
concept FreenessRealization =
    requires(const R& r, int cls, const std::vector<std::pair<int, int>>& seq,
             const std::vector<CMatrix>& coeffs) {
      { r.base() } -> std::convertible_to<const BaseAlgebra&>;
      { r.generator_count(cls) } -> std::convertible_to<int>;
      { r.centred_word_moment(seq, coeffs) } -> std::convertible_to<CMatrix>;
    };

inline constexpr int kFreenessOrderCap = 6;

/// Max of |E[a_1 c_1 a_2 ... a_m]| over class-alternating words of centred
/// generators, m <= order, every generator choice, with B coefficients drawn
/// from the counter generator (unit spectral norm, projected to the base
/// pattern). Passes iff the max is <= tolerance.
template <FreenessRealization R>
CheckReport verify_freeness(const R& r, int order, double tolerance, std::uint64_t seed = 0) {
  const char* check = "freeness";
  const char* anchor = "E[a1 a2 ... am] = 0 for alternating centred a_i";
  if (order < 1 || order > kFreenessOrderCap) {
    std::ostringstream msg;
    msg << "freeness order " << order << " outside [1, " << kFreenessOrderCap << "]";
    throw CapExceeded(msg.str());
  }
  const BaseAlgebra& base = r.base();
  const int d = base.dim();
  CounterRng rng(seed, 0x46524545);  // stream "FREE"
  double worst = 0.0;
  long words = 0;
  for (int m = 1; m <= order; ++m) {
    for (int first = 1; first <= 2; ++first) {
      std::vector<int> counts(m);
      for (int i = 0; i < m; ++i) counts[i] = r.generator_count((i % 2 == 0) ? first : 3 - first);
      std::vector<int> idx(m, 0);
      while (true) {
        std::vector<std::pair<int, int>> seq(m);
        for (int i = 0; i < m; ++i) seq[i] = {(i % 2 == 0) ? first : 3 - first, idx[i]};
        std::vector<CMatrix> coeffs;
        for (int i = 0; i + 1 < m; ++i) {
          CMatrix c = base.project(rng.gaussian_matrix(d, d));
          coeffs.push_back(c / spectral_norm(c));
        }
        worst = std::max(worst, spectral_norm(r.centred_word_moment(seq, coeffs)));
        ++words;
        int k = 0;
        while (k < m && ++idx[k] == counts[k]) idx[k++] = 0;
        if (k == m) break;
      }
    }
  }
  CheckReport rep = CheckReport::make(check, anchor, worst, tolerance);
  std::ostringstream note;
  note << "order=" << order << " words=" << words;
  rep.note = note.str();
  return rep;
}

/// Both classes read off one matrix model: E of a word is the ambient
/// expectation. Freeness holds only in degenerate cases, which makes this the
/// negative control.
class AmbientRealization {
 public:
  AmbientRealization(MatrixModel model, std::vector<CMatrix> class1, std::vector<CMatrix> class2)
      : model_(std::move(model)) {
    for (int k = 0; k < 2; ++k)
      for (const CMatrix& g : k == 0 ? class1 : class2)
        centred_[k].push_back(g - embed(expect(g, model_), model_));
  }

  const BaseAlgebra& base() const { return model_.base(); }
  int generator_count(int cls) const { return int(centred_.at(cls - 1).size()); }

  CMatrix centred_word_moment(const std::vector<std::pair<int, int>>& seq,
                              const std::vector<CMatrix>& coeffs) const {
    CMatrix p = centred_.at(seq[0].first - 1).at(seq[0].second);
    for (std::size_t i = 1; i < seq.size(); ++i)
      p = p * embed(coeffs[i - 1], model_) * centred_.at(seq[i].first - 1).at(seq[i].second);
    return expect(p, model_);
  }

 private:
  MatrixModel model_;
  std::array<std::vector<CMatrix>, 2> centred_;
};

}  // namespace fpsub
