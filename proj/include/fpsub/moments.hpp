#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fpsub/algebra.hpp"
#include "fpsub/nc_partitions.hpp"

namespace fpsub {

/// A letter of a mixed word: free class (1 or 2) and element name in that
/// class's model.
struct Letter {
  int cls = 1;
  std::string name;

  friend bool operator==(const Letter&, const Letter&) = default;
};

/// a_1 c_1 a_2 ... c_{k-1} a_k, optionally framed as L (...) R.
struct Word {
  std::vector<Letter> letters;
  std::vector<CMatrix> coeffs;
  std::optional<CMatrix> left;
  std::optional<CMatrix> right;
};

struct EvalLimits {
  int word_cap = 10;    // free_mixed_moment
  int oracle_cap = 8;   // free_mixed_moment_oracle
  int partition_cap = kPartitionCap;
};

/// Thread-safe memo table keyed by hashed canonical word keys. Values are
/// deterministic, so concurrent writers may race harmlessly.
class MomentCache {
 public:
  using Key = std::vector<std::uint64_t>;

  std::optional<CMatrix> find(const Key& key) const;
  void insert(const Key& key, const CMatrix& value);
  std::size_t size() const;
  void clear();

 private:
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  mutable std::shared_mutex mutex_;
  std::unordered_map<Key, CMatrix, KeyHash> table_;
};

/// Hash of the exact entry bits of a matrix.
std::uint64_t matrix_key(const CMatrix& m);

/// Anything that can evaluate B-valued mixed moments of words over two free
/// classes. Implemented by FreePair (combinatorial freeness) and by the
/// triangular lift (block expansion onto a base FreePair).
class JointMoments {
 public:
  virtual ~JointMoments() = default;

  virtual const BaseAlgebra& base() const = 0;
  /// Model hosting class `cls` (1 or 2); used for single-class transforms.
  virtual const MatrixModel& model(int cls) const = 0;
  virtual CMatrix moment(const Word& w) const = 0;
  virtual const EvalLimits& limits() const = 0;
};

/// Two models over the same base algebra whose joint distribution is, by
/// definition, the E-free one: mixed cumulants vanish.
class FreePair : public JointMoments {
 public:
  FreePair(MatrixModel class1, MatrixModel class2, EvalLimits limits = {});

  const BaseAlgebra& base() const override { return models_[0]->base(); }
  const MatrixModel& model(int cls) const override;
  CMatrix moment(const Word& w) const override;
  const EvalLimits& limits() const override { return limits_; }

  MomentCache& cache() const { return *cache_; }

  /// Same models, with `name` added to / replaced in class `cls`. The memo
  /// cache is not shared with the copy.
  FreePair with_element(int cls, const std::string& name, CMatrix a) const;
  FreePair with_limits(EvalLimits limits) const;

 private:
  std::array<std::shared_ptr<const MatrixModel>, 2> models_;
  EvalLimits limits_;
  std::shared_ptr<MomentCache> cache_;
};

/// kappa_k(a_1 c_1 ... a_k) inside one model: moment minus every
/// non-crossing partition other than the one-block partition, each evaluated
/// by interval-block contraction. Outer coefficients frame the result.
CMatrix joint_cumulant(const MatrixModel& model, const Word& w, MomentCache* cache = nullptr,
                       int cap = kPartitionCap);

/// Convenience form with bare element names and interior coefficients.
CMatrix joint_cumulant(const MatrixModel& model, std::span<const std::string> letters,
                       std::span<const CMatrix> coeffs, MomentCache* cache = nullptr);

/// Sum over class-monochromatic non-crossing partitions of the nested
/// cumulant products. Adjacent same-class letters are first fused into one
/// composite letter of that class.
CMatrix free_mixed_moment(const FreePair& pair, const Word& w);

/// Independent route: expand each letter as centred part plus its
/// expectation; alternating centred words vanish by definition of freeness.
CMatrix free_mixed_moment_oracle(const FreePair& pair, const Word& w);

/// L * core * R with absent outer coefficients read as the identity.
CMatrix frame(const Word& w, const CMatrix& core);

}  // namespace fpsub
