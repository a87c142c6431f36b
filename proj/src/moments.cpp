#include "fpsub/moments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

namespace fpsub {

namespace {

constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t combine(std::uint64_t h, std::uint64_t v) { return mix64(h ^ mix64(v)); }

std::uint64_t string_key(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char ch : s) h = (h ^ ch) * 0x100000001B3ull;
  return mix64(h);
}

// Exact bits: a cached value must be a function of its exact inputs, or
// results would depend on which caller filled the entry first.
std::uint64_t value_bits(double v) { return std::bit_cast<std::uint64_t>(v); }

enum Tag : std::uint64_t { kMoment = 1, kCumulant = 2, kOracle = 3, kRun = 4, kCentred = 5, kMerge = 6 };

// A letter resolved to its ambient matrix. Composite letters own their
// matrix; named letters alias the model's storage.
struct Atom {
  int cls;
  std::shared_ptr<const CMatrix> m;
  std::uint64_t key;
  bool centred = false;
};

struct AtomWord {
  std::vector<Atom> atoms;
  std::vector<CMatrix> coeffs;  // atoms.size() - 1 interior coefficients
};

struct Ctx {
  std::array<const MatrixModel*, 2> models;
  MomentCache* cache;
  int partition_cap;

  const MatrixModel& model(int cls) const { return *models[cls == 2 ? 1 : 0]; }
  int n() const { return models[0]->base_dim(); }
};

// Shared read-only partition tables.
class PartitionTables {
 public:
  static const std::vector<NCPartition>& all(int k, int cap) {
    static PartitionTables t;
    std::vector<int> colors(k, 0);
    colors.insert(colors.begin(), -1);  // distinguishes the unrestricted table
    return t.get(colors, cap);
  }
  static const std::vector<NCPartition>& mono(const std::vector<int>& colors, int cap) {
    static PartitionTables t;
    return t.get(colors, cap);
  }

 private:
  const std::vector<NCPartition>& get(const std::vector<int>& key, int cap) {
    {
      std::shared_lock lock(mutex_);
      auto it = tables_.find(key);
      if (it != tables_.end()) return it->second;
    }
    std::vector<NCPartition> parts;
    if (!key.empty() && key.front() == -1)
      parts = enumerate_nc(int(key.size()) - 1, cap);
    else
      parts = enumerate_nc_monochromatic(key, cap);
    std::unique_lock lock(mutex_);
    return tables_.emplace(key, std::move(parts)).first->second;
  }

  std::shared_mutex mutex_;
  std::map<std::vector<int>, std::vector<NCPartition>> tables_;
};

MomentCache::Key word_key(Tag tag, const AtomWord& w) {
  MomentCache::Key key;
  key.reserve(1 + w.atoms.size() + w.coeffs.size());
  key.push_back(tag);
  for (const auto& a : w.atoms) key.push_back(a.key);
  for (const auto& c : w.coeffs) key.push_back(matrix_key(c));
  return key;
}

// A * (c ⊗ 1_N) without forming the Kronecker product.
CMatrix times_embedded(const CMatrix& a, const CMatrix& c, int N) {
  const Eigen::Index n = c.rows();
  CMatrix out = CMatrix::Zero(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      const Scalar cij = c(i, j);
      if (cij == Scalar(0.0)) continue;
      out.middleCols(j * N, N).noalias() += cij * a.middleCols(i * N, N);
    }
  return out;
}

CMatrix product(const Ctx& ctx, const AtomWord& w, std::size_t begin, std::size_t end) {
  const MatrixModel& model = ctx.model(w.atoms[begin].cls);
  CMatrix p = *w.atoms[begin].m;
  for (std::size_t i = begin + 1; i < end; ++i) {
    p = times_embedded(p, w.coeffs[i - 1], model.fiber_dim());
    p = p * *w.atoms[i].m;
  }
  return p;
}

AtomWord slice(const AtomWord& w, std::size_t begin, std::size_t end) {
  AtomWord out;
  out.atoms.assign(w.atoms.begin() + begin, w.atoms.begin() + end);
  out.coeffs.assign(w.coeffs.begin() + begin, w.coeffs.begin() + (end - 1));
  return out;
}

CMatrix cumulant(const Ctx& ctx, const AtomWord& w);

// kappa_pi(w) by repeated interval-block contraction.
CMatrix contract(const Ctx& ctx, AtomWord w, const NCPartition& pi) {
  std::vector<int> label(pi.k);
  for (std::size_t b = 0; b < pi.blocks.size(); ++b)
    for (int i : pi.blocks[b]) label[i] = int(b);

  const Eigen::Index n = ctx.n();
  CMatrix left = CMatrix::Identity(n, n);
  CMatrix right = CMatrix::Identity(n, n);
  while (true) {
    const std::size_t len = w.atoms.size();
    // Leftmost interval block: first occurrence starts a contiguous run that
    // never recurs later.
    std::size_t p = 0, s = 0;
    for (std::size_t i = 0; i < len; ++i) {
      if (i > 0 && std::find(label.begin(), label.begin() + i, label[i]) != label.begin() + i)
        continue;
      std::size_t j = i;
      while (j < len && label[j] == label[i]) ++j;
      if (std::find(label.begin() + j, label.end(), label[i]) == label.end()) {
        p = i;
        s = j - i;
        break;
      }
    }
    if (s == 0) throw Error("contract: partition without interval block");
    const CMatrix v = cumulant(ctx, slice(w, p, p + s));
    if (s == len) return left * v * right;

    if (p == 0) {
      left = left * v * w.coeffs[s - 1];
      w.atoms.erase(w.atoms.begin(), w.atoms.begin() + s);
      w.coeffs.erase(w.coeffs.begin(), w.coeffs.begin() + s);
    } else if (p + s == len) {
      right = w.coeffs[p - 1] * v * right;
      w.atoms.erase(w.atoms.begin() + p, w.atoms.end());
      w.coeffs.erase(w.coeffs.begin() + (p - 1), w.coeffs.end());
    } else {
      CMatrix spliced = w.coeffs[p - 1] * v * w.coeffs[p + s - 1];
      w.atoms.erase(w.atoms.begin() + p, w.atoms.begin() + p + s);
      w.coeffs.erase(w.coeffs.begin() + p, w.coeffs.begin() + p + s);
      w.coeffs[p - 1] = std::move(spliced);
    }
    label.erase(label.begin() + p, label.begin() + p + s);
  }
}

CMatrix cumulant(const Ctx& ctx, const AtomWord& w) {
  const MatrixModel& model = ctx.model(w.atoms.front().cls);
  if (w.atoms.size() == 1) return expect(*w.atoms.front().m, model);

  const auto key = word_key(kCumulant, w);
  if (ctx.cache)
    if (auto hit = ctx.cache->find(key)) return *hit;

  CMatrix k = expect(product(ctx, w, 0, w.atoms.size()), model);
  for (const auto& pi : PartitionTables::all(int(w.atoms.size()), ctx.partition_cap)) {
    if (pi.blocks.size() == 1) continue;
    k -= contract(ctx, w, pi);
  }
  if (ctx.cache) ctx.cache->insert(key, k);
  return k;
}

Atom named_atom(const MatrixModel& model, const Letter& l) {
  const CMatrix& m = model.element(l.name);
  return Atom{l.cls, std::shared_ptr<const CMatrix>(std::shared_ptr<void>(), &m),
              combine(std::uint64_t(l.cls), string_key(l.name))};
}

void check_word(const Word& w, int n, int cap, const char* what) {
  const int k = int(w.letters.size());
  if (k < 1) throw DimensionError(std::string(what) + ": empty word");
  if (k > cap)
    throw CapExceeded(std::string(what) + ": word length " + std::to_string(k) +
                      " exceeds cap " + std::to_string(cap));
  if (w.coeffs.size() + 1 != w.letters.size())
    throw DimensionError(std::string(what) + ": coefficient count must be letter count - 1");
  for (const auto& c : w.coeffs)
    if (c.rows() != n || c.cols() != n)
      throw DimensionError(std::string(what) + ": coefficient has wrong dimension");
  for (const auto* outer : {&w.left, &w.right})
    if (*outer && ((*outer)->rows() != n || (*outer)->cols() != n))
      throw DimensionError(std::string(what) + ": outer coefficient has wrong dimension");
  for (const auto& l : w.letters)
    if (l.cls != 1 && l.cls != 2) throw DimensionError(std::string(what) + ": class tag must be 1 or 2");
}

void check_pattern(const BaseAlgebra& base, const Word& w, const char* what) {
  for (const auto& c : w.coeffs)
    if (!base.respects(c)) throw PatternError(std::string(what) + ": coefficient leaves the base pattern");
}

// Resolves letters and fuses maximal same-class runs into composite letters,
// leaving a class-alternating word.
AtomWord fuse(const Ctx& ctx, const Word& w) {
  AtomWord out;
  std::size_t i = 0;
  while (i < w.letters.size()) {
    std::size_t j = i + 1;
    while (j < w.letters.size() && w.letters[j].cls == w.letters[i].cls) ++j;
    const MatrixModel& model = ctx.model(w.letters[i].cls);
    Atom a = named_atom(model, w.letters[i]);
    if (j > i + 1) {
      CMatrix m = *a.m;
      std::uint64_t key = combine(kRun, a.key);
      for (std::size_t t = i + 1; t < j; ++t) {
        const Atom next = named_atom(model, w.letters[t]);
        m = times_embedded(m, w.coeffs[t - 1], model.fiber_dim()) * *next.m;
        key = combine(combine(key, matrix_key(w.coeffs[t - 1])), next.key);
      }
      a = Atom{w.letters[i].cls, std::make_shared<const CMatrix>(std::move(m)), key};
    }
    if (!out.atoms.empty()) out.coeffs.push_back(w.coeffs[i - 1]);
    out.atoms.push_back(std::move(a));
    i = j;
  }
  return out;
}

CMatrix free_core(const Ctx& ctx, const AtomWord& w) {
  if (w.atoms.size() == 1) return expect(*w.atoms.front().m, ctx.model(w.atoms.front().cls));
  const auto key = word_key(kMoment, w);
  if (auto hit = ctx.cache->find(key)) return *hit;

  std::vector<int> colors;
  colors.reserve(w.atoms.size());
  for (const auto& a : w.atoms) colors.push_back(a.cls);
  CMatrix sum = CMatrix::Zero(ctx.n(), ctx.n());
  for (const auto& pi : PartitionTables::mono(colors, ctx.partition_cap)) sum += contract(ctx, w, pi);
  ctx.cache->insert(key, sum);
  return sum;
}

Atom centred(const Ctx& ctx, const Atom& a) {
  if (a.centred) return a;
  const MatrixModel& model = ctx.model(a.cls);
  CMatrix m = *a.m - embed(expect(*a.m, model), model);
  return Atom{a.cls, std::make_shared<const CMatrix>(std::move(m)), combine(kCentred, a.key), true};
}

CMatrix oracle_core(const Ctx& ctx, const AtomWord& w) {
  const std::size_t r = w.atoms.size();
  const Eigen::Index n = ctx.n();
  if (r == 1) return expect(*w.atoms.front().m, ctx.model(w.atoms.front().cls));
  if (std::all_of(w.atoms.begin(), w.atoms.end(), [](const Atom& a) { return a.centred; }))
    return CMatrix::Zero(n, n);

  const auto key = word_key(kOracle, w);
  if (auto hit = ctx.cache->find(key)) return *hit;

  // E[u_1 ... u_r] = sum_j E[ů_1 ... ů_{j-1} E[u_j] u_{j+1} ... u_r]
  // plus the fully centred alternating term, which vanishes.
  CMatrix sum = CMatrix::Zero(n, n);
  std::vector<Atom> prefix;  // centred versions of atoms before j
  prefix.reserve(r);
  for (std::size_t j = 0; j < r; ++j) {
    const Atom& u = w.atoms[j];
    if (!u.centred) {
      const CMatrix mean = expect(*u.m, ctx.model(u.cls));
      if (j == 0) {
        sum += mean * w.coeffs[0] * oracle_core(ctx, slice(w, 1, r));
      } else if (j == r - 1) {
        AtomWord head;
        head.atoms = prefix;
        head.coeffs.assign(w.coeffs.begin(), w.coeffs.begin() + (r - 2));
        sum += oracle_core(ctx, head) * w.coeffs[r - 2] * mean;
      } else {
        const Atom& before = prefix[j - 1];
        const Atom& after = w.atoms[j + 1];
        const MatrixModel& model = ctx.model(before.cls);
        const CMatrix bridge = w.coeffs[j - 1] * mean * w.coeffs[j];
        CMatrix m = times_embedded(*before.m, bridge, model.fiber_dim()) * *after.m;
        Atom merged{before.cls, std::make_shared<const CMatrix>(std::move(m)),
                    combine(combine(combine(kMerge, before.key), matrix_key(bridge)), after.key)};
        AtomWord next;
        next.atoms.assign(prefix.begin(), prefix.begin() + (j - 1));
        next.atoms.push_back(std::move(merged));
        next.atoms.insert(next.atoms.end(), w.atoms.begin() + (j + 2), w.atoms.end());
        next.coeffs.assign(w.coeffs.begin(), w.coeffs.begin() + (j - 1));
        next.coeffs.insert(next.coeffs.end(), w.coeffs.begin() + (j + 1), w.coeffs.end());
        sum += oracle_core(ctx, next);
      }
    }
    prefix.push_back(centred(ctx, u));
  }
  ctx.cache->insert(key, sum);
  return sum;
}

}  // namespace

std::uint64_t matrix_key(const CMatrix& m) {
  std::uint64_t h = combine(std::uint64_t(m.rows()), std::uint64_t(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      h = combine(h, value_bits(m(i, j).real()));
      h = combine(h, value_bits(m(i, j).imag()));
    }
  return h;
}

std::size_t MomentCache::KeyHash::operator()(const Key& k) const noexcept {
  std::uint64_t h = k.size();
  for (auto v : k) h = combine(h, v);
  return std::size_t(h);
}

std::optional<CMatrix> MomentCache::find(const Key& key) const {
  std::shared_lock lock(mutex_);
  auto it = table_.find(key);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

void MomentCache::insert(const Key& key, const CMatrix& value) {
  std::unique_lock lock(mutex_);
  table_[key] = value;
}

std::size_t MomentCache::size() const {
  std::shared_lock lock(mutex_);
  return table_.size();
}

void MomentCache::clear() {
  std::unique_lock lock(mutex_);
  table_.clear();
}

CMatrix frame(const Word& w, const CMatrix& core) {
  CMatrix out = core;
  if (w.left) out = *w.left * out;
  if (w.right) out = out * *w.right;
  return out;
}

FreePair::FreePair(MatrixModel class1, MatrixModel class2, EvalLimits limits)
    : models_{std::make_shared<const MatrixModel>(std::move(class1)),
              std::make_shared<const MatrixModel>(std::move(class2))},
      limits_(limits),
      cache_(std::make_shared<MomentCache>()) {
  if (!(models_[0]->base() == models_[1]->base()))
    throw DimensionError("FreePair: the two models must share one base algebra");
}

const MatrixModel& FreePair::model(int cls) const {
  if (cls != 1 && cls != 2) throw DimensionError("FreePair: class tag must be 1 or 2");
  return *models_[cls - 1];
}

CMatrix FreePair::moment(const Word& w) const { return free_mixed_moment(*this, w); }

FreePair FreePair::with_element(int cls, const std::string& name, CMatrix a) const {
  MatrixModel m1 = *models_[0];
  MatrixModel m2 = *models_[1];
  if (cls == 1)
    m1 = m1.with_element(name, std::move(a));
  else
    m2 = m2.with_element(name, std::move(a));
  return FreePair(std::move(m1), std::move(m2), limits_);
}

FreePair FreePair::with_limits(EvalLimits limits) const {
  FreePair out = *this;
  out.limits_ = limits;
  out.cache_ = std::make_shared<MomentCache>();
  return out;
}

CMatrix joint_cumulant(const MatrixModel& model, const Word& w, MomentCache* cache, int cap) {
  check_word(w, model.base_dim(), cap, "joint_cumulant");
  check_pattern(model.base(), w, "joint_cumulant");
  Ctx ctx{{&model, &model}, cache, cap};
  AtomWord aw;
  for (const auto& l : w.letters) aw.atoms.push_back(named_atom(model, Letter{1, l.name}));
  aw.coeffs = w.coeffs;
  return frame(w, cumulant(ctx, aw));
}

CMatrix joint_cumulant(const MatrixModel& model, std::span<const std::string> letters,
                       std::span<const CMatrix> coeffs, MomentCache* cache) {
  Word w;
  for (const auto& name : letters) w.letters.push_back(Letter{1, name});
  w.coeffs.assign(coeffs.begin(), coeffs.end());
  return joint_cumulant(model, w, cache);
}

CMatrix free_mixed_moment(const FreePair& pair, const Word& w) {
  const EvalLimits& lim = pair.limits();
  check_word(w, pair.base().dim(), lim.word_cap, "free_mixed_moment");
  check_pattern(pair.base(), w, "free_mixed_moment");
  Ctx ctx{{&pair.model(1), &pair.model(2)}, &pair.cache(), lim.partition_cap};
  return frame(w, free_core(ctx, fuse(ctx, w)));
}

CMatrix free_mixed_moment_oracle(const FreePair& pair, const Word& w) {
  const EvalLimits& lim = pair.limits();
  check_word(w, pair.base().dim(), lim.oracle_cap, "free_mixed_moment_oracle");
  check_pattern(pair.base(), w, "free_mixed_moment_oracle");
  Ctx ctx{{&pair.model(1), &pair.model(2)}, &pair.cache(), lim.partition_cap};
  return frame(w, oracle_core(ctx, fuse(ctx, w)));
}

}  // namespace fpsub
