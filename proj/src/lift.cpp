#include "fpsub/lift.hpp"

#include <sstream>

namespace fpsub {

namespace {

bool is_zero(const CMatrix& m) { return m.size() == 0 || (m.array() == Scalar(0.0)).all(); }

Mono constant_mono(const CMatrix& value) {
  return Mono{{}, {}, value, identity(value.rows())};
}

Mono concat(const Mono& a, const CMatrix& c, const Mono& b) {
  if (a.letters.empty() && b.letters.empty())
    return constant_mono(a.left * a.right * c * b.left * b.right);
  if (a.letters.empty()) {
    Mono m = b;
    m.left = a.left * a.right * c * b.left;
    return m;
  }
  if (b.letters.empty()) {
    Mono m = a;
    m.right = a.right * c * b.left * b.right;
    return m;
  }
  Mono m;
  m.letters = a.letters;
  m.letters.insert(m.letters.end(), b.letters.begin(), b.letters.end());
  m.coeffs = a.coeffs;
  m.coeffs.push_back(a.right * c * b.left);
  m.coeffs.insert(m.coeffs.end(), b.coeffs.begin(), b.coeffs.end());
  m.left = a.left;
  m.right = b.right;
  return m;
}

CMatrix block(const CMatrix& m, int n, int r, int c) { return m.block(r * n, c * n, n, n); }

CMatrix weight_matrix(const MatrixModel& m1, const std::optional<std::string>& y) {
  return y ? m1.element(*y) : identity(m1.ambient_dim());
}

/// E[y (b - x1)^{-1}] (left) or E[(b - x1)^{-1} y] (right) inside model 1.
CMatrix weighted_resolvent(const MatrixModel& m1, const std::string& x1,
                           const std::optional<std::string>& y, const CMatrix& b, Side side) {
  const CMatrix res = inverse(embed(b, m1) - m1.element(x1));
  const CMatrix yy = weight_matrix(m1, y);
  return expect(side == Side::kLeft ? CMatrix(yy * res) : CMatrix(res * yy), m1);
}

std::vector<CheckReport> fail_all(const std::vector<std::pair<std::string, std::string>>& names,
                                  double tol, const std::string& why) {
  std::vector<CheckReport> out;
  for (const auto& [check, anchor] : names) out.push_back(CheckReport::failed(check, anchor, tol, why));
  return out;
}

}  // namespace

BlockPoly block_letters(int n, const std::array<std::optional<Letter>, 4>& letters,
                        const std::array<bool, 4>& constant) {
  BlockPoly p;
  p.n = n;
  for (int k = 0; k < 4; ++k) {
    if (letters[k])
      p.entries[k].push_back(Mono{{*letters[k]}, {}, identity(n), identity(n)});
    else if (constant[k])
      p.entries[k].push_back(constant_mono(identity(n)));
  }
  return p;
}

BlockPoly block_constant(const CMatrix& c) {
  BlockPoly p;
  p.n = int(c.rows()) / 2;
  for (int r = 0; r < 2; ++r)
    for (int s = 0; s < 2; ++s) {
      CMatrix v = block(c, p.n, r, s);
      if (!is_zero(v)) p.at(r, s).push_back(constant_mono(v));
    }
  return p;
}

BlockPoly multiply(const BlockPoly& a, const CMatrix& c, const BlockPoly& b) {
  const int n = a.n;
  if (b.n != n || c.rows() != 2 * n || c.cols() != 2 * n)
    throw DimensionError("block multiply: dimension mismatch");
  BlockPoly out;
  out.n = n;
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) {
      const CMatrix cst = block(c, n, s, t);
      if (is_zero(cst)) continue;
      for (int r = 0; r < 2; ++r)
        for (int u = 0; u < 2; ++u)
          for (const Mono& ma : a.at(r, s))
            for (const Mono& mb : b.at(t, u)) out.at(r, u).push_back(concat(ma, cst, mb));
    }
  return out;
}

BlockPoly add(BlockPoly a, const BlockPoly& b) {
  for (int k = 0; k < 4; ++k) a.entries[k].insert(a.entries[k].end(), b.entries[k].begin(), b.entries[k].end());
  return a;
}

CMatrix block_expect(const BlockPoly& p, const JointMoments& base) {
  const int n = p.n;
  CMatrix out = CMatrix::Zero(2 * n, 2 * n);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      CMatrix acc = CMatrix::Zero(n, n);
      for (const Mono& m : p.at(r, c)) {
        if (m.letters.empty()) {
          acc += m.left * m.right;
          continue;
        }
        Word w{m.letters, m.coeffs, m.left, m.right};
        acc += base.moment(w);
      }
      out.block(r * n, c * n, n, n) = acc;
    }
  return out;
}

CMatrix block_ambient(const BlockPoly& p, const MatrixModel& model) {
  const int n = p.n;
  const int d = model.ambient_dim();
  if (model.base_dim() != n) throw DimensionError("block_ambient: base dimension mismatch");
  CMatrix out = CMatrix::Zero(2 * d, 2 * d);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      CMatrix acc = CMatrix::Zero(d, d);
      for (const Mono& m : p.at(r, c)) {
        if (m.letters.empty()) {
          acc += embed(m.left * m.right, model);
          continue;
        }
        std::vector<std::string> names;
        for (const auto& l : m.letters) names.push_back(l.name);
        acc += embed(m.left, model) * ambient_word(model, names, m.coeffs) * embed(m.right, model);
      }
      out.block(r * d, c * d, d, d) = acc;
    }
  return out;
}

const char* orientation_name(Orientation o) { return o == Orientation::kLower ? "lower" : "upper"; }

LiftedPair::LiftedPair(const FreePair& pair, std::optional<std::string> y, Orientation orientation,
                       std::string x1, std::string x2)
    : pair_(pair),
      y_(std::move(y)),
      orientation_(orientation),
      base2_(orientation == Orientation::kLower ? make_triangular_base(pair.base())
                                                : make_upper_triangular_base(pair.base())),
      x1_(std::move(x1)),
      x2_(std::move(x2)) {
  const int n = pair.base().dim();
  pair.model(1).element(x1_);
  pair.model(2).element(x2_);
  if (y_) pair.model(1).element(*y_);

  const int corner = orientation == Orientation::kLower ? 2 : 1;  // [1][0] or [0][1]
  std::array<std::optional<Letter>, 4> l1{Letter{1, x1_}, std::nullopt, std::nullopt, std::nullopt};
  std::array<bool, 4> c1{};
  if (y_)
    l1[corner] = Letter{1, *y_};
  else
    c1[corner] = true;
  BlockPoly X1 = block_letters(n, l1, c1);
  BlockPoly X2 = block_letters(n, {Letter{2, x2_}, std::nullopt, std::nullopt, std::nullopt});
  elements_[0]["X1"] = X1;
  elements_[1]["X2"] = X2;

  for (int cls = 1; cls <= 2; ++cls) {
    const MatrixModel& m = pair.model(cls);
    const BlockPoly& X = cls == 1 ? X1 : X2;
    MatrixModel lifted(base2_, m.fiber_dim(), {{cls == 1 ? "X1" : "X2", block_ambient(X, m)}});
    models_.push_back(std::move(lifted));
  }

  // Fixed B_2 element for the generator X D X.
  CMatrix D(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i)
    for (int j = 0; j < 2 * n; ++j) D(i, j) = Scalar(1.0 / (1 + i + j), 0.3 * (i - j) / (1 + i + j));
  D = base2_.project(D);
  const CMatrix one = identity(2 * n);
  for (int k = 0; k < 2; ++k) {
    const BlockPoly& X = k == 0 ? X1 : X2;
    for (const BlockPoly& g : {X, multiply(X, one, X), multiply(X, D, X)}) {
      BlockPoly centred = add(g, block_constant(-block_expect(g, pair_)));
      centred_[k].push_back(std::move(centred));
    }
  }
}

const MatrixModel& LiftedPair::model(int cls) const {
  if (cls != 1 && cls != 2) throw DimensionError("LiftedPair: class tag must be 1 or 2");
  return models_[cls - 1];
}

const BlockPoly& LiftedPair::element(int cls, const std::string& name) const {
  if (cls != 1 && cls != 2) throw DimensionError("LiftedPair: class tag must be 1 or 2");
  const auto& m = elements_[cls - 1];
  auto it = m.find(name);
  if (it == m.end()) throw UnknownElement("lifted pair: unknown element '" + name + "'");
  return it->second;
}

CMatrix LiftedPair::moment(const Word& w) const {
  if (w.letters.empty()) throw DimensionError("lifted word: at least one letter required");
  if (w.coeffs.size() + 1 != w.letters.size())
    throw DimensionError("lifted word: coefficient count must be letter count - 1");
  for (const auto& c : w.coeffs)
    if (!base2_.respects(c)) throw PatternError("lifted word: coefficient leaves the triangular pattern");
  BlockPoly p = element(w.letters[0].cls, w.letters[0].name);
  for (std::size_t i = 1; i < w.letters.size(); ++i)
    p = multiply(p, w.coeffs[i - 1], element(w.letters[i].cls, w.letters[i].name));
  return frame(w, block_expect(p, pair_));
}

int LiftedPair::generator_count(int cls) const { return int(centred_.at(cls - 1).size()); }

CMatrix LiftedPair::centred_word_moment(const std::vector<std::pair<int, int>>& seq,
                                        const std::vector<CMatrix>& coeffs) const {
  if (seq.empty() || coeffs.size() + 1 != seq.size())
    throw DimensionError("centred word: coefficient count must be letter count - 1");
  BlockPoly p = centred_.at(seq[0].first - 1).at(seq[0].second);
  for (std::size_t i = 1; i < seq.size(); ++i)
    p = multiply(p, coeffs[i - 1], centred_.at(seq[i].first - 1).at(seq[i].second));
  return block_expect(p, pair_);
}

LiftedPair build_lift(const FreePair& pair, std::optional<std::string> y, Orientation orientation) {
  return LiftedPair(pair, std::move(y), orientation);
}

FreeSum lifted_sum(const LiftedPair& lifted) { return make_free_sum(lifted, "X1", "X2"); }

CMatrix lifted_G_block_formula(const LiftedPair& lifted, int which, const CMatrix& B2,
                               const TransformOptions& opts) {
  if (which < 0 || which > 2) throw DimensionError("lifted_G: which must be 0, 1 or 2");
  if (!lifted.base().respects(B2)) throw PatternError("lifted_G: argument leaves the triangular pattern");
  const int n = lifted.inner().base().dim();
  const bool lower = lifted.orientation() == Orientation::kLower;
  const CMatrix b11 = block(B2, n, 0, 0);
  const CMatrix b22 = block(B2, n, 1, 1);
  const CMatrix off = lower ? block(B2, n, 1, 0) : block(B2, n, 0, 1);
  const Side side = lower ? Side::kLeft : Side::kRight;
  const MatrixModel& m1 = lifted.inner().model(1);

  CMatrix g11, weighted;
  if (which == 0) {
    FreeSum sum = make_free_sum(lifted.inner(), lifted.base_name(1), lifted.base_name(2));
    g11 = sum_G_series(sum, std::nullopt, b11, Side::kLeft, opts).value;
    weighted = sum_G_series(sum, lifted.weight(), b11, side, opts).value;
  } else if (which == 1) {
    g11 = cauchy_G(m1, lifted.base_name(1), b11);
    weighted = weighted_resolvent(m1, lifted.base_name(1), lifted.weight(), b11, side);
  } else {
    g11 = cauchy_G(lifted.inner().model(2), lifted.base_name(2), b11);
    weighted = CMatrix::Zero(n, n);
  }
  const CMatrix b22inv = inverse(b22);
  CMatrix out = CMatrix::Zero(2 * n, 2 * n);
  out.block(0, 0, n, n) = g11;
  out.block(n, n, n, n) = b22inv;
  if (lower)
    out.block(n, 0, n, n) = -b22inv * (off * g11 - weighted);
  else
    out.block(0, n, n, n) = -(g11 * off - weighted) * b22inv;
  return out;
}

CMatrix lifted_G_direct(const LiftedPair& lifted, int which, const CMatrix& B2,
                        const TransformOptions& opts) {
  if (which == 1) return cauchy_G(lifted.model(1), "X1", B2);
  if (which == 2) return cauchy_G(lifted.model(2), "X2", B2);
  if (which != 0) throw DimensionError("lifted_G: which must be 0, 1 or 2");
  return sum_G_series(lifted_sum(lifted), std::nullopt, B2, Side::kLeft, opts).value;
}

std::vector<CheckReport> lifted_G_checks(const LiftedPair& lifted, const CMatrix& B2,
                                         double tolerance, const TransformOptions& opts) {
  std::vector<CheckReport> out;
  const std::string o = orientation_name(lifted.orientation());
  const char* labels[] = {"X1+X2", "X1", "X2"};
  for (int which : {1, 2, 0}) {
    const std::string check = "lift." + o + ".G_block_formula." + labels[which];
    const std::string anchor = std::string("G_") + labels[which] + "(B) blockwise";
    try {
      const double r = spectral_norm(lifted_G_block_formula(lifted, which, B2, opts) -
                                     lifted_G_direct(lifted, which, B2, opts));
      out.push_back(CheckReport::make(check, anchor, r, tolerance));
    } catch (const Error& e) {
      out.push_back(CheckReport::failed(check, anchor, tolerance, describe_error(e)));
    }
  }
  return out;
}

CMatrix lifted_point(const CMatrix& b, double t) {
  const Eigen::Index n = b.rows();
  CMatrix B = CMatrix::Zero(2 * n, 2 * n);
  B.block(0, 0, n, n) = b;
  B.block(n, n, n, n) = t * identity(n);
  return B;
}

double default_lift_t(const CMatrix& b) {
  return 10.0 * std::max(1.0, 1.0 / spectral_norm(inverse(b)));
}

std::array<BlockDiagnostics, 2> lifted_omegas(const LiftedPair& lifted, const CMatrix& b, double t,
                                              const TransformOptions& opts) {
  if (!(t > 0.0)) throw DomainError("lifted_omegas: t must be positive");
  const int n = int(b.rows());
  const bool lower = lifted.orientation() == Orientation::kLower;
  const CMatrix B = lifted_point(b, t);
  const FreeSum lsum = lifted_sum(lifted);
  const FreeSum sum = make_free_sum(lifted.inner(), lifted.base_name(1), lifted.base_name(2));
  std::array<BlockDiagnostics, 2> out;
  for (int j = 1; j <= 2; ++j) {
    const CMatrix omega = omega_series(lsum, j, B, opts);
    BlockDiagnostics& d = out[j - 1];
    d.omega11 = block(omega, n, 0, 0);
    d.corner = lower ? block(omega, n, 1, 0) : block(omega, n, 0, 1);
    d.residual_offdiag = spectral_norm(lower ? block(omega, n, 0, 1) : block(omega, n, 1, 0));
    d.residual_22 = spectral_norm(CMatrix(block(omega, n, 1, 1) - t * identity(n)));
    d.omega_base = omega_series(sum, j, b, opts);
    d.residual_11 = spectral_norm(d.omega11 - d.omega_base);
  }
  return out;
}

CMatrix predicted_corner(const FreeSum& sum, const std::optional<std::string>& y,
                         const CMatrix& b, Orientation orientation, const TransformOptions& opts) {
  const CMatrix F = inverse(sum_G_series(sum, std::nullopt, b, Side::kLeft, opts).value);
  if (orientation == Orientation::kLower)
    return -sum_G_series(sum, y, b, Side::kLeft, opts).value * F;
  return -F * sum_G_series(sum, y, b, Side::kRight, opts).value;
}

std::vector<CheckReport> lift_checks(const FreePair& pair, const std::optional<std::string>& y,
                                     const CMatrix& b, Orientation orientation,
                                     const LiftTolerances& tol, const TransformOptions& opts) {
  const std::string o = std::string("lift.") + orientation_name(orientation) + ".";
  const std::string corner = orientation == Orientation::kLower ? "21" : "12";
  const std::string forbidden = orientation == Orientation::kLower ? "12" : "21";
  const std::string pred = orientation == Orientation::kLower ? "-E[y(b-x)^-1] F_x(b)"
                                                              : "-F_x(b) E[(b-x)^-1 y]";
  std::vector<std::pair<std::string, std::string>> names;
  std::vector<double> tols;
  for (int j = 1; j <= 2; ++j) {
    const std::string J = std::to_string(j);
    names.push_back({o + "Omega" + J + "." + forbidden, "Omega_" + J + "(B)_" + forbidden + " = 0"});
    tols.push_back(tol.block);
    names.push_back({o + "Omega" + J + ".22", "Omega_" + J + "(B)_22 = t"});
    tols.push_back(tol.block);
    names.push_back({o + "Omega" + J + ".11", "Omega_" + J + "(B)_11 = w" + J + "(b)"});
    tols.push_back(tol.omega);
  }
  names.push_back({o + "beta1", "beta_1 = 0"});
  tols.push_back(tol.corner);
  names.push_back({o + "beta2", "beta_2 = " + pred});
  tols.push_back(tol.corner);
  names.push_back({o + "beta1+beta2", "beta_1 + beta_2 = " + pred});
  tols.push_back(tol.corner);

  std::vector<CheckReport> out;
  try {
    LiftedPair lifted(pair, y, orientation);
    const double t = default_lift_t(b);
    const auto d = lifted_omegas(lifted, b, t, opts);
    const FreeSum sum = make_free_sum(pair);
    const CMatrix p = predicted_corner(sum, y, b, orientation, opts);
    const std::vector<double> residuals{
        d[0].residual_offdiag, d[0].residual_22, d[0].residual_11,
        d[1].residual_offdiag, d[1].residual_22, d[1].residual_11,
        spectral_norm(d[0].corner),
        spectral_norm(d[1].corner - p),
        spectral_norm(d[0].corner + d[1].corner - p)};
    std::ostringstream note;
    note << "t=" << t;
    for (std::size_t k = 0; k < names.size(); ++k) {
      out.push_back(CheckReport::make(names[k].first, names[k].second, residuals[k], tols[k]));
      out.back().note = note.str();
    }
  } catch (const Error& e) {
    out.clear();
    for (std::size_t k = 0; k < names.size(); ++k)
      out.push_back(CheckReport::failed(names[k].first, names[k].second, tols[k], describe_error(e)));
  }
  for (auto& r : out) r.route = "series";
  return out;
}

namespace {

CMatrix omega1_by(const FreeSum& sum, const CMatrix& b, Route route, const SubordinationOptions& opts) {
  return route == Route::kSeries ? omega_series(sum, 1, b, opts.transform)
                                 : subordinate_fixed_point(sum, b, opts).omega1;
}

}  // namespace

std::vector<CheckReport> theorem_identity_check(const FreeSum& sum,
                                                const std::optional<std::string>& y,
                                                const CMatrix& b, Route route, double tolerance,
                                                const SubordinationOptions& opts) {
  const std::vector<std::pair<std::string, std::string>> names{
      {"theorem.left", "E[y(b-x)^-1] = E[y(w1(b)-x1)^-1]"},
      {"theorem.right", "E[(b-x)^-1 y] = E[(w1(b)-x1)^-1 y]"}};
  std::vector<CheckReport> out;
  try {
    const CMatrix w1 = omega1_by(sum, b, route, opts);
    const MatrixModel& m1 = sum.model(1);
    int k = 0;
    for (Side side : {Side::kLeft, Side::kRight}) {
      const CMatrix lhs = sum_G_series(sum, y, b, side, opts.transform).value;
      const CMatrix rhs = weighted_resolvent(m1, sum.name1, y, w1, side);
      out.push_back(CheckReport::make(names[k].first, names[k].second, spectral_norm(lhs - rhs), tolerance));
      ++k;
    }
  } catch (const Error& e) {
    out = fail_all(names, tolerance, describe_error(e));
  }
  for (auto& r : out) r.route = route_name(route);
  return out;
}

double orthogonality_defect(const FreeSum& sum, const std::optional<std::string>& y,
                            const CMatrix& b, const CMatrix& w, const TransformOptions& opts) {
  const CMatrix lhs = sum_G_series(sum, y, b, Side::kLeft, opts).value;
  const CMatrix rhs = weighted_resolvent(sum.model(1), sum.name1, y, w, Side::kLeft);
  return std::abs((lhs - rhs).trace()) / double(b.rows());
}

CheckReport orthogonality_check(const FreeSum& sum, const std::optional<std::string>& y,
                                const CMatrix& b, Route route, double tolerance,
                                const SubordinationOptions& opts) {
  const char* check = "orthogonality";
  const char* anchor = "psi(y[(b-x)^-1 - (w1(b)-x1)^-1]) = 0";
  CheckReport r;
  try {
    const CMatrix w1 = omega1_by(sum, b, route, opts);
    r = CheckReport::make(check, anchor, orthogonality_defect(sum, y, b, w1, opts.transform), tolerance);
  } catch (const Error& e) {
    r = CheckReport::failed(check, anchor, tolerance, describe_error(e));
  }
  r.route = route_name(route);
  return r;
}

}  // namespace fpsub
