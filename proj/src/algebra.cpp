#include "fpsub/algebra.hpp"

#include <sstream>

namespace fpsub {

CMatrix inverse(const CMatrix& a, double max_condition) {
  if (a.rows() != a.cols()) throw DimensionError("inverse: matrix is not square");
  // 2-norm condition number; base matrices are small so the SVD is cheap.
  Eigen::JacobiSVD<CMatrix> svd(a);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  const double smin = sv.size() ? sv(sv.size() - 1) : 0.0;
  if (!(smin > 0.0) || smax / smin > max_condition) {
    std::ostringstream msg;
    msg << "inverse: condition estimate " << (smin > 0.0 ? smax / smin : INFINITY)
        << " exceeds bound " << max_condition;
    throw SingularError(msg.str());
  }
  Eigen::PartialPivLU<CMatrix> lu(a);
  return lu.inverse();
}

BaseAlgebra BaseAlgebra::full(int n) {
  if (n <= 0) throw DimensionError("BaseAlgebra::full: dimension must be positive");
  BaseAlgebra b;
  b.kind_ = Kind::kFull;
  b.dim_ = n;
  b.pattern_.setConstant(n, n, true);
  return b;
}

bool BaseAlgebra::respects(const CMatrix& b, double tol) const {
  if (b.rows() != dim_ || b.cols() != dim_) return false;
  const double scale = std::max(1.0, b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c)
      if (!pattern_(r, c) && std::abs(b(r, c)) > tol * scale) return false;
  return true;
}

CMatrix BaseAlgebra::project(const CMatrix& b) const {
  CMatrix out = b;
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c)
      if (!pattern_(r, c)) out(r, c) = 0.0;
  return out;
}

bool operator==(const BaseAlgebra& a, const BaseAlgebra& b) {
  if (a.kind_ != b.kind_ || a.dim_ != b.dim_) return false;
  if ((a.pattern_ != b.pattern_).any()) return false;
  if (a.inner_ && b.inner_) return *a.inner_ == *b.inner_;
  return !a.inner_ && !b.inner_;
}

namespace {

BaseAlgebra::Kind triangular_kind(bool lower) {
  return lower ? BaseAlgebra::Kind::kLowerTriangular : BaseAlgebra::Kind::kUpperTriangular;
}

}  // namespace

BaseAlgebra make_triangular_base(const BaseAlgebra& inner) {
  BaseAlgebra b;
  const int n = inner.dim();
  b.kind_ = triangular_kind(true);
  b.dim_ = 2 * n;
  b.inner_ = std::make_shared<const BaseAlgebra>(inner);
  b.pattern_.setConstant(2 * n, 2 * n, false);
  b.pattern_.block(0, 0, n, n) = inner.pattern();
  b.pattern_.block(n, 0, n, n) = inner.pattern();
  b.pattern_.block(n, n, n, n) = inner.pattern();
  return b;
}

BaseAlgebra make_upper_triangular_base(const BaseAlgebra& inner) {
  BaseAlgebra b;
  const int n = inner.dim();
  b.kind_ = triangular_kind(false);
  b.dim_ = 2 * n;
  b.inner_ = std::make_shared<const BaseAlgebra>(inner);
  b.pattern_.setConstant(2 * n, 2 * n, false);
  b.pattern_.block(0, 0, n, n) = inner.pattern();
  b.pattern_.block(0, n, n, n) = inner.pattern();
  b.pattern_.block(n, n, n, n) = inner.pattern();
  return b;
}

MatrixModel::MatrixModel(BaseAlgebra base, int fiber_dim, ElementMap elements)
    : base_(std::move(base)), fiber_dim_(fiber_dim), elements_(std::move(elements)) {
  if (fiber_dim_ <= 0) throw DimensionError("MatrixModel: fiber dimension must be positive");
  for (const auto& [name, a] : elements_) {
    if (a.rows() != ambient_dim() || a.cols() != ambient_dim())
      throw DimensionError("MatrixModel: element '" + name + "' has wrong ambient dimension");
    if (!a.allFinite()) throw DimensionError("MatrixModel: element '" + name + "' is not finite");
  }
}

const CMatrix& MatrixModel::element(const std::string& name) const {
  auto it = elements_.find(name);
  if (it == elements_.end()) throw UnknownElement("unknown element '" + name + "'");
  return it->second;
}

MatrixModel MatrixModel::with_element(const std::string& name, CMatrix a) const {
  ElementMap m = elements_;
  m[name] = std::move(a);
  return MatrixModel(base_, fiber_dim_, std::move(m));
}

CMatrix embed(const CMatrix& b, const MatrixModel& model) {
  const int n = model.base_dim();
  const int N = model.fiber_dim();
  if (b.rows() != n || b.cols() != n) throw DimensionError("embed: B-matrix has wrong dimension");
  if (!model.base().respects(b)) throw PatternError("embed: matrix violates the base pattern");
  CMatrix out = CMatrix::Zero(n * N, n * N);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (b(i, j) == Scalar(0.0)) continue;
      for (int a = 0; a < N; ++a) out(i * N + a, j * N + a) = b(i, j);
    }
  return out;
}

CMatrix expect(const CMatrix& a, const MatrixModel& model) {
  const int n = model.base_dim();
  const int N = model.fiber_dim();
  if (a.rows() != n * N || a.cols() != n * N)
    throw DimensionError("expect: ambient matrix has wrong dimension");
  CMatrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Scalar s = 0.0;
      for (int k = 0; k < N; ++k) s += a(i * N + k, j * N + k);
      out(i, j) = s / double(N);
    }
  return out;
}

CMatrix ambient_word(const MatrixModel& model, std::span<const std::string> letters,
                     std::span<const CMatrix> coeffs) {
  if (letters.empty()) throw DimensionError("word: at least one letter required");
  if (coeffs.size() + 1 != letters.size())
    throw DimensionError("word: coefficient count must be letter count - 1");
  CMatrix p = model.element(letters[0]);
  for (std::size_t i = 1; i < letters.size(); ++i) {
    p = p * embed(coeffs[i - 1], model);
    p = p * model.element(letters[i]);
  }
  return p;
}

CMatrix word_expectation(const MatrixModel& model, std::span<const std::string> letters,
                         std::span<const CMatrix> coeffs) {
  return expect(ambient_word(model, letters, coeffs), model);
}

HalfPlanePoint HalfPlanePoint::make(const CMatrix& b) {
  if (b.rows() != b.cols()) throw DimensionError("HalfPlanePoint: matrix is not square");
  const double eps = min_imag_eigenvalue(b);
  if (!(eps > 0.0)) {
    std::ostringstream msg;
    msg << "point is not in the operator upper half-plane (min eig Im b = " << eps << ")";
    throw DomainError(msg.str());
  }
  return HalfPlanePoint{b, eps};
}

}  // namespace fpsub
