#pragma once

#include <complex>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fpsub/errors.hpp"

namespace fpsub {

using Scalar = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kMaxCondition = 1e12;

inline CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

/// Spectral (largest singular value) operator norm.
template <typename Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(a.template cast<Scalar>().eval());
  return svd.singularValues()(0);
}

/// Im a = (a - a*) / 2i.
template <typename Derived>
CMatrix imag_part(const Eigen::MatrixBase<Derived>& a) {
  return (a - a.adjoint()) / Scalar(0.0, 2.0);
}

template <typename Derived>
CMatrix real_part(const Eigen::MatrixBase<Derived>& a) {
  return (a + a.adjoint()) / 2.0;
}

/// Least eigenvalue of the hermitian matrix Im a.
template <typename Derived>
double min_imag_eigenvalue(const Eigen::MatrixBase<Derived>& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(imag_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

template <typename Derived>
bool is_self_adjoint(const Eigen::MatrixBase<Derived>& a, double tol) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// LU inverse that refuses ill-conditioned input (estimated condition above
/// `max_condition`).
CMatrix inverse(const CMatrix& a, double max_condition = kMaxCondition);

/// Pattern-constrained unital subalgebra of M_dim(C).
class BaseAlgebra {
 public:
  enum class Kind { kFull, kLowerTriangular, kUpperTriangular };

  static BaseAlgebra full(int n);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  /// The algebra this one is a 2x2 triangular lift of; null for kFull.
  const BaseAlgebra* inner() const { return inner_.get(); }

  bool allows(int row, int col) const { return pattern_(row, col); }
  const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& pattern() const { return pattern_; }

  /// True when every entry outside the pattern is below tol * max(1, max|b|).
  bool respects(const CMatrix& b, double tol = 1e-12) const;
  CMatrix project(const CMatrix& b) const;

  friend bool operator==(const BaseAlgebra& a, const BaseAlgebra& b);

 private:
  friend BaseAlgebra make_triangular_base(const BaseAlgebra& inner);
  friend BaseAlgebra make_upper_triangular_base(const BaseAlgebra& inner);

  Kind kind_ = Kind::kFull;
  int dim_ = 1;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> pattern_;
  std::shared_ptr<const BaseAlgebra> inner_;
};

/// Matrices [[a11, 0], [a21, a22]] with entries in `inner`.
BaseAlgebra make_triangular_base(const BaseAlgebra& inner);
/// Matrices [[a11, a12], [0, a22]] with entries in `inner`.
BaseAlgebra make_upper_triangular_base(const BaseAlgebra& inner);

/// B ⊗ M_N with conditional expectation id ⊗ normalized trace.
///
/// Ambient index of (base index i, fiber index alpha) is i * N + alpha, so
/// embed(b) is the Kronecker product b ⊗ 1_N.
class MatrixModel {
 public:
  using ElementMap = std::map<std::string, CMatrix>;

  MatrixModel(BaseAlgebra base, int fiber_dim, ElementMap elements = {});

  const BaseAlgebra& base() const { return base_; }
  int base_dim() const { return base_.dim(); }
  int fiber_dim() const { return fiber_dim_; }
  int ambient_dim() const { return base_.dim() * fiber_dim_; }

  const ElementMap& elements() const { return elements_; }
  bool has(const std::string& name) const { return elements_.count(name) != 0; }
  const CMatrix& element(const std::string& name) const;

  /// Copy with one more (or a replaced) element.
  MatrixModel with_element(const std::string& name, CMatrix a) const;

 private:
  BaseAlgebra base_;
  int fiber_dim_;
  ElementMap elements_;
};

/// b ⊗ 1_N. Throws PatternError when b leaves the base pattern.
CMatrix embed(const CMatrix& b, const MatrixModel& model);

/// Normalized partial trace over the fiber.
CMatrix expect(const CMatrix& a, const MatrixModel& model);

/// a_1 embed(c_1) a_2 ... a_k as an ambient matrix.
CMatrix ambient_word(const MatrixModel& model, std::span<const std::string> letters,
                     std::span<const CMatrix> coeffs);

/// E[a_1 c_1 a_2 ... a_k] evaluated exactly in one model.
CMatrix word_expectation(const MatrixModel& model, std::span<const std::string> letters,
                         std::span<const CMatrix> coeffs);

/// A point of the operator upper half-plane: Im b >= epsilon > 0.
struct HalfPlanePoint {
  CMatrix b;
  double epsilon;

  /// Throws DomainError when Im b is not positive definite.
  static HalfPlanePoint make(const CMatrix& b);
};

}  // namespace fpsub
