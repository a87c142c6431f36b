#pragma once

#include <optional>
#include <string>

#include "fpsub/algebra.hpp"
#include "fpsub/moments.hpp"

namespace fpsub {

/// Series radius bookkeeping: evaluation at argument c requires
/// q = rho * ||c|| <= q_max.
struct TransformDomain {
  double rho = 0.0;
  double q_max = 0.5;
  double tol = 1e-10;

  double q(const CMatrix& arg) const { return rho * spectral_norm(arg); }
  /// Throws DomainError unless q(arg) <= fraction * q_max.
  void require(const CMatrix& arg, double fraction, const char* what) const;
};

struct TransformOptions {
  double q_max = 0.5;
  double tol = 1e-10;         // relative truncation tolerance of series
  double solver_tol = 1e-13;  // relative defect tolerance of inversions
  int max_iter = 200;
};

/// value = truncated series; tail_bound bounds the discarded remainder.
/// The truncation order is the least M with tail_bound <= tol * ||leading term bound||.
struct SeriesResult {
  CMatrix value;
  int order_used = 0;
  double tail_bound = 0.0;
};

// ---- single variable -------------------------------------------------------

/// E[(b - x)^{-1}] by ambient inversion.
CMatrix cauchy_G(const MatrixModel& model, const std::string& name, const CMatrix& b);

/// G(b)^{-1}.
CMatrix F_transform(const MatrixModel& model, const std::string& name, const CMatrix& b);

/// G(b^{-1}) written as E[b (1 - x b)^{-1}], so b need not be invertible.
CMatrix G_tilde(const MatrixModel& model, const std::string& name, const CMatrix& b);

/// sum_m E[b (x b)^m] truncated at the tail tolerance. Term norms are checked
/// against rho^m ||b||^{m+1}; a violation throws ConvergenceError.
SeriesResult G_tilde_series(const MatrixModel& model, const std::string& name, const CMatrix& b,
                            const TransformOptions& opts = {});

/// Local inverse of G_tilde near 0, by k <- k - (G_tilde(k) - w) from k = w.
/// Requires rho ||w|| <= q_max / 2.
CMatrix K_tilde(const MatrixModel& model, const std::string& name, const CMatrix& w,
                const TransformOptions& opts = {});

/// K_tilde(b)^{-1} - b^{-1}.
CMatrix R_transform(const MatrixModel& model, const std::string& name, const CMatrix& b,
                    const TransformOptions& opts = {});

// ---- free sum x = x1 + x2 --------------------------------------------------

/// x1 (class 1) + x2 (class 2) over a JointMoments backend. rho_j are the
/// spectral norms of the summands in their class models.
struct FreeSum {
  const JointMoments* moments = nullptr;
  std::string name1 = "x1";
  std::string name2 = "x2";
  double rho1 = 0.0;
  double rho2 = 0.0;

  double rho() const { return rho1 + rho2; }
  const std::string& name(int cls) const { return cls == 1 ? name1 : name2; }
  const MatrixModel& model(int cls) const { return moments->model(cls); }
  const BaseAlgebra& base() const { return moments->base(); }
};

FreeSum make_free_sum(const JointMoments& moments, std::string name1 = "x1",
                      std::string name2 = "x2");

/// Which side the class-1 weight y multiplies the resolvent from.
enum class Side { kLeft, kRight };

/// Left: sum_m E[y c (x c)^m]. Right: sum_m E[c (x c)^m y]. Without y the
/// two agree and give sum_m E[c (x c)^m]. Each term expands into 2^m class
/// words evaluated by the backend.
SeriesResult free_sum_series(const FreeSum& sum, const std::optional<std::string>& y,
                             const CMatrix& c, Side side, const TransformOptions& opts = {});

/// E[y (b - x)^{-1}] (left) or E[(b - x)^{-1} y] (right), via the series at b^{-1}.
/// Requires rho ||b^{-1}|| <= q_max.
SeriesResult sum_G_series(const FreeSum& sum, const std::optional<std::string>& y,
                          const CMatrix& b, Side side = Side::kLeft,
                          const TransformOptions& opts = {});

SeriesResult sum_G_tilde(const FreeSum& sum, const CMatrix& w, const TransformOptions& opts = {});
CMatrix sum_K_tilde(const FreeSum& sum, const CMatrix& w, const TransformOptions& opts = {});
CMatrix sum_R_transform(const FreeSum& sum, const CMatrix& b, const TransformOptions& opts = {});

/// ||R_x(b) - R_x1(b) - R_x2(b)||.
double r_additivity_residual(const FreeSum& sum, const CMatrix& b,
                             const TransformOptions& opts = {});

}  // namespace fpsub
