#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpsub/check_report.hpp"
#include "fpsub/moments.hpp"
#include "fpsub/subordination.hpp"
#include "fpsub/transforms.hpp"

namespace fpsub {

/// left * (a_1 c_1 ... a_k) * right over base letters. No letters means the
/// constant left * right.
struct Mono {
  std::vector<Letter> letters;
  std::vector<CMatrix> coeffs;
  CMatrix left;
  CMatrix right;
};

using Poly = std::vector<Mono>;

/// An element of M_2(A) written as a 2x2 array of base-level polynomials.
struct BlockPoly {
  int n = 0;  // base dimension
  std::array<Poly, 4> entries;

  Poly& at(int r, int c) { return entries[2 * r + c]; }
  const Poly& at(int r, int c) const { return entries[2 * r + c]; }
};

/// Entry (r, c) is the single letter at [r][c], or zero when absent;
/// `constant` entries hold the identity (a weight y = 1).
BlockPoly block_letters(int n, const std::array<std::optional<Letter>, 4>& letters,
                        const std::array<bool, 4>& constant = {});

/// Blockwise constant 2n x 2n matrix.
BlockPoly block_constant(const CMatrix& c);

/// a * c * b with c a constant 2n x 2n matrix.
BlockPoly multiply(const BlockPoly& a, const CMatrix& c, const BlockPoly& b);
BlockPoly add(BlockPoly a, const BlockPoly& b);

/// E applied entrywise, each word routed through the base backend.
CMatrix block_expect(const BlockPoly& p, const JointMoments& base);

/// Ambient 2nN matrix of a single-class block polynomial.
CMatrix block_ambient(const BlockPoly& p, const MatrixModel& model);

enum class Orientation { kLower, kUpper };

const char* orientation_name(Orientation o);

/// The 2x2 lift over B_2 (triangular 2n x 2n): lower
///   X1 = [[x1, 0], [y, 0]],  X2 = [[x2, 0], [0, 0]]
/// or upper X1 = [[x1, y], [0, 0]]. y absent means y = 1. Joint words of X1,
/// X2 and B_2 coefficients are evaluated by block expansion into base words.
class LiftedPair : public JointMoments {
 public:
  LiftedPair(const FreePair& pair, std::optional<std::string> y, Orientation orientation,
             std::string x1 = "x1", std::string x2 = "x2");

  const BaseAlgebra& base() const override { return base2_; }
  const MatrixModel& model(int cls) const override;
  CMatrix moment(const Word& w) const override;
  const EvalLimits& limits() const override { return pair_.limits(); }

  const FreePair& inner() const { return pair_; }
  Orientation orientation() const { return orientation_; }
  const std::optional<std::string>& weight() const { return y_; }
  const BlockPoly& element(int cls, const std::string& name) const;
  /// Base-level names of x1 and x2.
  const std::string& base_name(int cls) const { return cls == 1 ? x1_ : x2_; }

  /// Freeness realization: X_j, X_j^2, X_j D X_j for a fixed B_2 element D.
  int generator_count(int cls) const;
  /// E_2 of the alternating product of centred generators (cls, index) with
  /// `coeffs` interleaved.
  CMatrix centred_word_moment(const std::vector<std::pair<int, int>>& seq,
                              const std::vector<CMatrix>& coeffs) const;

 private:
  FreePair pair_;
  std::optional<std::string> y_;
  Orientation orientation_;
  BaseAlgebra base2_;
  std::array<std::map<std::string, BlockPoly>, 2> elements_;
  std::array<std::vector<BlockPoly>, 2> centred_;
  std::vector<MatrixModel> models_;
  std::string x1_, x2_;
};

LiftedPair build_lift(const FreePair& pair, std::optional<std::string> y,
                      Orientation orientation = Orientation::kLower);

/// FreeSum of X1 + X2 over the lifted backend.
FreeSum lifted_sum(const LiftedPair& lifted);

/// G of X1 (which = 1), X2 (2) or X1 + X2 (0) at a triangular B2, from the
/// closed block form built out of base-level quantities.
CMatrix lifted_G_block_formula(const LiftedPair& lifted, int which, const CMatrix& B2,
                               const TransformOptions& opts = {});

/// Same, computed in the lifted space directly: ambient inversion for one
/// summand, lifted free-sum series for the sum.
CMatrix lifted_G_direct(const LiftedPair& lifted, int which, const CMatrix& B2,
                        const TransformOptions& opts = {});

/// Block formula against the direct lifted evaluation for X1, X2 and X1 + X2.
std::vector<CheckReport> lifted_G_checks(const LiftedPair& lifted, const CMatrix& B2,
                                         double tolerance, const TransformOptions& opts = {});

/// diag(b, t) in the lifted base.
CMatrix lifted_point(const CMatrix& b, double t);

/// t = 10 max(1, 1 / ||b^{-1}||).
double default_lift_t(const CMatrix& b);

/// Blocks of Omega_j at diag(b, t). `corner` is the block off the diagonal
/// allowed by the orientation; `offdiag` the forbidden one.
struct BlockDiagnostics {
  CMatrix omega11;
  CMatrix corner;
  CMatrix omega_base;  // w_j(b) at the base level
  double residual_offdiag = 0.0;
  double residual_22 = 0.0;
  double residual_11 = 0.0;  // |omega11 - omega_base|
};

std::array<BlockDiagnostics, 2> lifted_omegas(const LiftedPair& lifted, const CMatrix& b, double t,
                                              const TransformOptions& opts = {});

/// The corner the lift predicts for beta_2 (and for beta_1 + beta_2):
/// lower -E[y (b - x)^{-1}] F_x(b), upper -F_x(b) E[(b - x)^{-1} y].
CMatrix predicted_corner(const FreeSum& sum, const std::optional<std::string>& y,
                         const CMatrix& b, Orientation orientation,
                         const TransformOptions& opts = {});

struct LiftTolerances {
  double block = 1e-9;
  double omega = 1e-8;
  double corner = 1e-8;
};

/// Block structure of both Omega_j, beta_1 = 0, beta_2 and beta_1 + beta_2
/// against the predicted corner.
std::vector<CheckReport> lift_checks(const FreePair& pair, const std::optional<std::string>& y,
                                     const CMatrix& b, Orientation orientation,
                                     const LiftTolerances& tol = {},
                                     const TransformOptions& opts = {});

/// E[y (b - x)^{-1}] = E[y (w1(b) - x1)^{-1}] (left) and its mirror
/// E[(b - x)^{-1} y] = E[(w1(b) - x1)^{-1} y] (right). The sum side comes
/// from the series, the other side from model 1 directly.
std::vector<CheckReport> theorem_identity_check(const FreeSum& sum,
                                                const std::optional<std::string>& y,
                                                const CMatrix& b, Route route, double tolerance,
                                                const SubordinationOptions& opts = {});

/// |phi(E[y (b - x)^{-1}] - E[y (w - x1)^{-1}])| with phi the normalized trace.
double orthogonality_defect(const FreeSum& sum, const std::optional<std::string>& y,
                            const CMatrix& b, const CMatrix& w, const TransformOptions& opts = {});

/// orthogonality_defect at w = w1(b) from the given route.
CheckReport orthogonality_check(const FreeSum& sum, const std::optional<std::string>& y,
                                const CMatrix& b, Route route, double tolerance,
                                const SubordinationOptions& opts = {});

}  // namespace fpsub
