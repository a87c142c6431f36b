#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fpsub/check_report.hpp"
#include "fpsub/transforms.hpp"

namespace fpsub {

enum class Route { kSeries, kFixedPoint };

const char* route_name(Route r);

struct SubordinationOptions {
  TransformOptions transform;
  double tol = 1e-12;  // fixed point step and defect, relative to max(1, ||b||)
  int max_iter = 2000;
};

struct SubordinationResult {
  CMatrix omega1;
  CMatrix omega2;
  Route route = Route::kSeries;
  int iterations = 0;
};

/// (K_tilde_xj(G_x(b)))^{-1} with G_x(b) from the free-sum series.
/// Requires rho ||b^{-1}|| <= q_max / 2.
CMatrix omega_series(const FreeSum& sum, int j, const CMatrix& b,
                     const TransformOptions& opts = {});

SubordinationResult subordinate_series(const FreeSum& sum, const CMatrix& b,
                                       const TransformOptions& opts = {});

/// Iterates w -> h_k(h_j(w) + b) + b, h(w) = F(w) - w, from `start` (default
/// b); j = `first`, k the other class. The other function follows from
/// F_j(w_j) - w_j + b. Requires b in the upper half-plane.
SubordinationResult subordinate_fixed_point(const FreeSum& sum, const CMatrix& b,
                                            const SubordinationOptions& opts = {},
                                            int first = 1,
                                            const std::optional<CMatrix>& start = std::nullopt);

CMatrix omega_fixed_point(const FreeSum& sum, int j, const CMatrix& b,
                          const SubordinationOptions& opts = {});

/// The three defects: series route
///   |F_x - F_1(w1)|, |F_1(w1) - F_2(w2)|, |F_1(w1) - w1 - w2 + b|
/// fixed-point route (no F_x off the series domain)
///   |F_1(w1) - F_2(w2)|, |F_1(w1) - w1 - w2 + b|, |F_2(w2) - w1 - w2 + b|.
std::array<double, 3> subordination_defects(const FreeSum& sum, const CMatrix& b,
                                            const SubordinationResult& r,
                                            const TransformOptions& opts = {});

std::vector<CheckReport> subordination_residuals(const FreeSum& sum, const CMatrix& b, Route route,
                                                 double tolerance,
                                                 const SubordinationOptions& opts = {});

/// Largest pairwise distance between fixed points reached from several
/// admissible starts.
double uniqueness_spread(const FreeSum& sum, const CMatrix& b,
                         const SubordinationOptions& opts = {});

/// min over j of the least eigenvalue of Im w_j - Im b.
double half_plane_margin(const SubordinationResult& r, const CMatrix& b);

}  // namespace fpsub
