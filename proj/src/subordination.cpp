#include "fpsub/subordination.hpp"

#include <sstream>

namespace fpsub {

const char* route_name(Route r) { return r == Route::kSeries ? "series" : "fixed_point"; }

CMatrix omega_series(const FreeSum& sum, int j, const CMatrix& b, const TransformOptions& opts) {
  const CMatrix binv = inverse(b);
  TransformDomain{sum.rho(), opts.q_max, opts.tol}.require(binv, 0.5, "omega_series");
  const CMatrix g = sum_G_series(sum, std::nullopt, b, Side::kLeft, opts).value;
  return inverse(K_tilde(sum.model(j), sum.name(j), g, opts));
}

SubordinationResult subordinate_series(const FreeSum& sum, const CMatrix& b,
                                       const TransformOptions& opts) {
  SubordinationResult r;
  r.omega1 = omega_series(sum, 1, b, opts);
  r.omega2 = omega_series(sum, 2, b, opts);
  r.route = Route::kSeries;
  return r;
}

SubordinationResult subordinate_fixed_point(const FreeSum& sum, const CMatrix& b,
                                            const SubordinationOptions& opts, int first,
                                            const std::optional<CMatrix>& start) {
  HalfPlanePoint::make(b);
  if (first != 1 && first != 2) throw DimensionError("subordinate_fixed_point: class must be 1 or 2");
  const int second = 3 - first;
  auto F = [&](int cls, const CMatrix& w) { return F_transform(sum.model(cls), sum.name(cls), w); };
  auto map = [&](const CMatrix& w) {
    const CMatrix u = F(first, w) - w + b;  // h_first(w) + b
    return CMatrix(F(second, u) - u + b);
  };
  const double scale = std::max(1.0, spectral_norm(b));
  const double tol = opts.tol * scale;

  CMatrix w = start.value_or(b);
  double prev_step = INFINITY;
  for (int it = 0; it < opts.max_iter; ++it) {
    CMatrix next;
    try {
      next = map(w);
    } catch (const SingularError& e) {
      std::ostringstream msg;
      msg << "fixed point: singular evaluation at iteration " << it << " (" << e.what() << ")";
      throw ConvergenceError(msg.str());
    }
    const double step = spectral_norm(next - w);
    if (!std::isfinite(step) || step > 1e8 * scale) {
      std::ostringstream msg;
      msg << "fixed point: iteration diverged at step " << it << " (step norm " << step << ")";
      throw ConvergenceError(msg.str());
    }
    if (prev_step <= tol && step <= tol) {
      SubordinationResult r;
      r.route = Route::kFixedPoint;
      r.iterations = it;
      CMatrix other = F(first, w) - w + b;
      r.omega1 = first == 1 ? w : other;
      r.omega2 = first == 1 ? other : w;
      return r;
    }
    prev_step = step;
    w = std::move(next);
  }
  std::ostringstream msg;
  msg << "fixed point: no convergence in " << opts.max_iter << " iterations (last step "
      << prev_step << ", tolerance " << tol << ")";
  throw ConvergenceError(msg.str());
}

CMatrix omega_fixed_point(const FreeSum& sum, int j, const CMatrix& b,
                          const SubordinationOptions& opts) {
  SubordinationResult r = subordinate_fixed_point(sum, b, opts, j);
  return j == 1 ? r.omega1 : r.omega2;
}

std::array<double, 3> subordination_defects(const FreeSum& sum, const CMatrix& b,
                                            const SubordinationResult& r,
                                            const TransformOptions& opts) {
  const CMatrix f1 = F_transform(sum.model(1), sum.name1, r.omega1);
  const CMatrix f2 = F_transform(sum.model(2), sum.name2, r.omega2);
  const CMatrix linear = r.omega1 + r.omega2 - b;
  if (r.route == Route::kSeries) {
    const CMatrix fx = inverse(sum_G_series(sum, std::nullopt, b, Side::kLeft, opts).value);
    return {spectral_norm(fx - f1), spectral_norm(f1 - f2), spectral_norm(f1 - linear)};
  }
  return {spectral_norm(f1 - f2), spectral_norm(f1 - linear), spectral_norm(f2 - linear)};
}

std::vector<CheckReport> subordination_residuals(const FreeSum& sum, const CMatrix& b, Route route,
                                                 double tolerance,
                                                 const SubordinationOptions& opts) {
  static const std::array<std::pair<const char*, const char*>, 3> kSeries{{
      {"subordination.Fx=F1(w1)", "F_x(b) = F_x1(w1(b))"},
      {"subordination.F1(w1)=F2(w2)", "F_x1(w1(b)) = F_x2(w2(b))"},
      {"subordination.F1(w1)=w1+w2-b", "F_x1(w1(b)) = w1(b) + w2(b) - b"},
  }};
  static const std::array<std::pair<const char*, const char*>, 3> kFixed{{
      {"subordination.F1(w1)=F2(w2)", "F_x1(w1(b)) = F_x2(w2(b))"},
      {"subordination.F1(w1)=w1+w2-b", "F_x1(w1(b)) = w1(b) + w2(b) - b"},
      {"subordination.F2(w2)=w1+w2-b", "F_x2(w2(b)) = w1(b) + w2(b) - b"},
  }};
  const auto& names = route == Route::kSeries ? kSeries : kFixed;
  std::vector<CheckReport> out;
  try {
    SubordinationResult r = route == Route::kSeries ? subordinate_series(sum, b, opts.transform)
                                                    : subordinate_fixed_point(sum, b, opts);
    const auto d = subordination_defects(sum, b, r, opts.transform);
    for (int i = 0; i < 3; ++i) {
      out.push_back(CheckReport::make(names[i].first, names[i].second, d[i], tolerance));
      if (route == Route::kFixedPoint)
        out.back().note = "iterations=" + std::to_string(r.iterations);
    }
  } catch (const Error& e) {
    out.clear();
    for (const auto& [check, anchor] : names)
      out.push_back(CheckReport::failed(check, anchor, tolerance, describe_error(e)));
  }
  for (auto& rep : out) rep.route = route_name(route);
  return out;
}

double uniqueness_spread(const FreeSum& sum, const CMatrix& b, const SubordinationOptions& opts) {
  const Scalar i(0.0, 1.0);
  const CMatrix one = identity(b.rows());
  const std::vector<CMatrix> starts{b, b + i * one, b + 4.0 * i * one, b + one,
                                    b - one + 0.5 * i * one};
  std::vector<CMatrix> omegas;
  for (const auto& s : starts) omegas.push_back(subordinate_fixed_point(sum, b, opts, 1, s).omega1);
  double spread = 0.0;
  for (std::size_t a = 0; a < omegas.size(); ++a)
    for (std::size_t c = a + 1; c < omegas.size(); ++c)
      spread = std::max(spread, spectral_norm(omegas[a] - omegas[c]));
  return spread;
}

double half_plane_margin(const SubordinationResult& r, const CMatrix& b) {
  return std::min(min_imag_eigenvalue(CMatrix(r.omega1 - b)),
                  min_imag_eigenvalue(CMatrix(r.omega2 - b)));
}

}  // namespace fpsub
