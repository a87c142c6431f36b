#include "fpsub/transforms.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace fpsub {

namespace {

// Relative slack for the term-norm monitor; the bound itself is exact.
constexpr double kMonitorSlack = 1e-8;

int truncation_order(double q, double tol) {
  if (q == 0.0) return 0;
  int m = 0;
  while (std::pow(q, m + 1) / (1.0 - q) > tol) ++m;
  return m;
}

void check_monitor(double term_norm, double bound, int m) {
  if (term_norm > bound * (1.0 + kMonitorSlack) + 1e-300) {
    std::ostringstream msg;
    msg << "series term " << m << " has norm " << term_norm << " above the geometric bound "
        << bound << " (spectral bound too small?)";
    throw ConvergenceError(msg.str());
  }
}

CMatrix invert_local(const std::function<CMatrix(const CMatrix&)>& g_tilde, const CMatrix& w,
                     const TransformOptions& opts) {
  const double scale = spectral_norm(w);
  if (scale == 0.0) return w;
  CMatrix k = w;
  double best = INFINITY;
  int stalls = 0;
  for (int it = 0; it < opts.max_iter; ++it) {
    CMatrix defect = g_tilde(k) - w;
    const double d = spectral_norm(defect);
    if (d <= opts.solver_tol * scale) return k;
    if (d >= best) {
      // floating point floor reached
      if (++stalls >= 3 && d <= 1e3 * opts.solver_tol * scale) return k;
    } else {
      best = d;
      stalls = 0;
    }
    k -= defect;
  }
  std::ostringstream msg;
  msg << "K_tilde: no convergence in " << opts.max_iter << " iterations (|w| = " << scale
      << "); argument outside the contraction domain";
  throw ConvergenceError(msg.str());
}

}  // namespace

void TransformDomain::require(const CMatrix& arg, double fraction, const char* what) const {
  const double qa = q(arg);
  if (!(qa <= fraction * q_max)) {
    std::ostringstream msg;
    msg << what << ": rho*|arg| = " << qa << " exceeds " << fraction * q_max;
    throw DomainError(msg.str());
  }
}

CMatrix cauchy_G(const MatrixModel& model, const std::string& name, const CMatrix& b) {
  const CMatrix& x = model.element(name);
  return expect(inverse(embed(b, model) - x), model);
}

CMatrix F_transform(const MatrixModel& model, const std::string& name, const CMatrix& b) {
  return inverse(cauchy_G(model, name, b));
}

CMatrix G_tilde(const MatrixModel& model, const std::string& name, const CMatrix& b) {
  const CMatrix& x = model.element(name);
  const CMatrix eb = embed(b, model);
  return expect(eb * inverse(identity(model.ambient_dim()) - x * eb), model);
}

SeriesResult G_tilde_series(const MatrixModel& model, const std::string& name, const CMatrix& b,
                            const TransformOptions& opts) {
  const CMatrix& x = model.element(name);
  TransformDomain dom{spectral_norm(x), opts.q_max, opts.tol};
  dom.require(b, 1.0, "G_tilde_series");
  const double q = dom.q(b);
  const double nb = spectral_norm(b);
  const int order = truncation_order(q, opts.tol);
  const CMatrix eb = embed(b, model);
  SeriesResult out{CMatrix::Zero(b.rows(), b.cols()), order, 0.0};
  CMatrix power = eb;  // b (x b)^m
  for (int m = 0; m <= order; ++m) {
    if (m > 0) power = power * x * eb;
    CMatrix term = expect(power, model);
    check_monitor(spectral_norm(term), nb * std::pow(q, m), m);
    out.value += term;
  }
  out.tail_bound = q == 0.0 ? 0.0 : nb * std::pow(q, order + 1) / (1.0 - q);
  return out;
}

CMatrix K_tilde(const MatrixModel& model, const std::string& name, const CMatrix& w,
                const TransformOptions& opts) {
  TransformDomain dom{spectral_norm(model.element(name)), opts.q_max, opts.tol};
  dom.require(w, 0.5, "K_tilde");
  return invert_local([&](const CMatrix& k) { return G_tilde(model, name, k); }, w, opts);
}

CMatrix R_transform(const MatrixModel& model, const std::string& name, const CMatrix& b,
                    const TransformOptions& opts) {
  return inverse(K_tilde(model, name, b, opts)) - inverse(b);
}

FreeSum make_free_sum(const JointMoments& moments, std::string name1, std::string name2) {
  FreeSum s;
  s.moments = &moments;
  s.rho1 = spectral_norm(moments.model(1).element(name1));
  s.rho2 = spectral_norm(moments.model(2).element(name2));
  s.name1 = std::move(name1);
  s.name2 = std::move(name2);
  return s;
}

SeriesResult free_sum_series(const FreeSum& sum, const std::optional<std::string>& y,
                             const CMatrix& c, Side side, const TransformOptions& opts) {
  const int n = sum.base().dim();
  if (c.rows() != n || c.cols() != n) throw DimensionError("free_sum_series: coefficient dimension");
  TransformDomain dom{sum.rho(), opts.q_max, opts.tol};
  dom.require(c, 1.0, "free_sum_series");
  const double q = dom.q(c);
  const double ny = y ? spectral_norm(sum.model(1).element(*y)) : 1.0;
  const double scale = ny * spectral_norm(c);
  const int order = truncation_order(q, opts.tol);
  const int longest = order + (y ? 1 : 0);
  if (longest > sum.moments->limits().word_cap) {
    std::ostringstream msg;
    msg << "series needs words of length " << longest << " (q = " << q << ", tol = " << opts.tol
        << ") but the word cap is " << sum.moments->limits().word_cap
        << "; relax the tolerance or move the point further out";
    throw CapExceeded(msg.str());
  }

  SeriesResult out{CMatrix::Zero(n, n), order, 0.0};
  const Letter ly{1, y.value_or("")};
  for (int m = 0; m <= order; ++m) {
    CMatrix term = CMatrix::Zero(n, n);
    if (m == 0 && !y) {
      term = c;
    } else {
      for (long mask = 0; mask < (1L << m); ++mask) {
        Word w;
        if (y && side == Side::kLeft) w.letters.push_back(ly);
        for (int i = 0; i < m; ++i) {
          const int cls = (mask >> i) & 1 ? 2 : 1;
          w.letters.push_back(Letter{cls, sum.name(cls)});
        }
        if (y && side == Side::kRight) w.letters.push_back(ly);
        w.coeffs.assign(w.letters.size() - 1, c);
        if (!y || side == Side::kRight) w.left = c;
        if (!y || side == Side::kLeft) w.right = c;
        term += sum.moments->moment(w);
      }
    }
    check_monitor(spectral_norm(term), scale * std::pow(q, m), m);
    out.value += term;
  }
  out.tail_bound = q == 0.0 ? 0.0 : scale * std::pow(q, order + 1) / (1.0 - q);
  return out;
}

SeriesResult sum_G_series(const FreeSum& sum, const std::optional<std::string>& y,
                          const CMatrix& b, Side side, const TransformOptions& opts) {
  return free_sum_series(sum, y, inverse(b), side, opts);
}

SeriesResult sum_G_tilde(const FreeSum& sum, const CMatrix& w, const TransformOptions& opts) {
  return free_sum_series(sum, std::nullopt, w, Side::kLeft, opts);
}

CMatrix sum_K_tilde(const FreeSum& sum, const CMatrix& w, const TransformOptions& opts) {
  TransformDomain dom{sum.rho(), opts.q_max, opts.tol};
  dom.require(w, 0.5, "K_tilde of the sum");
  return invert_local([&](const CMatrix& k) { return sum_G_tilde(sum, k, opts).value; }, w, opts);
}

CMatrix sum_R_transform(const FreeSum& sum, const CMatrix& b, const TransformOptions& opts) {
  return inverse(sum_K_tilde(sum, b, opts)) - inverse(b);
}

double r_additivity_residual(const FreeSum& sum, const CMatrix& b, const TransformOptions& opts) {
  const CMatrix rx = sum_R_transform(sum, b, opts);
  const CMatrix r1 = R_transform(sum.model(1), sum.name1, b, opts);
  const CMatrix r2 = R_transform(sum.model(2), sum.name2, b, opts);
  return spectral_norm(rx - r1 - r2);
}

}  // namespace fpsub
