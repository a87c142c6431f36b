#include "fpsub/suite.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <thread>

#include "fpsub/freeness.hpp"
#include "fpsub/lift.hpp"
#include "fpsub/rng.hpp"
#include "fpsub/transforms.hpp"

namespace fpsub {

namespace {

using Task = std::function<std::vector<CheckReport>()>;

struct TaskSpec {
  std::string name;    // check name used if the task throws
  std::string anchor;
  std::string point;
  double tolerance;
  Task run;
};

std::vector<CheckReport> execute(const TaskSpec& t) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<CheckReport> out;
  try {
    out = t.run();
  } catch (const std::exception& e) {
    out = {CheckReport::failed(t.name, t.anchor, t.tolerance, describe_error(e))};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (auto& r : out) {
    r.seconds = secs;
    if (r.point.empty()) r.point = t.point;
  }
  return out;
}

bool in_series_domain(const FreeSum& sum, const CMatrix& b, double q_max) {
  try {
    return sum.rho() * spectral_norm(inverse(b)) <= q_max / 2;
  } catch (const SingularError&) {
    return false;
  }
}

bool in_half_plane(const CMatrix& b) { return min_imag_eigenvalue(b) > 0.0; }

std::string tagged(std::string name, const std::string& label) { return name + "[y=" + label + "]"; }

SubordinationOptions options_at(const SubordinationOptions& base, const CMatrix& b) {
  SubordinationOptions o = base;
  o.transform.tol = series_tolerance_at(b, base.transform.tol);
  return o;
}

}  // namespace

const char* suite_name(Suite s) {
  switch (s) {
    case Suite::kTransforms:
      return "transforms";
    case Suite::kSubordination:
      return "subordination";
    case Suite::kTheorem:
      return "theorem";
    case Suite::kLift:
      return "lift";
    case Suite::kFreeness:
      return "freeness";
  }
  return "";
}

std::vector<Suite> all_suites() {
  return {Suite::kTransforms, Suite::kSubordination, Suite::kTheorem, Suite::kLift, Suite::kFreeness};
}

std::vector<Suite> parse_suites(std::string_view list) {
  if (list == "all") return all_suites();
  std::vector<Suite> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    std::size_t end = list.find(',', pos);
    if (end == std::string_view::npos) end = list.size();
    const std::string_view item = list.substr(pos, end - pos);
    bool found = false;
    for (Suite s : all_suites()) {
      if (item == suite_name(s)) {
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
        found = true;
      }
    }
    if (!found)
      throw ValidationError("suite", "unknown suite '" + std::string(item) +
                                         "' (transforms, subordination, theorem, lift, freeness, all)");
    pos = end + 1;
  }
  return out;
}

int default_thread_count() {
  if (const char* env = std::getenv("FPSUB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double series_tolerance_at(const CMatrix& b, double truncation_tol) {
  double scale = std::max(1.0, spectral_norm(b));
  try {
    scale = std::max(scale, spectral_norm(inverse(b)));
  } catch (const SingularError&) {
  }
  return std::min(truncation_tol, 1e-10 / scale);
}

std::vector<CheckReport> run_suite(const Scenario& s, const std::vector<Suite>& suites, int threads) {
  const Instance inst = instantiate(s);
  const FreePair& pair = inst.pair;
  const FreeSum sum = make_free_sum(pair);
  const SuiteTolerances tol;
  const double q_max = inst.options.transform.q_max;
  auto selected = [&](Suite x) { return std::find(suites.begin(), suites.end(), x) != suites.end(); };

  std::vector<TaskSpec> tasks;

  if (selected(Suite::kTransforms) && s.r_points > 0) {
    const char* anchor = "R_x(b) = R_x1(b) + R_x2(b)";
    tasks.push_back({"transforms.R-additivity", anchor, "R-points", tol.r_additivity, [&, anchor] {
                       const auto pts = r_additivity_points(s, sum.rho());
                       double worst = 0.0;
                       for (const CMatrix& b : pts) {
                         TransformOptions o = inst.options.transform;
                         o.tol = series_tolerance_at(b, o.tol);
                         o.solver_tol = std::min(o.solver_tol, o.tol);
                         worst = std::max(worst, r_additivity_residual(sum, b, o));
                       }
                       CheckReport r =
                           CheckReport::make("transforms.R-additivity", anchor, worst, tol.r_additivity);
                       r.route = "series";
                       std::ostringstream note;
                       note << "points=" << pts.size() << " q=[" << s.r_qmax / 5 << ", " << s.r_qmax << "]";
                       r.note = note.str();
                       return std::vector<CheckReport>{r};
                     }});
  }

  if (selected(Suite::kSubordination)) {
    for (std::size_t k = 0; k < inst.points.size(); ++k) {
      const char* anchor = "F_x(b) = F_1(w1(b)) = F_2(w2(b)) = w1(b) + w2(b) - b";
      tasks.push_back({"subordination", anchor, inst.point_labels[k], tol.subordination, [&, k, anchor] {
                         const CMatrix& b = inst.points[k];
                         const SubordinationOptions o = options_at(inst.options, b);
                         const bool series = in_series_domain(sum, b, q_max);
                         std::vector<CheckReport> out;
                         if (in_half_plane(b) || !series)
                           out = subordination_residuals(sum, b, Route::kFixedPoint, tol.subordination, o);
                         if (!series) return out;
                         auto sr = subordination_residuals(sum, b, Route::kSeries, tol.subordination, o);
                         out.insert(out.end(), sr.begin(), sr.end());
                         if (!in_half_plane(b)) return out;
                         const char* agree = "w_j(b) by series = w_j(b) by fixed point";
                         try {
                           const auto a = subordinate_series(sum, b, o.transform);
                           const auto f = subordinate_fixed_point(sum, b, o);
                           const double d = std::max(spectral_norm(CMatrix(a.omega1 - f.omega1)),
                                                     spectral_norm(CMatrix(a.omega2 - f.omega2)));
                           out.push_back(CheckReport::make("subordination.route-agreement", agree, d,
                                                           tol.route_agreement));
                         } catch (const Error& e) {
                           out.push_back(CheckReport::failed("subordination.route-agreement", agree,
                                                             tol.route_agreement, describe_error(e)));
                         }
                         out.back().route = "series+fixed";
                         return out;
                       }});
    }
  }

  if (selected(Suite::kTheorem)) {
    for (std::size_t w = 0; w < inst.weights.size(); ++w) {
      for (std::size_t k = 0; k < inst.points.size(); ++k) {
        const std::string label = inst.weight_labels[w];
        tasks.push_back({tagged("theorem", label), "E[y (b - x)^-1] = E[y (w1(b) - x1)^-1]",
                         inst.point_labels[k], tol.theorem, [&, w, k, label] {
                           const CMatrix& b = inst.points[k];
                           const SubordinationOptions o = options_at(inst.options, b);
                           const Route route = in_half_plane(b) ? Route::kFixedPoint : Route::kSeries;
                           auto out = theorem_identity_check(sum, inst.weights[w], b, route, tol.theorem, o);
                           out.push_back(
                               orthogonality_check(sum, inst.weights[w], b, route, tol.orthogonality, o));
                           for (auto& r : out) r.check = tagged(r.check, label);
                           return out;
                         }});
      }
    }
  }

  if (selected(Suite::kLift)) {
    for (std::size_t w = 0; w < inst.weights.size(); ++w) {
      for (std::size_t k = 0; k < inst.points.size(); ++k) {
        for (Orientation orient : {Orientation::kLower, Orientation::kUpper}) {
          const std::string label = inst.weight_labels[w];
          tasks.push_back({tagged(std::string("lift.") + orientation_name(orient), label),
                           "Omega_j(b (+) t) block structure and beta corners", inst.point_labels[k], 1e-8,
                           [&, w, k, label, orient] {
                             const CMatrix& b = inst.points[k];
                             const SubordinationOptions o = options_at(inst.options, b);
                             auto out = lift_checks(pair, inst.weights[w], b, orient, {}, o.transform);
                             for (auto& r : out) r.check = tagged(r.check, label);
                             return out;
                           }});
        }
      }
    }
  }

  if (selected(Suite::kFreeness)) {
    for (std::size_t w = 0; w < inst.weights.size(); ++w) {
      const std::string label = inst.weight_labels[w];
      tasks.push_back({tagged("freeness", label), "E_2[a1 a2 ... am] = 0 for alternating centred a_i", "",
                       tol.freeness, [&, w, label] {
                         const LiftedPair lifted = build_lift(pair, inst.weights[w], Orientation::kLower);
                         CheckReport r = verify_freeness(lifted, s.freeness_order, tol.freeness, *s.seed);
                         r.check = tagged(r.check, label);
                         r.route = "lift.lower";
                         return std::vector<CheckReport>{r};
                       }});
    }
  }

  std::vector<std::vector<CheckReport>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < tasks.size();) results[i] = execute(tasks[i]);
  };
  const int n = std::clamp(threads, 1, std::max(1, int(tasks.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<CheckReport> out;
  for (auto& r : results) out.insert(out.end(), r.begin(), r.end());
  return out;
}

CheckReport oracle_check(const Scenario& s, int max_len, double tolerance) {
  const char* anchor = "free_mixed_moment(w) = E[w] in the free product realization";
  const Instance inst = instantiate(s);
  if (max_len < 1 || max_len > inst.pair.limits().oracle_cap)
    throw CapExceeded("oracle-check length " + std::to_string(max_len) + " outside [1, " +
                      std::to_string(inst.pair.limits().oracle_cap) + "]");
  const int n = s.base_dim;
  CounterRng rng(*s.seed, 400);
  double worst = 0.0;
  long words = 0;
  for (int m = 1; m <= max_len; ++m) {
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      Word w;
      for (int i = 0; i < m; ++i) {
        const int cls = (mask >> i) & 1u ? 2 : 1;
        w.letters.push_back({cls, cls == 1 ? "x1" : "x2"});
      }
      for (int i = 0; i + 1 < m; ++i) w.coeffs.push_back(rng.scaled(n, 1.0));
      w.left = rng.scaled(n, 1.0);
      w.right = rng.scaled(n, 1.0);
      const CMatrix fast = free_mixed_moment(inst.pair, w);
      const CMatrix slow = free_mixed_moment_oracle(inst.pair, w);
      worst = std::max(worst, spectral_norm(CMatrix(fast - slow)));
      ++words;
    }
  }
  CheckReport r = CheckReport::make("oracle", anchor, worst, tolerance);
  r.route = "oracle";
  r.note = "words=" + std::to_string(words) + " max_len=" + std::to_string(max_len);
  return r;
}

}  // namespace fpsub
