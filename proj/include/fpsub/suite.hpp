#pragma once

#include <string_view>
#include <vector>

#include "fpsub/check_report.hpp"
#include "fpsub/scenario.hpp"

namespace fpsub {

enum class Suite { kTransforms, kSubordination, kTheorem, kLift, kFreeness };

const char* suite_name(Suite s);
std::vector<Suite> all_suites();

/// Comma-separated names or "all"; throws ValidationError("suite").
std::vector<Suite> parse_suites(std::string_view list);

/// FPSUB_THREADS if set and positive, else the hardware concurrency.
int default_thread_count();

/// Runs the selected suites over every weight and point of the scenario.
/// Report order is canonical (suite, weight, point, orientation) whatever
/// the thread count; library errors become failed reports.
std::vector<CheckReport> run_suite(const Scenario& s, const std::vector<Suite>& suites,
                                   int threads = default_thread_count());

/// free_mixed_moment against the brute-force oracle on every class pattern
/// of length <= max_len (x1 / x2 letters, random unit-norm B coefficients,
/// outer ones included). Passes iff the largest difference is <= tolerance.
CheckReport oracle_check(const Scenario& s, int max_len, double tolerance = 1e-10);

/// Tolerances applied by run_suite.
struct SuiteTolerances {
  double r_additivity = 1e-8;
  double subordination = 1e-8;
  double route_agreement = 1e-8;
  double theorem = 1e-8;
  double orthogonality = 1e-8;
  double freeness = 1e-10;
};

/// The series truncation tolerance used at b: the scenario value, tightened
/// so that the absolute error of resolvent-sized quantities stays near 1e-10
/// (the tolerance is relative to |b^{-1}|, and omega scales with |b|).
double series_tolerance_at(const CMatrix& b, double truncation_tol);

}  // namespace fpsub
