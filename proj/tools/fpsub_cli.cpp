#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "fpsub/errors.hpp"
#include "fpsub/report.hpp"
#include "fpsub/scenario.hpp"
#include "fpsub/subordination.hpp"
#include "fpsub/suite.hpp"
#include "fpsub/transforms.hpp"

using namespace fpsub;

namespace {

// exit codes: 0 every check passed, 1 some check failed, 2 bad input
constexpr int kFailed = 1;
constexpr int kBadInput = 2;

void print_matrix(const std::string& label, const CMatrix& m) {
  const Eigen::IOFormat fmt(Eigen::FullPrecision, 0, ", ", "\n", "  [", "]");
  std::cout << label << " =\n" << m.format(fmt) << "\n";
}

Instance at_point(Scenario s, const std::string& point) {
  s.points = {parse_point_spec(point)};
  return instantiate(s);
}

Scenario load(const std::string& path, const std::optional<std::uint64_t>& seed) {
  if (!std::filesystem::is_regular_file(path)) throw ValidationError("file", "cannot open '" + path + "'");
  Scenario s = load_scenario(path);
  if (seed) s.seed = *seed;
  return s;
}

int run_verify(const std::string& path, const std::string& suites, const std::string& format,
               const std::optional<std::uint64_t>& seed, const std::string& out, int threads) {
  const Scenario s = load(path, seed);
  const auto reports = run_suite(s, parse_suites(suites), threads > 0 ? threads : default_thread_count());
  std::cout << emit_report(reports, parse_report_format(format));
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw Error("cannot write '" + out + "'");
    f << emit_report(reports, ReportFormat::kJson);
  }
  return all_pass(reports) ? 0 : kFailed;
}

int run_transforms(const std::string& path, const std::string& point) {
  const Scenario s = load(path, std::nullopt);
  const Instance inst = at_point(s, point);
  const CMatrix& b = inst.points[0];
  const FreeSum sum = make_free_sum(inst.pair);
  const TransformOptions& opts = inst.options.transform;
  std::cout << "point: " << inst.point_labels[0] << "\n";
  std::printf("rho1 = %.17g  rho2 = %.17g\n", sum.rho1, sum.rho2);
  for (int j = 1; j <= 2; ++j) {
    const std::string name = sum.name(j);
    print_matrix("G_" + name + "(b)", cauchy_G(sum.model(j), name, b));
    print_matrix("F_" + name + "(b)", F_transform(sum.model(j), name, b));
  }
  try {
    const SeriesResult g = sum_G_series(sum, std::nullopt, b, Side::kLeft, opts);
    print_matrix("G_x(b) [series]", g.value);
    std::printf("  order %d, tail bound %.3e\n", g.order_used, g.tail_bound);
  } catch (const Error& e) {
    std::cout << "G_x(b) [series] unavailable: " << describe_error(e) << "\n";
    const SubordinationResult r = subordinate_fixed_point(sum, b, inst.options);
    print_matrix("G_x(b) [G_x1(w1(b))]", cauchy_G(sum.model(1), sum.name(1), r.omega1));
  }
  try {
    print_matrix("R_x(b)", sum_R_transform(sum, b, opts));
    for (int j = 1; j <= 2; ++j)
      print_matrix("R_" + sum.name(j) + "(b)", R_transform(sum.model(j), sum.name(j), b, opts));
  } catch (const Error& e) {
    std::cout << "R transforms unavailable at this point: " << describe_error(e) << "\n";
  }
  return 0;
}

int run_subordinate(const std::string& path, const std::string& point, const std::string& route) {
  const Scenario s = load(path, std::nullopt);
  const Instance inst = at_point(s, point);
  const CMatrix& b = inst.points[0];
  const FreeSum sum = make_free_sum(inst.pair);
  Route r;
  if (route == "series")
    r = Route::kSeries;
  else if (route == "fixed")
    r = Route::kFixedPoint;
  else
    throw ValidationError("route", "expected series or fixed");
  const SubordinationResult res =
      r == Route::kSeries ? subordinate_series(sum, b, inst.options.transform) : subordinate_fixed_point(sum, b, inst.options);
  std::cout << "point: " << inst.point_labels[0] << "\nroute: " << route_name(r) << "\n";
  if (r == Route::kFixedPoint) std::cout << "iterations: " << res.iterations << "\n";
  print_matrix("w1(b)", res.omega1);
  print_matrix("w2(b)", res.omega2);
  auto reports = subordination_residuals(sum, b, r, 1e-8, inst.options);
  for (auto& rep : reports) rep.point = inst.point_labels[0];
  std::cout << emit_report(reports, ReportFormat::kHuman);
  return all_pass(reports) ? 0 : kFailed;
}

int run_oracle(const std::string& path, int max_len, const std::optional<std::uint64_t>& seed,
               const std::string& format) {
  const Scenario s = load(path, seed);
  const std::vector<CheckReport> reports{oracle_check(s, max_len)};
  std::cout << emit_report(reports, parse_report_format(format));
  return all_pass(reports) ? 0 : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator-valued free convolution and subordination checks"};
  app.require_subcommand(1);

  std::string scenario, suites = "all", format = "human", out, point, route = "fixed";
  std::optional<std::uint64_t> seed;
  int threads = 0;
  int max_len = 6;

  auto* verify = app.add_subcommand("verify", "run check suites over a scenario");
  verify->add_option("scenario", scenario, "scenario file")->required();
  verify->add_option("--suite", suites, "comma-separated suites or all");
  verify->add_option("--format", format, "human, json or csv");
  verify->add_option("--seed", seed, "override the scenario seed");
  verify->add_option("--out", out, "also write the json report here");
  verify->add_option("--threads", threads, "worker threads (default FPSUB_THREADS or all cores)");

  auto* transforms = app.add_subcommand("transforms", "print transforms at one point");
  transforms->add_option("scenario", scenario, "scenario file")->required();
  transforms->add_option("--point", point, "point, e.g. \"iT 40\" or \"scalar 0:30\"")->required();

  auto* subordinate = app.add_subcommand("subordinate", "compute subordination functions at one point");
  subordinate->add_option("scenario", scenario, "scenario file")->required();
  subordinate->add_option("--point", point, "point, e.g. \"iT 3\"")->required();
  subordinate->add_option("--route", route, "series or fixed")->check(CLI::IsMember({"series", "fixed"}));

  auto* oracle = app.add_subcommand("oracle-check", "compare fast moments with the brute-force oracle");
  oracle->add_option("scenario", scenario, "scenario file")->required();
  oracle->add_option("--max-len", max_len, "longest word")->check(CLI::Range(1, 8));
  oracle->add_option("--seed", seed, "override the scenario seed");
  oracle->add_option("--format", format, "human, json or csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kBadInput;
  }

  try {
    if (*verify) return run_verify(scenario, suites, format, seed, out, threads);
    if (*transforms) return run_transforms(scenario, point);
    if (*subordinate) return run_subordinate(scenario, point, route);
    if (*oracle) return run_oracle(scenario, max_len, seed, format);
  } catch (const ParseError& e) {
    std::cerr << scenario << ": " << e.what() << "\n";
    return kBadInput;
  } catch (const ValidationError& e) {
    std::cerr << scenario << ": " << e.what() << "\n";
    return kBadInput;
  } catch (const Error& e) {
    std::cerr << describe_error(e) << "\n";
    return kFailed;
  }
  return kBadInput;
}
