#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fpsub/algebra.hpp"
#include "fpsub/moments.hpp"
#include "fpsub/subordination.hpp"

namespace fpsub {

/// How one free variable is built. Exactly one of preset / generator /
/// explicit matrix per section.
struct VariableSpec {
  enum class Kind { kPreset, kGenerator, kMatrix };
  Kind kind = Kind::kPreset;
  std::string preset;        // bernoulli | zero | shifted_projection | constant
  double bound = 1.0;        // random_selfadjoint spectral bound
  std::optional<int> rank;   // shifted_projection, default N / 2
  double shift = 0.5;        // shifted_projection
  CMatrix value;             // constant: n x n; matrix: nN x nN
};

/// A class-1 weight: "1", or a product of tokens x1 and c (c a random B
/// element with unit spectral norm, fresh per occurrence).
struct WeightSpec {
  std::vector<std::string> tokens;
};

/// i T 1 (+ eps * random unit-norm B element), z 1, or an explicit matrix.
struct PointSpec {
  enum class Kind { kImaginary, kScalar, kMatrix };
  Kind kind = Kind::kImaginary;
  double T = 0.0;
  double perturb = 0.0;
  Scalar z;
  CMatrix value;
};

struct Scenario {
  std::string name;
  int base_dim = 0;
  int fiber1 = 0;
  int fiber2 = 0;
  std::optional<std::uint64_t> seed;
  double truncation_tol = 1e-10;
  double solver_tol = 1e-12;
  int word_cap = 10;
  int partition_cap = kPartitionCap;
  double q_max = 0.5;
  int r_points = 20;
  double r_qmax = 0.05;
  int freeness_order = 4;
  VariableSpec x1;
  VariableSpec x2;
  std::vector<WeightSpec> weights;
  std::vector<PointSpec> points;
};

bool operator==(const Scenario& a, const Scenario& b);

/// Throws ParseError (line, column) on malformed text and ValidationError
/// (field path) on a well-formed but invalid scenario.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

/// Canonical text; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& s);

/// One point in the scenario grammar ("iT 40 perturb 0.5", "scalar 0:3",
/// "matrix 0:9 1 ; 1 0:9"); errors are reported as line 1.
PointSpec parse_point_spec(std::string_view text);

std::string describe(const PointSpec& p);
std::string describe(const WeightSpec& w);

/// A scenario made concrete: the free pair, weights as class-1 element
/// names (nullopt is y = 1) and evaluation points.
struct Instance {
  FreePair pair;
  std::vector<std::optional<std::string>> weights;
  std::vector<std::string> weight_labels;
  std::vector<CMatrix> points;
  std::vector<std::string> point_labels;
  SubordinationOptions options;
};

/// Draws every random quantity from CounterRng(seed, stream): x1 stream 1,
/// x2 stream 2, point k stream 100 + k, weight k stream 200 + k, R points
/// stream 300.
Instance instantiate(const Scenario& s);

/// Admissible points for the R-additivity check: q = rho |b| spread over
/// [r_qmax / 5, r_qmax].
std::vector<CMatrix> r_additivity_points(const Scenario& s, double rho);

}  // namespace fpsub
