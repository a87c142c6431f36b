#include <gtest/gtest.h>

#include "fpsub/rng.hpp"
#include "fpsub/scenario.hpp"

using namespace fpsub;

namespace {

const char* kBernoulli = R"(# two free Bernoulli variables
name = bernoulli
base_dim = 1
fiber_dims = 2 2
seed = 7
point = iT 3
point = scalar 0.5:20

[x1]
preset = bernoulli

[x2]
preset = bernoulli
)";

const char* kMatrix = R"(name = explicit
base_dim = 2
fiber_dims = 1 2
seed = 11
truncation_tol = 1e-12
word_cap = 13
y = 1
y = x1 c x1
point = iT 40 perturb 0.25
point = matrix 0:30 1:0.5 ; 0 -2:25

[x1]
matrix = 1 0.5:0.25 ; 0.5:-0.25 -1

[x2]
generator = random_selfadjoint
bound = 0.7
)";

template <typename Fn>
ParseError expect_parse_error(Fn&& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no ParseError";
  return ParseError(0, 0, "");
}

template <typename Fn>
ValidationError expect_validation_error(Fn&& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e;
  }
  ADD_FAILURE() << "no ValidationError";
  return ValidationError("", "");
}

std::string without_line(std::string text, const std::string& line) {
  const auto p = text.find(line);
  return text.erase(p, line.size() + 1);
}

}  // namespace

TEST(Scenario, ParsesMinimalBernoulli) {
  const Scenario s = parse_scenario(kBernoulli);
  EXPECT_EQ(s.name, "bernoulli");
  EXPECT_EQ(s.base_dim, 1);
  EXPECT_EQ(s.fiber1, 2);
  EXPECT_EQ(s.seed, 7u);
  EXPECT_EQ(s.word_cap, 10);
  ASSERT_EQ(s.points.size(), 2u);
  EXPECT_EQ(s.points[0].kind, PointSpec::Kind::kImaginary);
  EXPECT_EQ(s.points[0].T, 3.0);
  EXPECT_EQ(s.points[1].z, Scalar(0.5, 20.0));
  ASSERT_EQ(s.weights.size(), 1u);
  EXPECT_EQ(s.weights[0].tokens, std::vector<std::string>{"1"});

  const Instance inst = instantiate(s);
  const CMatrix x1 = inst.pair.model(1).element("x1");
  EXPECT_EQ(x1(0, 0), Scalar(1.0));
  EXPECT_EQ(x1(1, 1), Scalar(-1.0));
  EXPECT_FALSE(inst.weights[0].has_value());
  EXPECT_EQ(inst.points[0](0, 0), Scalar(0.0, 3.0));
}

TEST(Scenario, MissingSeedNamesTheField) {
  const auto e = expect_validation_error([] { parse_scenario(without_line(kBernoulli, "seed = 7")); });
  EXPECT_EQ(e.field(), "seed");
}

TEST(Scenario, ValidationPathsPointIntoSections) {
  std::string text = kBernoulli;
  text.replace(text.rfind("bernoulli"), 9, "gaussian");
  EXPECT_EQ(expect_validation_error([&] { parse_scenario(text); }).field(), "x2.preset");

  EXPECT_EQ(expect_validation_error([] {
              parse_scenario(without_line(kBernoulli, "[x1]\npreset = bernoulli\n"));
            }).field(),
            "x1");
  EXPECT_EQ(expect_validation_error([] {
              std::string t = kBernoulli;
              t.replace(t.find("iT 3"), 4, "iT -1");
              parse_scenario(t);
            }).field(),
            "point[0]");
}

TEST(Scenario, RejectsNonSelfAdjointMatrix) {
  std::string t = kMatrix;
  t.replace(t.find("0.5:-0.25"), 9, "0.5:0.25");
  EXPECT_EQ(expect_validation_error([&] { parse_scenario(t); }).field(), "x1.matrix");
}

TEST(Scenario, UnknownKeyReportsLineAndColumn) {
  std::string t = kBernoulli;
  t.insert(t.find("seed"), "  colour = red\n");
  const auto e = expect_parse_error([&] { parse_scenario(t); });
  EXPECT_EQ(e.line(), 5);
  EXPECT_EQ(e.column(), 3);
}

TEST(Scenario, BadNumberReportsValueColumn) {
  std::string t = kBernoulli;
  t.replace(t.find("seed = 7"), 8, "seed = 7x");
  const auto e = expect_parse_error([&] { parse_scenario(t); });
  EXPECT_EQ(e.line(), 5);
  EXPECT_EQ(e.column(), 8);
}

TEST(Scenario, DuplicateKeyIsAParseError) {
  const auto e = expect_parse_error([] { parse_scenario(std::string("seed = 1\n") + kBernoulli); });
  EXPECT_EQ(e.line(), 6);
}

TEST(Scenario, SerializationRoundTripsExactly) {
  for (const char* text : {kBernoulli, kMatrix}) {
    const Scenario s = parse_scenario(text);
    const std::string canonical = serialize_scenario(s);
    const Scenario back = parse_scenario(canonical);
    EXPECT_TRUE(back == s) << canonical;
    EXPECT_EQ(serialize_scenario(back), canonical);
  }
  const Scenario s = parse_scenario(kMatrix);
  EXPECT_EQ(s.x1.value(0, 1), Scalar(0.5, 0.25));
  EXPECT_EQ(s.points[1].value(1, 1), Scalar(-2.0, 25.0));
}

TEST(Scenario, InstantiationIsDeterministicInTheSeed) {
  const Scenario s = parse_scenario(kMatrix);
  const Instance a = instantiate(s);
  const Instance b = instantiate(s);
  EXPECT_EQ(a.pair.model(2).element("x2"), b.pair.model(2).element("x2"));
  EXPECT_EQ(a.pair.model(1).element("y1"), b.pair.model(1).element("y1"));
  EXPECT_EQ(a.points[0], b.points[0]);
  EXPECT_NEAR(spectral_norm(a.pair.model(2).element("x2")), 0.7, 1e-12);
  EXPECT_NEAR(spectral_norm(CMatrix(a.points[0] - Scalar(0.0, 40.0) * identity(2))), 0.25, 1e-12);
  EXPECT_EQ(a.options.transform.tol, 1e-12);
  EXPECT_EQ(a.pair.limits().word_cap, 13);

  Scenario t = s;
  t.seed = 12;
  EXPECT_NE(instantiate(t).pair.model(2).element("x2"), a.pair.model(2).element("x2"));

  // the stream layout is part of the format
  EXPECT_EQ(a.pair.model(2).element("x2"), CounterRng(11, 2).self_adjoint(4, 0.7));
}

TEST(Scenario, RAdditivityPointsSpanTheRequestedRange) {
  Scenario s = parse_scenario(kMatrix);
  const auto pts = r_additivity_points(s, 2.0);
  ASSERT_EQ(pts.size(), 20u);
  EXPECT_NEAR(2.0 * spectral_norm(pts.front()), 0.01, 1e-14);
  EXPECT_NEAR(2.0 * spectral_norm(pts.back()), 0.05, 1e-14);
  for (const auto& b : pts) EXPECT_NEAR(spectral_norm(inverse(b)) * spectral_norm(b), 1.0, 1e-10);
}
