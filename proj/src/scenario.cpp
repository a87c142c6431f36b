#include "fpsub/scenario.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fpsub/rng.hpp"

namespace fpsub {

namespace {

struct Token {
  std::string text;
  int column;  // 1-based
};

// Whitespace-separated tokens; ';' is always a token of its own.
std::vector<Token> tokenize(std::string_view s, int first_column) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    if (s[i] == ';') {
      out.push_back({";", first_column + int(i)});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != ';') ++j;
    out.push_back({std::string(s.substr(i, j - i)), first_column + int(i)});
    i = j;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(const Token& t, int line, const char* what) {
  T v{};
  const char* b = t.text.data();
  const char* e = b + t.text.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e)
    throw ParseError(line, t.column, std::string("expected ") + what + ", got '" + t.text + "'");
  return v;
}

Scalar parse_complex(const Token& t, int line) {
  const auto colon = t.text.find(':');
  if (colon == std::string::npos) return {parse_number<double>(t, line, "a number"), 0.0};
  Token re{t.text.substr(0, colon), t.column};
  Token im{t.text.substr(colon + 1), t.column + int(colon) + 1};
  return {parse_number<double>(re, line, "a real part"), parse_number<double>(im, line, "an imaginary part")};
}

// Rows separated by ';'; every row must have the same length.
CMatrix parse_matrix(const std::vector<Token>& toks, std::size_t from, int line, int value_column) {
  std::vector<std::vector<Scalar>> rows(1);
  for (std::size_t i = from; i < toks.size(); ++i) {
    if (toks[i].text == ";") {
      rows.emplace_back();
      continue;
    }
    rows.back().push_back(parse_complex(toks[i], line));
  }
  if (rows.back().empty()) throw ParseError(line, value_column, "empty matrix row");
  const std::size_t cols = rows[0].size();
  CMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw ParseError(line, value_column, "matrix rows differ in length");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

std::string fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string fmt(Scalar z) {
  if (z.imag() == 0.0) return fmt(z.real());
  return fmt(z.real()) + ":" + fmt(z.imag());
}

std::string fmt(const CMatrix& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r > 0) out += " ;";
    for (Eigen::Index c = 0; c < m.cols(); ++c) out += (r == 0 && c == 0 ? "" : " ") + fmt(m(r, c));
  }
  return out;
}

const std::set<std::string> kTopKeys{"name",          "base_dim",     "fiber_dims", "seed",
                                     "truncation_tol", "solver_tol",  "word_cap",   "partition_cap",
                                     "q_max",         "r_points",     "r_qmax",     "freeness_order",
                                     "y",             "point"};
const std::set<std::string> kSectionKeys{"preset", "generator", "bound", "rank", "shift", "value", "matrix"};
const std::set<std::string> kPresets{"bernoulli", "zero", "shifted_projection", "constant"};

struct SectionState {
  bool present = false;
  std::set<std::string> keys;
};

void parse_section_key(VariableSpec& v, SectionState& st, const std::string& key,
                       const std::vector<Token>& toks, int line, int value_column) {
  auto one = [&]() -> const Token& {
    if (toks.size() != 1) throw ParseError(line, value_column, "expected a single value for '" + key + "'");
    return toks[0];
  };
  if (key == "preset") {
    v.kind = VariableSpec::Kind::kPreset;
    v.preset = one().text;
  } else if (key == "generator") {
    v.kind = VariableSpec::Kind::kGenerator;
    v.preset = one().text;
  } else if (key == "bound") {
    v.bound = parse_number<double>(one(), line, "a number");
  } else if (key == "rank") {
    v.rank = parse_number<int>(one(), line, "an integer");
  } else if (key == "shift") {
    v.shift = parse_number<double>(one(), line, "a number");
  } else if (key == "value" || key == "matrix") {
    if (toks.empty()) throw ParseError(line, value_column, "empty matrix");
    if (key == "matrix") v.kind = VariableSpec::Kind::kMatrix;
    v.value = parse_matrix(toks, 0, line, value_column);
  }
  st.keys.insert(key);
}

PointSpec parse_point(const std::vector<Token>& toks, int line, int value_column) {
  if (toks.empty()) throw ParseError(line, value_column, "empty point");
  PointSpec p;
  const std::string& kind = toks[0].text;
  if (kind == "iT") {
    p.kind = PointSpec::Kind::kImaginary;
    if (toks.size() != 2 && toks.size() != 4)
      throw ParseError(line, toks[0].column, "expected 'iT <T>' or 'iT <T> perturb <eps>'");
    p.T = parse_number<double>(toks[1], line, "a number");
    if (toks.size() == 4) {
      if (toks[2].text != "perturb") throw ParseError(line, toks[2].column, "expected 'perturb'");
      p.perturb = parse_number<double>(toks[3], line, "a number");
    }
  } else if (kind == "scalar") {
    p.kind = PointSpec::Kind::kScalar;
    if (toks.size() != 2) throw ParseError(line, toks[0].column, "expected 'scalar <re:im>'");
    p.z = parse_complex(toks[1], line);
  } else if (kind == "matrix") {
    p.kind = PointSpec::Kind::kMatrix;
    if (toks.size() < 2) throw ParseError(line, toks[0].column, "expected matrix entries");
    p.value = parse_matrix(toks, 1, line, toks[1].column);
  } else {
    throw ParseError(line, toks[0].column, "unknown point kind '" + kind + "' (iT, scalar, matrix)");
  }
  return p;
}

void validate_variable(const VariableSpec& v, const SectionState& st, const std::string& path, int n,
                       int N) {
  if (!st.present) throw ValidationError(path, "section is missing");
  const int kinds = int(st.keys.count("preset") + st.keys.count("generator") + st.keys.count("matrix"));
  if (kinds != 1) throw ValidationError(path, "exactly one of preset, generator, matrix is required");
  auto only_with = [&](const char* key, bool ok) {
    if (st.keys.count(key) && !ok) throw ValidationError(path + "." + key, "not valid for this variable kind");
  };
  const bool gen = v.kind == VariableSpec::Kind::kGenerator;
  const bool proj = v.kind == VariableSpec::Kind::kPreset && v.preset == "shifted_projection";
  const bool cons = v.kind == VariableSpec::Kind::kPreset && v.preset == "constant";
  only_with("bound", gen);
  only_with("rank", proj);
  only_with("shift", proj);
  only_with("value", cons);
  if (gen) {
    if (v.preset != "random_selfadjoint")
      throw ValidationError(path + ".generator", "unknown generator '" + v.preset + "'");
    if (!(v.bound > 0.0)) throw ValidationError(path + ".bound", "must be positive");
  } else if (v.kind == VariableSpec::Kind::kPreset) {
    if (!kPresets.count(v.preset)) throw ValidationError(path + ".preset", "unknown preset '" + v.preset + "'");
    if (proj && v.rank && (*v.rank < 0 || *v.rank > N))
      throw ValidationError(path + ".rank", "must lie in [0, fiber dimension]");
    if (cons) {
      if (!st.keys.count("value")) throw ValidationError(path + ".value", "constant preset needs a value");
      if (v.value.rows() != n || v.value.cols() != n)
        throw ValidationError(path + ".value", "must be base_dim x base_dim");
      if (!is_self_adjoint(v.value, 1e-14 * std::max(1.0, v.value.cwiseAbs().maxCoeff())))
        throw ValidationError(path + ".value", "must be self-adjoint");
    }
  } else {
    if (v.value.rows() != n * N || v.value.cols() != n * N)
      throw ValidationError(path + ".matrix", "must be (base_dim * fiber) square");
    if (!is_self_adjoint(v.value, 1e-14 * std::max(1.0, v.value.cwiseAbs().maxCoeff())))
      throw ValidationError(path + ".matrix", "must be self-adjoint");
  }
}

void validate(const Scenario& s, const std::map<std::string, int>& seen, const SectionState& st1,
              const SectionState& st2) {
  for (const char* key : {"name", "base_dim", "fiber_dims", "seed"})
    if (!seen.count(key)) throw ValidationError(key, "required field is missing");
  if (s.name.empty()) throw ValidationError("name", "must not be empty");
  if (s.base_dim < 1 || s.base_dim > 8) throw ValidationError("base_dim", "must lie in [1, 8]");
  if (s.fiber1 < 1 || s.fiber2 < 1) throw ValidationError("fiber_dims", "must be positive");
  if (!(s.truncation_tol > 0.0)) throw ValidationError("truncation_tol", "must be positive");
  if (!(s.solver_tol > 0.0)) throw ValidationError("solver_tol", "must be positive");
  if (s.word_cap < 1 || s.word_cap > 20) throw ValidationError("word_cap", "must lie in [1, 20]");
  if (s.partition_cap < 1 || s.partition_cap > 20)
    throw ValidationError("partition_cap", "must lie in [1, 20]");
  if (!(s.q_max > 0.0 && s.q_max < 1.0)) throw ValidationError("q_max", "must lie in (0, 1)");
  if (s.r_points < 0) throw ValidationError("r_points", "must be non-negative");
  if (!(s.r_qmax > 0.0 && s.r_qmax <= s.q_max / 2)) throw ValidationError("r_qmax", "must lie in (0, q_max / 2]");
  if (s.freeness_order < 1 || s.freeness_order > 6)
    throw ValidationError("freeness_order", "must lie in [1, 6]");
  validate_variable(s.x1, st1, "x1", s.base_dim, s.fiber1);
  validate_variable(s.x2, st2, "x2", s.base_dim, s.fiber2);
  for (std::size_t k = 0; k < s.weights.size(); ++k) {
    const auto& t = s.weights[k].tokens;
    const std::string path = "y[" + std::to_string(k) + "]";
    if (t.size() == 1 && t[0] == "1") continue;
    for (const auto& tok : t)
      if (tok != "x1" && tok != "c") throw ValidationError(path, "tokens must be '1' alone, or x1 and c");
  }
  if (s.points.empty()) throw ValidationError("point", "at least one evaluation point is required");
  for (std::size_t k = 0; k < s.points.size(); ++k) {
    const PointSpec& p = s.points[k];
    const std::string path = "point[" + std::to_string(k) + "]";
    if (p.kind == PointSpec::Kind::kImaginary) {
      if (!(p.T > 0.0)) throw ValidationError(path, "T must be positive");
      if (!(p.perturb >= 0.0)) throw ValidationError(path, "perturbation must be non-negative");
    } else if (p.kind == PointSpec::Kind::kMatrix) {
      if (p.value.rows() != s.base_dim || p.value.cols() != s.base_dim)
        throw ValidationError(path, "must be base_dim x base_dim");
    }
  }
}

bool same_matrix(const CMatrix& a, const CMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

bool same_variable(const VariableSpec& a, const VariableSpec& b) {
  return a.kind == b.kind && a.preset == b.preset && a.bound == b.bound && a.rank == b.rank &&
         a.shift == b.shift && same_matrix(a.value, b.value);
}

bool same_point(const PointSpec& a, const PointSpec& b) {
  return a.kind == b.kind && a.T == b.T && a.perturb == b.perturb && a.z == b.z &&
         same_matrix(a.value, b.value);
}

std::string serialize_variable(const VariableSpec& v) {
  std::ostringstream out;
  switch (v.kind) {
    case VariableSpec::Kind::kPreset:
      out << "preset = " << v.preset << "\n";
      if (v.preset == "shifted_projection") {
        if (v.rank) out << "rank = " << *v.rank << "\n";
        out << "shift = " << fmt(v.shift) << "\n";
      }
      if (v.preset == "constant") out << "value = " << fmt(v.value) << "\n";
      break;
    case VariableSpec::Kind::kGenerator:
      out << "generator = " << v.preset << "\n" << "bound = " << fmt(v.bound) << "\n";
      break;
    case VariableSpec::Kind::kMatrix:
      out << "matrix = " << fmt(v.value) << "\n";
      break;
  }
  return out.str();
}

CMatrix build_variable(const VariableSpec& v, int n, int N, std::uint64_t seed, std::uint64_t stream) {
  const int d = n * N;
  if (v.kind == VariableSpec::Kind::kGenerator) return CounterRng(seed, stream).self_adjoint(d, v.bound);
  if (v.kind == VariableSpec::Kind::kMatrix) return v.value;
  CMatrix x = CMatrix::Zero(d, d);
  if (v.preset == "bernoulli") {
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < N; ++a) x(i * N + a, i * N + a) = a % 2 == 0 ? 1.0 : -1.0;
  } else if (v.preset == "shifted_projection") {
    const int rank = v.rank.value_or(N / 2);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < N; ++a) x(i * N + a, i * N + a) = (a < rank ? 1.0 : 0.0) - v.shift;
  } else if (v.preset == "constant") {
    MatrixModel m(BaseAlgebra::full(n), N);
    x = embed(v.value, m);
  }
  return x;
}

}  // namespace

bool operator==(const Scenario& a, const Scenario& b) {
  if (a.name != b.name || a.base_dim != b.base_dim || a.fiber1 != b.fiber1 || a.fiber2 != b.fiber2 ||
      a.seed != b.seed || a.truncation_tol != b.truncation_tol || a.solver_tol != b.solver_tol ||
      a.word_cap != b.word_cap || a.partition_cap != b.partition_cap || a.q_max != b.q_max ||
      a.r_points != b.r_points || a.r_qmax != b.r_qmax || a.freeness_order != b.freeness_order)
    return false;
  if (!same_variable(a.x1, b.x1) || !same_variable(a.x2, b.x2)) return false;
  if (a.weights.size() != b.weights.size() || a.points.size() != b.points.size()) return false;
  for (std::size_t k = 0; k < a.weights.size(); ++k)
    if (a.weights[k].tokens != b.weights[k].tokens) return false;
  for (std::size_t k = 0; k < a.points.size(); ++k)
    if (!same_point(a.points[k], b.points[k])) return false;
  return true;
}

Scenario parse_scenario(std::string_view text) {
  Scenario s;
  std::map<std::string, int> seen;  // top-level key -> line
  SectionState st1, st2;
  VariableSpec* section = nullptr;
  SectionState* state = nullptr;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    const std::string_view body = trim(raw);
    if (body.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const int body_column = int(body.data() - raw.data()) + 1;

    if (body.front() == '[') {
      if (body.back() != ']') throw ParseError(line_no, body_column, "section header must end with ']'");
      const std::string name(trim(body.substr(1, body.size() - 2)));
      if (name == "x1") {
        section = &s.x1;
        state = &st1;
      } else if (name == "x2") {
        section = &s.x2;
        state = &st2;
      } else {
        throw ParseError(line_no, body_column + 1, "unknown section '" + name + "' (x1, x2)");
      }
      if (state->present) throw ParseError(line_no, body_column, "duplicate section [" + name + "]");
      state->present = true;
      if (end == text.size()) break;
      continue;
    }

    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, body_column, "expected 'key = value'");
    const std::string key(trim(body.substr(0, eq)));
    const std::string_view value_raw = body.substr(eq + 1);
    const std::string_view value = trim(value_raw);
    const int value_column =
        body_column + int(eq) + 1 + int(value.empty() ? 0 : value.data() - value_raw.data());
    const std::vector<Token> toks = tokenize(value, value_column);

    if (section) {
      if (!kSectionKeys.count(key))
        throw ParseError(line_no, body_column, "unknown key '" + key + "' in variable section");
      if (state->keys.count(key)) throw ParseError(line_no, body_column, "duplicate key '" + key + "'");
      parse_section_key(*section, *state, key, toks, line_no, value_column);
      if (end == text.size()) break;
      continue;
    }

    if (!kTopKeys.count(key)) throw ParseError(line_no, body_column, "unknown key '" + key + "'");
    if (key != "y" && key != "point") {
      if (seen.count(key)) throw ParseError(line_no, body_column, "duplicate key '" + key + "'");
      seen[key] = line_no;
    }
    auto one = [&]() -> const Token& {
      if (toks.size() != 1) throw ParseError(line_no, value_column, "expected a single value for '" + key + "'");
      return toks[0];
    };
    if (key == "name") {
      s.name = std::string(value);
    } else if (key == "base_dim") {
      s.base_dim = parse_number<int>(one(), line_no, "an integer");
    } else if (key == "fiber_dims") {
      if (toks.size() != 2) throw ParseError(line_no, value_column, "expected two fiber dimensions");
      s.fiber1 = parse_number<int>(toks[0], line_no, "an integer");
      s.fiber2 = parse_number<int>(toks[1], line_no, "an integer");
    } else if (key == "seed") {
      s.seed = parse_number<std::uint64_t>(one(), line_no, "an unsigned integer");
    } else if (key == "truncation_tol") {
      s.truncation_tol = parse_number<double>(one(), line_no, "a number");
    } else if (key == "solver_tol") {
      s.solver_tol = parse_number<double>(one(), line_no, "a number");
    } else if (key == "word_cap") {
      s.word_cap = parse_number<int>(one(), line_no, "an integer");
    } else if (key == "partition_cap") {
      s.partition_cap = parse_number<int>(one(), line_no, "an integer");
    } else if (key == "q_max") {
      s.q_max = parse_number<double>(one(), line_no, "a number");
    } else if (key == "r_points") {
      s.r_points = parse_number<int>(one(), line_no, "an integer");
    } else if (key == "r_qmax") {
      s.r_qmax = parse_number<double>(one(), line_no, "a number");
    } else if (key == "freeness_order") {
      s.freeness_order = parse_number<int>(one(), line_no, "an integer");
    } else if (key == "y") {
      if (toks.empty()) throw ParseError(line_no, value_column, "empty weight");
      WeightSpec w;
      for (const auto& t : toks) w.tokens.push_back(t.text);
      s.weights.push_back(std::move(w));
    } else if (key == "point") {
      s.points.push_back(parse_point(toks, line_no, value_column));
    }
    if (end == text.size()) break;
  }
  if (s.weights.empty()) s.weights.push_back(WeightSpec{{"1"}});
  validate(s, seen, st1, st2);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

PointSpec parse_point_spec(std::string_view text) {
  return parse_point(tokenize(text, 1), 1, 1);
}

std::string describe(const PointSpec& p) {
  switch (p.kind) {
    case PointSpec::Kind::kImaginary:
      return "iT " + fmt(p.T) + (p.perturb > 0.0 ? " perturb " + fmt(p.perturb) : "");
    case PointSpec::Kind::kScalar:
      return "scalar " + fmt(p.z);
    case PointSpec::Kind::kMatrix:
      return "matrix " + fmt(p.value);
  }
  return "";
}

std::string describe(const WeightSpec& w) {
  std::string out;
  for (const auto& t : w.tokens) out += (out.empty() ? "" : " ") + t;
  return out;
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "name = " << s.name << "\n";
  out << "base_dim = " << s.base_dim << "\n";
  out << "fiber_dims = " << s.fiber1 << " " << s.fiber2 << "\n";
  if (s.seed) out << "seed = " << *s.seed << "\n";
  out << "truncation_tol = " << fmt(s.truncation_tol) << "\n";
  out << "solver_tol = " << fmt(s.solver_tol) << "\n";
  out << "word_cap = " << s.word_cap << "\n";
  out << "partition_cap = " << s.partition_cap << "\n";
  out << "q_max = " << fmt(s.q_max) << "\n";
  out << "r_points = " << s.r_points << "\n";
  out << "r_qmax = " << fmt(s.r_qmax) << "\n";
  out << "freeness_order = " << s.freeness_order << "\n";
  for (const auto& w : s.weights) out << "y = " << describe(w) << "\n";
  for (const auto& p : s.points) out << "point = " << describe(p) << "\n";
  out << "\n[x1]\n" << serialize_variable(s.x1);
  out << "\n[x2]\n" << serialize_variable(s.x2);
  return out.str();
}

Instance instantiate(const Scenario& s) {
  if (!s.seed) throw ValidationError("seed", "required field is missing");
  const std::uint64_t seed = *s.seed;
  const int n = s.base_dim;
  const BaseAlgebra base = BaseAlgebra::full(n);
  MatrixModel m1(base, s.fiber1, {{"x1", build_variable(s.x1, n, s.fiber1, seed, 1)}});
  MatrixModel m2(base, s.fiber2, {{"x2", build_variable(s.x2, n, s.fiber2, seed, 2)}});

  std::vector<std::optional<std::string>> weights;
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < s.weights.size(); ++k) {
    const auto& w = s.weights[k];
    labels.push_back(describe(w));
    if (w.tokens.size() == 1 && w.tokens[0] == "1") {
      weights.push_back(std::nullopt);
      continue;
    }
    CounterRng rng(seed, 200 + k);
    CMatrix y = identity(m1.ambient_dim());
    for (const auto& t : w.tokens)
      y = t == "x1" ? CMatrix(y * m1.element("x1")) : CMatrix(y * embed(rng.scaled(n, 1.0), m1));
    const std::string name = "y" + std::to_string(k);
    m1 = m1.with_element(name, y);
    weights.push_back(name);
  }

  std::vector<CMatrix> points;
  std::vector<std::string> point_labels;
  for (std::size_t k = 0; k < s.points.size(); ++k) {
    const PointSpec& p = s.points[k];
    point_labels.push_back(describe(p));
    switch (p.kind) {
      case PointSpec::Kind::kImaginary: {
        CMatrix b = Scalar(0.0, p.T) * identity(n);
        if (p.perturb > 0.0) b += CounterRng(seed, 100 + k).scaled(n, p.perturb);
        points.push_back(b);
        break;
      }
      case PointSpec::Kind::kScalar:
        points.push_back(p.z * identity(n));
        break;
      case PointSpec::Kind::kMatrix:
        points.push_back(p.value);
        break;
    }
  }

  EvalLimits limits;
  limits.word_cap = s.word_cap;
  limits.partition_cap = s.partition_cap;
  SubordinationOptions opts;
  opts.transform.q_max = s.q_max;
  opts.transform.tol = s.truncation_tol;
  opts.transform.solver_tol = s.solver_tol;
  opts.tol = s.solver_tol;
  return Instance{FreePair(std::move(m1), std::move(m2), limits), std::move(weights), std::move(labels),
                  std::move(points), std::move(point_labels), opts};
}

std::vector<CMatrix> r_additivity_points(const Scenario& s, double rho) {
  std::vector<CMatrix> out;
  CounterRng rng(s.seed.value_or(0), 300);
  const int n = s.base_dim;
  for (int k = 0; k < s.r_points; ++k) {
    const double frac = s.r_points == 1 ? 1.0 : double(k) / (s.r_points - 1);
    const double q = s.r_qmax * (0.2 + 0.8 * frac);
    // unitary direction keeps |b^{-1}| = 1 / |b|
    Eigen::HouseholderQR<CMatrix> qr(rng.gaussian_matrix(n, n));
    CMatrix u = qr.householderQ() * identity(n);
    out.push_back(u * (rho > 0.0 ? q / rho : q));
  }
  return out;
}

}  // namespace fpsub
