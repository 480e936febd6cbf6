#pragma once

// Experiment configs for the command-line runner. Every config parses from a
// JSON object with unknown keys rejected, and dumps back to a JSON object that
// re-parses to an equivalent config.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "eigcount/io.hpp"
#include "eigcount/verify.hpp"

namespace eigcount::cli {

/// Line number (1-based) of every JSON pointer in a document: object members
/// map to the line of their key, array elements to the line of their first
/// character. Malformed input yields a partial map.
inline std::map<std::string, int> pointer_lines(const std::string& text) {
  struct Frame {
    bool object;
    std::string ptr;
    std::size_t index = 0;
  };
  std::map<std::string, int> lines;
  std::vector<Frame> stack;
  int line = 1;
  std::size_t i = 0;
  bool expect_key = false;
  std::string pending;  // pointer of the value about to start

  auto skip_string = [&](std::string* out) {
    ++i;  // opening quote
    while (i < text.size() && text[i] != '"') {
      if (text[i] == '\\' && i + 1 < text.size()) {
        if (out) out->push_back(text[i + 1]);
        i += 2;
        continue;
      }
      if (text[i] == '\n') ++line;
      if (out) out->push_back(text[i]);
      ++i;
    }
    ++i;  // closing quote
  };
  lines[""] = 1;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == ':') {
      ++i;
      continue;
    }
    if (!stack.empty() && !stack.back().object && pending.empty() && c != ']' && c != ',') {
      pending = stack.back().ptr + "/" + std::to_string(stack.back().index);
      lines.emplace(pending, line);
    }
    if (c == '"' && expect_key) {
      std::string key;
      skip_string(&key);
      pending = stack.back().ptr + "/" + key;
      lines.emplace(pending, line);
      expect_key = false;
      continue;
    }
    if (c == '{' || c == '[') {
      stack.push_back({c == '{', pending, 0});
      pending.clear();
      expect_key = c == '{';
      ++i;
      continue;
    }
    if (c == '}' || c == ']') {
      if (!stack.empty()) stack.pop_back();
      pending.clear();
      expect_key = false;
      ++i;
      continue;
    }
    if (c == ',') {
      if (!stack.empty()) {
        ++stack.back().index;
        expect_key = stack.back().object;
      }
      pending.clear();
      ++i;
      continue;
    }
    if (c == '"') {
      skip_string(nullptr);
      pending.clear();
      continue;
    }
    while (i < text.size() && text[i] != ',' && text[i] != '}' && text[i] != ']' && text[i] != '\n')
      ++i;
    pending.clear();
  }
  return lines;
}

/// Config-level failure: exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Document {
  json value;
  std::string source;  // file name or "<inline>"
  std::map<std::string, int> lines;
  std::filesystem::path base_dir;

  /// "file:line: message" for a schema error at `pointer`.
  std::string locate(const std::string& pointer, const std::string& what) const {
    std::string p = pointer;
    for (;;) {
      auto it = lines.find(p);
      if (it != lines.end()) return source + ":" + std::to_string(it->second) + ": " + what;
      if (p.empty()) break;
      p = p.substr(0, p.rfind('/'));
    }
    return source + ": " + what;
  }
};

inline Document parse_document(const std::string& text, const std::string& source,
                               std::filesystem::path base_dir = {}) {
  Document d;
  d.source = source;
  d.base_dir = std::move(base_dir);
  try {
    d.value = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1;
    for (std::size_t k = 0; k < std::min<std::size_t>(e.byte, text.size()) && k + 1 < e.byte; ++k)
      line += text[k] == '\n' ? 1 : 0;
    throw ConfigError(source + ":" + std::to_string(line) + ": invalid JSON: " + e.what());
  }
  d.lines = pointer_lines(text);
  return d;
}

inline std::string read_file(const std::filesystem::path& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + what + " '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Document load_document(const std::filesystem::path& path) {
  return parse_document(read_file(path, "config"), path.string(), path.parent_path());
}

/// Matrix given inline ("matrix": {...}) or by file ("matrix_file": path).
struct MatrixSource {
  std::optional<std::string> file;
  HermitianMatrix value = HermitianMatrix::zero(1);
};

/// Model given inline ("model": {...}) or by file ("model_file": path).
struct ModelSource {
  std::optional<std::string> file;
  ModelSpec value;
};

struct CountConfig {
  MatrixSource matrix;
  double energy = 0.0;
  std::vector<double> eps;
  std::vector<int> m{1};
  std::optional<std::string> out;
};

struct WitnessConfig {
  MatrixSource matrix;
  double eps = 0.0;
  int m = 1;
  std::optional<double> k;  // default C_m / N
  std::optional<int> block;
  std::optional<std::string> out;
};

struct ReduceConfig {
  MatrixSource b1;
  MatrixSource b2;
  std::vector<double> eps;
  std::optional<std::string> out;
};

struct WegnerConfig {
  ModelSource model;
  std::vector<double> eps;
  std::vector<int> m{1};
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  double alpha = 1.0;
  std::optional<std::string> out;
  std::optional<std::string> summary;
};

struct DetEventConfig {
  ModelSource model;
  int a = 3;
  std::vector<double> delta;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  double regularity_k = 1.0;
  double alpha = 1.0;
  std::optional<std::string> out;
  std::optional<std::string> summary;
};

struct VerifyConfig {
  std::vector<std::string> suites = suite_names();
  std::uint64_t seed = 1;
  std::uint64_t instances = 200;
  std::map<std::string, double> tolerances;
};

namespace detail {

inline std::string ptr_of(std::string_view key) { return "/" + std::string(key); }

inline std::vector<double> positive_list(const json& j, std::string_view key, bool allow_scalar = true) {
  const std::string p = ptr_of(key);
  std::vector<double> v;
  if (allow_scalar && j.is_number())
    v.push_back(io::get_number(j, p));
  else
    v = io::get_number_list(j, p);
  if (v.empty()) io::fail(p, "list must not be empty");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) io::fail(io::child(p, i), std::string(key) + " must be a finite number > 0");
  return v;
}

inline std::vector<int> m_list(const json& j) {
  std::vector<int> v;
  if (j.is_number_integer()) {
    v.push_back(static_cast<int>(io::get_int(j, "/m")));
  } else {
    if (!j.is_array() || j.empty()) io::fail("/m", "expected a positive integer or a nonempty list");
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(static_cast<int>(io::get_int(j[i], io::child("/m", i))));
  }
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] < 1) io::fail(j.is_array() ? io::child("/m", i) : "/m", "m must be >= 1");
  return v;
}

inline std::filesystem::path resolve(const Document& doc, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || doc.base_dir.empty() ? path : doc.base_dir / path;
}

inline MatrixSource matrix_source(const Document& doc, std::string_view inline_key, std::string_view file_key) {
  const json& j = doc.value;
  const bool has_inline = j.contains(std::string(inline_key));
  const bool has_file = j.contains(std::string(file_key));
  if (has_inline == has_file)
    io::fail(ptr_of(inline_key), "exactly one of '" + std::string(inline_key) + "' and '" +
                                      std::string(file_key) + "' is required");
  MatrixSource s;
  if (has_inline) {
    s.value = matrix_from_json(j[std::string(inline_key)], ptr_of(inline_key));
    return s;
  }
  s.file = io::get_string(j[std::string(file_key)], ptr_of(file_key));
  const auto path = resolve(doc, *s.file);
  const auto sub = parse_document(read_file(path, "matrix file"), path.string());
  try {
    s.value = matrix_from_json(sub.value);
  } catch (const SchemaError& e) {
    throw ConfigError(sub.locate(e.pointer(), e.what()));
  }
  return s;
}

inline ModelSource model_source(const Document& doc) {
  const json& j = doc.value;
  const bool has_inline = j.contains("model");
  const bool has_file = j.contains("model_file");
  if (has_inline == has_file) io::fail("/model", "exactly one of 'model' and 'model_file' is required");
  ModelSource s;
  if (has_inline) {
    s.value = model_from_json(j["model"], "/model");
    return s;
  }
  s.file = io::get_string(j["model_file"], "/model_file");
  const auto path = resolve(doc, *s.file);
  const auto sub = parse_document(read_file(path, "model file"), path.string());
  try {
    s.value = model_from_json(sub.value);
  } catch (const SchemaError& e) {
    throw ConfigError(sub.locate(e.pointer(), e.what()));
  }
  return s;
}

inline void dump_matrix(json& out, const MatrixSource& s, std::string_view inline_key, std::string_view file_key) {
  if (s.file)
    out[std::string(file_key)] = *s.file;
  else
    out[std::string(inline_key)] = matrix_to_json(s.value);
}

inline void dump_model(json& out, const ModelSource& s) {
  if (s.file)
    out["model_file"] = *s.file;
  else
    out["model"] = model_to_json(s.value);
}

inline std::optional<std::string> opt_string(const json& j, std::string_view key) {
  if (!j.contains(std::string(key))) return std::nullopt;
  return io::get_string(j[std::string(key)], ptr_of(key));
}

inline std::uint64_t positive_uint(const json& j, std::string_view key) {
  const auto v = io::get_uint(j[std::string(key)], ptr_of(key));
  if (v < 1) io::fail(ptr_of(key), std::string(key) + " must be >= 1");
  return v;
}

}  // namespace detail

// Each parse_* throws SchemaError with a JSON pointer; callers map it to a line.

inline CountConfig parse_count(const Document& doc) {
  const json& j = doc.value;
  io::check_keys(j, "", {"matrix", "matrix_file", "energy", "eps", "m", "out"});
  CountConfig c;
  c.matrix = detail::matrix_source(doc, "matrix", "matrix_file");
  if (j.contains("energy")) c.energy = io::get_number(j["energy"], "/energy");
  c.eps = detail::positive_list(io::field(j, "", "eps"), "eps");
  if (j.contains("m")) c.m = detail::m_list(j["m"]);
  c.out = detail::opt_string(j, "out");
  return c;
}

inline json dump(const CountConfig& c) {
  json j;
  detail::dump_matrix(j, c.matrix, "matrix", "matrix_file");
  j["energy"] = c.energy;
  j["eps"] = c.eps;
  j["m"] = c.m;
  if (c.out) j["out"] = *c.out;
  return j;
}

inline WitnessConfig parse_witness(const Document& doc) {
  const json& j = doc.value;
  io::check_keys(j, "", {"matrix", "matrix_file", "eps", "m", "K", "block", "out"});
  WitnessConfig c;
  c.matrix = detail::matrix_source(doc, "matrix", "matrix_file");
  c.eps = io::get_number(io::field(j, "", "eps"), "/eps");
  if (!(c.eps > 0.0) || !std::isfinite(c.eps)) io::fail("/eps", "eps must be a finite number > 0");
  c.m = static_cast<int>(io::get_int(io::field(j, "", "m"), "/m"));
  if (c.m < 1 || static_cast<std::size_t>(c.m) > c.matrix.value.dim()) io::fail("/m", "m must satisfy 1 <= m <= N");
  if (j.contains("K")) {
    c.k = io::get_number(j["K"], "/K");
    if (!(*c.k > 0.0)) io::fail("/K", "K must be > 0");
  }
  if (j.contains("block")) {
    c.block = static_cast<int>(io::get_int(j["block"], "/block"));
    if (*c.block < 1) io::fail("/block", "block must be >= 1");
  }
  c.out = detail::opt_string(j, "out");
  return c;
}

inline json dump(const WitnessConfig& c) {
  json j;
  detail::dump_matrix(j, c.matrix, "matrix", "matrix_file");
  j["eps"] = c.eps;
  j["m"] = c.m;
  if (c.k) j["K"] = *c.k;
  if (c.block) j["block"] = *c.block;
  if (c.out) j["out"] = *c.out;
  return j;
}

inline ReduceConfig parse_reduce(const Document& doc) {
  const json& j = doc.value;
  io::check_keys(j, "", {"b1", "b1_file", "b2", "b2_file", "eps", "out"});
  ReduceConfig c;
  c.b1 = detail::matrix_source(doc, "b1", "b1_file");
  c.b2 = detail::matrix_source(doc, "b2", "b2_file");
  if (c.b1.value.dim() != c.b2.value.dim()) io::fail("/b2", "B1 and B2 must have equal dimension");
  c.eps = detail::positive_list(io::field(j, "", "eps"), "eps");
  for (std::size_t i = 0; i < c.eps.size(); ++i)
    if (!(c.eps[i] < kReductionEps0)) io::fail(io::child("/eps", i), "eps must be < 1/2");
  c.out = detail::opt_string(j, "out");
  return c;
}

inline json dump(const ReduceConfig& c) {
  json j;
  detail::dump_matrix(j, c.b1, "b1", "b1_file");
  detail::dump_matrix(j, c.b2, "b2", "b2_file");
  j["eps"] = c.eps;
  if (c.out) j["out"] = *c.out;
  return j;
}

inline WegnerConfig parse_wegner(const Document& doc) {
  const json& j = doc.value;
  io::check_keys(j, "", {"model", "model_file", "eps", "m", "trials", "seed", "alpha", "out", "summary"});
  WegnerConfig c;
  c.model = detail::model_source(doc);
  c.eps = detail::positive_list(io::field(j, "", "eps"), "eps");
  if (j.contains("m")) c.m = detail::m_list(j["m"]);
  if (j.contains("trials")) c.trials = detail::positive_uint(j, "trials");
  if (j.contains("seed")) c.seed = io::get_uint(j["seed"], "/seed");
  if (j.contains("alpha")) {
    c.alpha = io::get_number(j["alpha"], "/alpha");
    if (!(c.alpha > 0.0)) io::fail("/alpha", "alpha must be > 0");
  }
  c.out = detail::opt_string(j, "out");
  c.summary = detail::opt_string(j, "summary");
  return c;
}

inline json dump(const WegnerConfig& c) {
  json j;
  detail::dump_model(j, c.model);
  j["eps"] = c.eps;
  j["m"] = c.m;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["alpha"] = c.alpha;
  if (c.out) j["out"] = *c.out;
  if (c.summary) j["summary"] = *c.summary;
  return j;
}

inline DetEventConfig parse_det_event(const Document& doc) {
  const json& j = doc.value;
  io::check_keys(j, "", {"model", "model_file", "a", "delta", "trials", "seed", "regularity_K", "alpha", "out",
                         "summary"});
  DetEventConfig c;
  c.model = detail::model_source(doc);
  c.a = static_cast<int>(io::get_int(io::field(j, "", "a"), "/a"));
  if (std::abs(c.a) < 3) io::fail("/a", "|a| must be >= 3");
  c.delta = detail::positive_list(io::field(j, "", "delta"), "delta");
  if (j.contains("trials")) c.trials = detail::positive_uint(j, "trials");
  if (j.contains("seed")) c.seed = io::get_uint(j["seed"], "/seed");
  if (j.contains("regularity_K")) {
    c.regularity_k = io::get_number(j["regularity_K"], "/regularity_K");
    if (!(c.regularity_k > 0.0)) io::fail("/regularity_K", "regularity_K must be > 0");
  }
  if (j.contains("alpha")) {
    c.alpha = io::get_number(j["alpha"], "/alpha");
    if (!(c.alpha > 0.0)) io::fail("/alpha", "alpha must be > 0");
  }
  c.out = detail::opt_string(j, "out");
  c.summary = detail::opt_string(j, "summary");
  return c;
}

inline json dump(const DetEventConfig& c) {
  json j;
  detail::dump_model(j, c.model);
  j["a"] = c.a;
  j["delta"] = c.delta;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["regularity_K"] = c.regularity_k;
  j["alpha"] = c.alpha;
  if (c.out) j["out"] = *c.out;
  if (c.summary) j["summary"] = *c.summary;
  return j;
}

inline void check_suite_name(const std::string& s, const std::string& ptr) {
  for (const auto& n : suite_names())
    if (n == s) return;
  io::fail(ptr, "unknown suite '" + s + "' (expected core, witness, reduction, models or mc)");
}

inline VerifyConfig parse_verify(const Document& doc) {
  const json& j = doc.value;
  io::check_keys(j, "", {"suites", "seed", "instances", "tolerances"});
  VerifyConfig c;
  if (j.contains("suites")) {
    const json& s = j["suites"];
    if (!s.is_array() || s.empty()) io::fail("/suites", "expected a nonempty list of suite names");
    c.suites.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      c.suites.push_back(io::get_string(s[i], io::child("/suites", i)));
      check_suite_name(c.suites.back(), io::child("/suites", i));
    }
  }
  if (j.contains("seed")) c.seed = io::get_uint(j["seed"], "/seed");
  if (j.contains("instances")) c.instances = detail::positive_uint(j, "instances");
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    io::expect_object(t, "/tolerances");
    for (auto it = t.begin(); it != t.end(); ++it) {
      const std::string p = io::child("/tolerances", it.key());
      if (!default_tolerances().contains(it.key())) io::fail(p, "unknown tolerance '" + it.key() + "'");
      c.tolerances[it.key()] = io::get_number(it.value(), p);
    }
  }
  return c;
}

inline json dump(const VerifyConfig& c) {
  json j;
  j["suites"] = c.suites;
  j["seed"] = c.seed;
  j["instances"] = c.instances;
  j["tolerances"] = json::object();
  for (const auto& [k, v] : c.tolerances) j["tolerances"][k] = v;
  return j;
}

}  // namespace eigcount::cli
