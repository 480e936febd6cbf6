#pragma once

// JSON and CSV serialization.
//
// Matrix documents: {"dim": N, "re": [[...]], "im": [[...]]}, row-major, with
// "im" optional on input; loaded matrices are symmetrized. Readers are strict:
// unknown keys and wrongly typed fields raise SchemaError carrying a JSON
// pointer to the offending field.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "eigcount/matrix.hpp"
#include "eigcount/models.hpp"
#include "eigcount/wegner.hpp"
#include "eigcount/witness.hpp"

namespace eigcount {

using json = nlohmann::json;

class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string pointer, const std::string& what)
      : std::runtime_error(what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

namespace io {

inline std::string child(const std::string& ptr, std::string_view key) {
  return ptr + "/" + std::string(key);
}
inline std::string child(const std::string& ptr, std::size_t idx) {
  return ptr + "/" + std::to_string(idx);
}

[[noreturn]] inline void fail(const std::string& ptr, const std::string& what) {
  throw SchemaError(ptr, (ptr.empty() ? std::string("<root>") : ptr) + ": " + what);
}

inline void expect_object(const json& j, const std::string& ptr) {
  if (!j.is_object()) fail(ptr, "expected an object");
}

inline void check_keys(const json& j, const std::string& ptr,
                       std::initializer_list<std::string_view> allowed) {
  expect_object(j, ptr);
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || it.key() == a;
    if (!ok) fail(child(ptr, it.key()), "unknown key '" + it.key() + "'");
  }
}

inline const json& field(const json& j, const std::string& ptr, std::string_view key) {
  auto it = j.find(std::string(key));
  if (it == j.end()) fail(child(ptr, key), "missing required field");
  return *it;
}

inline double get_number(const json& j, const std::string& ptr) {
  if (!j.is_number()) fail(ptr, "expected a number");
  return j.get<double>();
}

inline std::uint64_t get_uint(const json& j, const std::string& ptr) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
  fail(ptr, "expected a nonnegative integer");
}

inline std::int64_t get_int(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) fail(ptr, "expected an integer");
  return j.get<std::int64_t>();
}

inline bool get_bool(const json& j, const std::string& ptr) {
  if (!j.is_boolean()) fail(ptr, "expected true or false");
  return j.get<bool>();
}

inline std::string get_string(const json& j, const std::string& ptr) {
  if (!j.is_string()) fail(ptr, "expected a string");
  return j.get<std::string>();
}

inline std::vector<double> get_number_list(const json& j, const std::string& ptr) {
  if (!j.is_array()) fail(ptr, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], child(ptr, i)));
  return out;
}

inline std::vector<std::size_t> get_index_list(const json& j, const std::string& ptr) {
  if (!j.is_array()) fail(ptr, "expected an array of indices");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(static_cast<std::size_t>(get_uint(j[i], child(ptr, i))));
  return out;
}

/// Shortest round-trip decimal form, as used in CSV output.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return json(x).dump();
}

}  // namespace io

inline json matrix_to_json(const CMatrix& m) {
  json re = json::array(), im = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json r = json::array(), c = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      r.push_back(m(i, j).real());
      c.push_back(m(i, j).imag());
    }
    re.push_back(std::move(r));
    im.push_back(std::move(c));
  }
  return json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline json matrix_to_json(const HermitianMatrix& m) { return matrix_to_json(m.matrix()); }

inline HermitianMatrix matrix_from_json(const json& j, const std::string& ptr = "") {
  io::check_keys(j, ptr, {"dim", "re", "im"});
  const std::uint64_t n = io::get_uint(io::field(j, ptr, "dim"), io::child(ptr, "dim"));
  if (n < 1) io::fail(io::child(ptr, "dim"), "dim must be >= 1");
  CMatrix m(n, n);
  auto read_part = [&](std::string_view key, bool imag) {
    const std::string p = io::child(ptr, key);
    const json& rows = io::field(j, ptr, key);
    if (!rows.is_array() || rows.size() != n) io::fail(p, "expected " + std::to_string(n) + " rows");
    for (std::size_t r = 0; r < n; ++r) {
      const auto vals = io::get_number_list(rows[r], io::child(p, r));
      if (vals.size() != n) io::fail(io::child(p, r), "expected " + std::to_string(n) + " entries");
      for (std::size_t c = 0; c < n; ++c) {
        if (!std::isfinite(vals[c])) io::fail(io::child(io::child(p, r), c), "entry is not finite");
        if (imag)
          m(r, c).imag(vals[c]);
        else
          m(r, c).real(vals[c]);
      }
    }
  };
  read_part("re", false);
  if (j.contains("im")) read_part("im", true);
  return HermitianMatrix(m);
}

inline json index_set_to_json(const IndexSet& s) { return json(s.members()); }

inline json certificate_to_json(const WitnessCertificate& c) {
  return json{{"alpha", index_set_to_json(c.alpha)}, {"beta", index_set_to_json(c.beta)},
              {"m", c.m},
              {"eps", c.eps},
              {"K", c.k},
              {"margin", c.margin}};
}

inline std::string_view family_name(ModelFamily f) {
  switch (f) {
    case ModelFamily::Anderson: return "anderson";
    case ModelFamily::RandomBlock: return "random_block";
    case ModelFamily::BdG: return "bdg";
  }
  return "?";
}

inline std::string_view distribution_name(DistributionKind k) {
  switch (k) {
    case DistributionKind::UniformInterval: return "uniform_interval";
    case DistributionKind::UniformDisc: return "uniform_disc";
    case DistributionKind::Custom: return "custom";
  }
  return "?";
}

inline json graph_to_json(const GraphSpec& g) {
  json edges = json::array();
  for (auto [u, v] : g.edges) edges.push_back(json::array({u, v}));
  return json{{"vertices", g.vertices}, {"edges", std::move(edges)}, {"max_degree", g.max_degree}};
}

/// Accepts {"vertices", "edges", "max_degree"?}, {"path": n} or {"grid": [lx, ly]}.
inline GraphSpec graph_from_json(const json& j, const std::string& ptr) {
  io::check_keys(j, ptr, {"vertices", "edges", "max_degree", "path", "grid"});
  try {
    if (j.contains("path")) {
      if (j.size() != 1) io::fail(ptr, "'path' excludes other graph keys");
      const auto n = io::get_uint(j["path"], io::child(ptr, "path"));
      if (n < 1) io::fail(io::child(ptr, "path"), "path needs at least one vertex");
      return path_graph(n);
    }
    if (j.contains("grid")) {
      if (j.size() != 1) io::fail(ptr, "'grid' excludes other graph keys");
      const std::string p = io::child(ptr, "grid");
      const auto dims = io::get_index_list(j["grid"], p);
      if (dims.size() != 2 || dims[0] < 1 || dims[1] < 1) io::fail(p, "expected [lx, ly] with lx, ly >= 1");
      return grid_graph(dims[0], dims[1]);
    }
    const auto n = io::get_uint(io::field(j, ptr, "vertices"), io::child(ptr, "vertices"));
    const std::string ep = io::child(ptr, "edges");
    const json& ej = io::field(j, ptr, "edges");
    if (!ej.is_array()) io::fail(ep, "expected an array of [u, v] pairs");
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < ej.size(); ++i) {
      const auto uv = io::get_index_list(ej[i], io::child(ep, i));
      if (uv.size() != 2) io::fail(io::child(ep, i), "edge must be a pair");
      edges.emplace_back(uv[0], uv[1]);
    }
    GraphSpec g = make_graph(n, std::move(edges));
    if (j.contains("max_degree")) {
      g.max_degree = io::get_uint(j["max_degree"], io::child(ptr, "max_degree"));
      g.validate();
    }
    return g;
  } catch (const Error& e) {
    io::fail(ptr, e.what());
  }
}

inline json distribution_to_json(const SiteDistribution& d) {
  json j{{"kind", distribution_name(d.kind)},
         {"support_bound", d.support_bound},
         {"regularity_alpha", d.regularity_alpha}};
  if (d.kind == DistributionKind::Custom) j["density"] = d.density;
  return j;
}

inline SiteDistribution distribution_from_json(const json& j, const std::string& ptr) {
  io::check_keys(j, ptr, {"kind", "support_bound", "regularity_alpha", "density"});
  const std::string kind = io::get_string(io::field(j, ptr, "kind"), io::child(ptr, "kind"));
  SiteDistribution d;
  if (kind == "uniform_interval")
    d.kind = DistributionKind::UniformInterval;
  else if (kind == "uniform_disc")
    d.kind = DistributionKind::UniformDisc;
  else if (kind == "custom")
    d.kind = DistributionKind::Custom;
  else
    io::fail(io::child(ptr, "kind"), "expected uniform_interval, uniform_disc or custom");
  if (j.contains("support_bound"))
    d.support_bound = io::get_number(j["support_bound"], io::child(ptr, "support_bound"));
  if (j.contains("regularity_alpha"))
    d.regularity_alpha = io::get_number(j["regularity_alpha"], io::child(ptr, "regularity_alpha"));
  if (j.contains("density")) {
    if (d.kind != DistributionKind::Custom) io::fail(io::child(ptr, "density"), "only custom distributions take a density");
    d.density = io::get_number_list(j["density"], io::child(ptr, "density"));
  }
  try {
    d.validate();
  } catch (const Error& e) {
    io::fail(ptr, e.what());
  }
  return d;
}

inline json model_to_json(const ModelSpec& s) {
  return json{{"family", family_name(s.family)},
              {"graph", graph_to_json(s.graph)},
              {"block_size", s.block_size},
              {"coupling", s.coupling},
              {"energy", s.energy},
              {"hopping", matrix_to_json(s.hopping)},
              {"site_dist", distribution_to_json(s.site_dist)}};
}

/// Omitted "hopping" selects the family default; omitted "site_dist" selects
/// uniform on [-1, 1] (the unit disc for BdG).
inline ModelSpec model_from_json(const json& j, const std::string& ptr = "") {
  io::check_keys(j, ptr, {"family", "graph", "block_size", "coupling", "energy", "hopping", "site_dist"});
  ModelSpec s;
  const std::string fam = io::get_string(io::field(j, ptr, "family"), io::child(ptr, "family"));
  if (fam == "anderson")
    s.family = ModelFamily::Anderson;
  else if (fam == "random_block")
    s.family = ModelFamily::RandomBlock;
  else if (fam == "bdg")
    s.family = ModelFamily::BdG;
  else
    io::fail(io::child(ptr, "family"), "expected anderson, random_block or bdg");
  s.graph = graph_from_json(io::field(j, ptr, "graph"), io::child(ptr, "graph"));
  s.block_size = s.family == ModelFamily::Anderson ? 1 : s.family == ModelFamily::BdG ? 2 : 0;
  if (j.contains("block_size"))
    s.block_size = io::get_uint(j["block_size"], io::child(ptr, "block_size"));
  else if (s.block_size == 0)
    io::fail(io::child(ptr, "block_size"), "random_block models need block_size");
  s.coupling = io::get_number(io::field(j, ptr, "coupling"), io::child(ptr, "coupling"));
  if (!(s.coupling >= 0.0)) io::fail(io::child(ptr, "coupling"), "coupling must be >= 0");
  if (j.contains("energy")) s.energy = io::get_number(j["energy"], io::child(ptr, "energy"));
  if (j.contains("site_dist"))
    s.site_dist = distribution_from_json(j["site_dist"], io::child(ptr, "site_dist"));
  else
    s.site_dist = s.family == ModelFamily::BdG ? SiteDistribution::uniform_disc()
                                               : SiteDistribution::uniform_interval(1.0);
  try {
    if (j.contains("hopping")) {
      s.hopping = matrix_from_json(j["hopping"], io::child(ptr, "hopping"));
    } else if (s.family == ModelFamily::Anderson) {
      s.hopping = adjacency_hopping(s.graph);
    } else {
      CMatrix t(s.block_size, s.block_size);
      for (std::size_t i = 0; i < s.block_size; ++i) t(i, i) = -1.0;
      if (s.family == ModelFamily::BdG) t(1, 1) = 1.0;
      s.hopping = block_hopping(s.graph, t);
    }
    s.validate();
  } catch (const Error& e) {
    io::fail(ptr, e.what());
  }
  return s;
}

inline json seed_to_json(const SampleSeed& s) { return json{{"master", s.master}, {"trial", s.trial}}; }

inline json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json report_to_json(const McReport& r) {
  return json{{"eps", r.eps},
              {"m", r.m},
              {"trials", r.trials},
              {"successes", r.successes},
              {"p_hat", r.p_hat},
              {"ci_low", r.ci_low},
              {"ci_high", r.ci_high},
              {"bound_value", finite_or_null(r.bound_value)},
              {"implied_C", finite_or_null(r.implied_constant())},
              {"seed", seed_to_json(r.seed)}};
}

inline json reports_to_json(std::span<const McReport> reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  return arr;
}

inline json fit_to_json(const ScalingFit& f) {
  return json{{"eps_grid", f.eps_grid},
              {"p_hats", f.p_hats},
              {"exponent", f.exponent},
              {"intercept", f.intercept},
              {"r_squared", f.r_squared}};
}

inline constexpr std::string_view kReportCsvHeader =
    "eps,m,trials,successes,p_hat,ci_low,ci_high,bound_value,seed";

/// One header line plus one line per report; the seed column is
/// "master:trial".
inline std::string reports_to_csv(std::span<const McReport> reports) {
  std::string out(kReportCsvHeader);
  out += '\n';
  for (const auto& r : reports) {
    out += io::format_double(r.eps) + ',' + std::to_string(r.m) + ',' + std::to_string(r.trials) + ',' +
           std::to_string(r.successes) + ',' + io::format_double(r.p_hat) + ',' +
           io::format_double(r.ci_low) + ',' + io::format_double(r.ci_high) + ',' +
           io::format_double(r.bound_value) + ',' + std::to_string(r.seed.master) + ':' +
           std::to_string(r.seed.trial) + '\n';
  }
  return out;
}

}  // namespace eigcount
