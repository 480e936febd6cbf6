#include <gtest/gtest.h>

#include "eigcount/io.hpp"

using namespace eigcount;

namespace {

std::string pointer_of(auto&& fn) {
  try {
    fn();
  } catch (const SchemaError& e) {
    return e.pointer();
  }
  ADD_FAILURE() << "no SchemaError thrown";
  return "";
}

}  // namespace

TEST(MatrixJson, RoundTrip) {
  const HermitianMatrix a(CMatrix{{1.0, cplx(0.5, -0.25)}, {cplx(0.5, 0.25), -3.0}});
  const json j = matrix_to_json(a);
  EXPECT_EQ(j["dim"], 2);
  const auto b = matrix_from_json(j);
  EXPECT_EQ(a.matrix().data(), b.matrix().data());
  EXPECT_EQ(json::parse(j.dump()), j);
}

TEST(MatrixJson, ImaginaryPartOptionalAndSymmetrized) {
  const auto m = matrix_from_json(json::parse(R"({"dim": 2, "re": [[1, 2], [4, 5]]})"));
  EXPECT_EQ(m(0, 1), cplx(3.0));
  EXPECT_EQ(m(1, 0), cplx(3.0));
}

TEST(MatrixJson, ErrorsCarryPointers) {
  EXPECT_EQ(pointer_of([] { matrix_from_json(json::parse(R"({"dim": 2, "re": [[1, 2], [3]]})")); }), "/re/1");
  EXPECT_EQ(pointer_of([] { matrix_from_json(json::parse(R"({"dim": 1, "re": [["x"]]})")); }), "/re/0/0");
  EXPECT_EQ(pointer_of([] { matrix_from_json(json::parse(R"({"dim": 1, "re": [[1]], "extra": 0})")); }),
            "/extra");
  EXPECT_EQ(pointer_of([] { matrix_from_json(json::parse(R"({"re": [[1]]})")); }), "/dim");
  EXPECT_EQ(pointer_of([] { matrix_from_json(json::parse(R"({"dim": 0, "re": []})")); }), "/dim");
  EXPECT_EQ(pointer_of([] { matrix_from_json(json::parse(R"({"dim": 1, "re": [[true]]})"), "/model/hopping"); }),
            "/model/hopping/re/0/0");
}

TEST(CertificateJson, Fields) {
  const WitnessCertificate c{IndexSet(3, {0, 1}), IndexSet(3, {0, 1}), 2, 0.1, 1.0 / 12.0, 399.3};
  const json j = certificate_to_json(c);
  EXPECT_EQ(j["alpha"], json::array({0, 1}));
  EXPECT_EQ(j["beta"], json::array({0, 1}));
  EXPECT_EQ(j["m"], 2);
  EXPECT_EQ(j["eps"], 0.1);
  EXPECT_EQ(j["K"], 1.0 / 12.0);
  EXPECT_EQ(j["margin"], 399.3);
  EXPECT_EQ(j.size(), 6u);
}

TEST(GraphJson, Forms) {
  EXPECT_EQ(graph_from_json(json::parse(R"({"path": 5})"), ""), path_graph(5));
  EXPECT_EQ(graph_from_json(json::parse(R"({"grid": [3, 2]})"), ""), grid_graph(3, 2));
  const auto g = graph_from_json(json::parse(R"({"vertices": 3, "edges": [[0, 1], [2, 1]]})"), "");
  EXPECT_EQ(g.max_degree, 2u);
  EXPECT_EQ(graph_from_json(graph_to_json(g), ""), g);
  EXPECT_EQ(pointer_of([] { graph_from_json(json::parse(R"({"vertices": 3, "edges": [[0, 0]]})"), "/graph"); }),
            "/graph");
  EXPECT_EQ(pointer_of([] { graph_from_json(json::parse(R"({"path": 2, "grid": [1, 1]})"), "/g"); }), "/g");
  EXPECT_EQ(pointer_of([] { graph_from_json(json::parse(R"({"grid": [3]})"), "/g"); }), "/g/grid");
  EXPECT_EQ(pointer_of([] {
              graph_from_json(json::parse(R"({"vertices": 3, "edges": [[0, 1], [1, 2]], "max_degree": 1})"), "/g");
            }),
            "/g");
}

TEST(ModelJson, RoundTripAllFamilies) {
  const std::vector<ModelSpec> specs{anderson_model(path_graph(4), 1.5, 0.25, 2.0),
                                     bdg_model(grid_graph(2, 2), 1.0, 0.0),
                                     random_block_model(path_graph(3), 3, 0.5, -0.1, 1.0)};
  for (const auto& s : specs) {
    const json j = model_to_json(s);
    const auto back = model_from_json(json::parse(j.dump()));
    EXPECT_EQ(model_to_json(back), j);
    EXPECT_EQ(back.family, s.family);
    EXPECT_EQ(back.graph, s.graph);
    EXPECT_EQ(back.site_dist, s.site_dist);
    EXPECT_EQ(back.hopping.matrix().data(), s.hopping.matrix().data());
  }
}

TEST(ModelJson, DefaultsMatchFactories) {
  const auto a = model_from_json(json::parse(R"({"family": "anderson", "graph": {"path": 4}, "coupling": 1})"));
  EXPECT_EQ(model_to_json(a), model_to_json(anderson_model(path_graph(4), 1.0, 0.0, 1.0)));
  const auto b = model_from_json(json::parse(R"({"family": "bdg", "graph": {"path": 3}, "coupling": 2})"));
  EXPECT_EQ(model_to_json(b), model_to_json(bdg_model(path_graph(3), 2.0, 0.0)));
  const auto r = model_from_json(
      json::parse(R"({"family": "random_block", "graph": {"path": 2}, "block_size": 2, "coupling": 1})"));
  EXPECT_EQ(model_to_json(r), model_to_json(random_block_model(path_graph(2), 2, 1.0, 0.0, 1.0)));
}

TEST(ModelJson, Errors) {
  EXPECT_EQ(pointer_of([] { model_from_json(json::parse(R"({"family": "x", "graph": {"path": 1}, "coupling": 1})")); }),
            "/family");
  EXPECT_EQ(pointer_of([] {
              model_from_json(json::parse(R"({"family": "random_block", "graph": {"path": 1}, "coupling": 1})"));
            }),
            "/block_size");
  EXPECT_EQ(pointer_of([] {
              model_from_json(json::parse(R"({"family": "anderson", "graph": {"path": 1}, "coupling": -1})"));
            }),
            "/coupling");
  EXPECT_EQ(pointer_of([] {
              model_from_json(json::parse(
                  R"({"family": "anderson", "graph": {"path": 2}, "coupling": 1, "site_dist": {"kind": "uniform_disc"}})"));
            }),
            "");
  EXPECT_EQ(pointer_of([] {
              model_from_json(json::parse(
                  R"({"family": "anderson", "graph": {"path": 2}, "coupling": 1, "site_dist": {"kind": "uniform_interval", "density": [1]}})"));
            }),
            "/site_dist/density");
  EXPECT_EQ(pointer_of([] {
              model_from_json(json::parse(R"({"family": "anderson", "graph": {"path": 2}, "coupling": 1, "seed": 3})"));
            }),
            "/seed");
}

TEST(DistributionJson, RoundTrip) {
  const auto d = SiteDistribution::custom(2.0, {0.5, 1.0, 0.0}, 0.5);
  EXPECT_EQ(distribution_from_json(distribution_to_json(d), ""), d);
  EXPECT_EQ(distribution_from_json(distribution_to_json(SiteDistribution::uniform_disc()), ""),
            SiteDistribution::uniform_disc());
}

TEST(ReportIo, CsvAndJson) {
  McReport r{0.01, 2, 1000, 0, 0.0, 0.0, 0.003, INFINITY, {7, 3}};
  const std::vector<McReport> reps{r};
  const std::string csv = reports_to_csv(reps);
  EXPECT_EQ(csv, "eps,m,trials,successes,p_hat,ci_low,ci_high,bound_value,seed\n"
                 "0.01,2,1000,0,0.0,0.0,0.003,inf,7:3\n");
  const json j = report_to_json(r);
  EXPECT_TRUE(j["bound_value"].is_null());
  EXPECT_TRUE(j["implied_C"].is_null());
  EXPECT_EQ(j["seed"]["master"], 7);
  r.bound_value = 0.5;
  r.p_hat = 0.1;
  EXPECT_EQ(report_to_json(r)["implied_C"], 0.2);
}

TEST(ReportIo, FormatDouble) {
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(1.0), "1.0");
  EXPECT_EQ(io::format_double(-INFINITY), "-inf");
  EXPECT_EQ(io::format_double(NAN), "nan");
  EXPECT_EQ(std::stod(io::format_double(1.0 / 3.0)), 1.0 / 3.0);
}
