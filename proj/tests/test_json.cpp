#include "doctest.h"

#include <cmath>

#include "sica/errors.hpp"
#include "sica/json_io.hpp"

using namespace sica;

TEST_CASE("non-finite numbers become strings and come back") {
  CHECK(number(kInf) == "inf");
  CHECK(number(-kInf) == "-inf");
  CHECK(number(std::nan("")) == "nan");
  CHECK(to_double(number(kInf)) == kInf);
  CHECK(to_double(number(-kInf)) == -kInf);
  CHECK(std::isnan(to_double(number(std::nan("")))));
  CHECK(to_double(json(2.5)) == 2.5);
  CHECK_THROWS_AS(to_double(json("two")), ParseError);
}

TEST_CASE("dump keeps 17 significant digits") {
  json j;
  j["x"] = 0.1;
  j["third"] = 1.0 / 3.0;
  j["big"] = 1e300;
  j["inf"] = number(kInf);
  const json back = json::parse(dump(j));
  CHECK(back["x"].get<double>() == 0.1);
  CHECK(back["third"].get<double>() == 1.0 / 3.0);
  CHECK(back["big"].get<double>() == 1e300);
  CHECK(to_double(back["inf"]) == kInf);
  CHECK(dump(j).find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("supports are written 1-based") {
  CHECK(to_json(IndexSet{0, 4}) == json::array({1, 5}));
}

TEST_CASE("penalty serialization") {
  const json j = to_json(PenaltySpec::l1(0.5));
  CHECK(j["family"] == "l1");
  CHECK(j["a"] == "inf");
  CHECK(to_double(j["lambda"]) == 0.5);
}

TEST_CASE("certificates serialize every field") {
  ZEstimatorCertificate z;
  z.eq31_residual = 1e-9;
  z.eq33_margin = 0.5;
  const json jz = to_json(z);
  CHECK(jz["eq32_margin"].is_null());
  CHECK(jz["holds"] == true);
  AoptResult a;
  a.value = kInf;
  a.l1_optimal = true;
  CHECK(to_json(a)["a_opt"] == "inf");
  OracleAudit audit;
  audit.capC = 0.4;
  const json ja = to_json(audit);
  CHECK(ja["C"].get<double>() == 0.4);
  CHECK(ja.contains("lambda_lower"));
  CHECK(ja.contains("prob_bound"));
}

TEST_CASE("SimConfig round trip") {
  SimConfig cfg = SimConfig::selection_large(0.5);
  cfg.replications = 7;
  cfg.seed = 99;
  const SimConfig back = sim_config_from_json(json::parse(dump(to_json(cfg))));
  CHECK(back.study == cfg.study);
  CHECK(back.n == cfg.n);
  CHECK(back.p == cfg.p);
  CHECK(back.s == cfg.s);
  CHECK(back.beta0_values == cfg.beta0_values);
  CHECK(back.correlation == cfg.correlation);
  CHECK(back.corr == cfg.corr);
  CHECK(back.sigma == cfg.sigma);
  CHECK(back.replications == 7);
  CHECK(back.seed == 99);
  CHECK(back.test_size == cfg.test_size);

  const SimConfig rec = sim_config_from_json(json::parse(R"({"study":"recovery","correlation":{"kind":"equicorrelated","r":0.2}})"));
  CHECK(rec.noiseless());
  CHECK(rec.corr == 0.2);
  CHECK(rec.p == 1000);
}

TEST_CASE("SimConfig parse errors") {
  CHECK_THROWS_AS(sim_config_from_json(json::parse(R"({"bogus":1})")), ParseError);
  CHECK_THROWS_AS(sim_config_from_json(json::parse(R"({"n":"ten"})")), ParseError);
  CHECK_THROWS_AS(sim_config_from_json(json::parse(R"({"replications":0})")), ParseError);
  CHECK_THROWS_AS(sim_config_from_json(json::parse(R"({"correlation":{"kind":"block"}})")), ParseError);
  CHECK_THROWS_AS(sim_config_from_json(json::parse("[1,2]")), ParseError);
}
