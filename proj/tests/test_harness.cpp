#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "finecalc/harness.hpp"

using namespace finecalc;

TEST_CASE("config parsing") {
  const HarnessConfig c = HarnessConfig::from_json(R"({
    "d": 1, "seed": 9, "eigenvalues": [[0, 0.5, 0, 0, 0, 0]],
    "contour": {"nodes": 64, "radius_factor": 2.0},
    "tolerances": {"identity": 1e-8}, "suites": ["identities"], "negative_controls": true})");
  CHECK(c.d == 1);
  CHECK(c.seed == 9);
  CHECK(c.nodes == 64);
  CHECK(c.radius_factor == 2.0);
  CHECK(c.tol.identity == 1e-8);
  CHECK(c.tol.reproduction == 1e-8);
  CHECK(c.negative_controls);
  REQUIRE(c.eigenvalues.size() == 1);
  CHECK(c.eigenvalues[0][1] == 0.5);
  CHECK(configured_operator(c).rank() == 1);
  // The echo parses back to the same settings.
  const HarnessConfig back = HarnessConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
}

TEST_CASE("config errors") {
  for (const char* bad : {"not json", "[1, 2]", R"({"colour": 1})", R"({"contour": {"radius": 2}})",
                          R"({"d": 0})", R"({"d": 17})", R"({"n": 6})", R"({"nodes": 4})",
                          R"({"contour": {"radius_factor": 0.9}})", R"({"suites": ["kernel"]})",
                          R"({"d": "two"})", R"({"d": 2, "eigenvalues": [[0, 1, 0, 0, 0, 0]]})",
                          R"({"tolerances": {"identity": -1}})", R"({"eigenvalues": [[0, 1]]})"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(HarnessConfig::from_json(bad), ConfigInvalid);
  }
}

TEST_CASE("empty suite list") {
  HarnessConfig c;
  c.suites.clear();
  const Report r = run(c);
  CHECK(r.records.empty());
  CHECK(r.ok());
  const std::string j = emit(r, Format::json);
  CHECK(j.find("\"records\": []") != std::string::npos);
  CHECK(parse_records(j).empty());
}

TEST_CASE("identities suite at rank one") {
  HarnessConfig c;
  c.d = 1;
  c.samples = 10;
  c.suites = {"identities"};
  const Report r = run(c);
  CHECK(r.records.size() == 18);
  CHECK(r.ok());
  for (const auto& rec : r.records) {
    CAPTURE(rec.name);
    CHECK(rec.pass);
    CHECK(rec.digest.size() == 16);
    CHECK_FALSE(rec.anchor.empty());
  }

  c.negative_controls = true;
  const Report rc = run(c);
  const Summary s = rc.summary();
  CHECK(s.controls == 2);
  CHECK(s.controls_rejected == 2);
  CHECK(rc.ok());

  SUBCASE("emitters") {
    const auto parsed = parse_records(emit(rc, Format::json));
    REQUIRE(parsed.size() == rc.records.size());
    for (std::size_t k = 0; k < parsed.size(); ++k) {
      CHECK(parsed[k].name == rc.records[k].name);
      CHECK(parsed[k].residual == rc.records[k].residual);
      CHECK(parsed[k].pass == rc.records[k].pass);
      CHECK(parsed[k].control == rc.records[k].control);
    }
    const std::string csv = emit(rc, Format::csv);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(rc.records.size() + 1));
    const std::string text = emit(rc, Format::text);
    CHECK(text.find("OK\n") != std::string::npos);
    CHECK(text.find("rejected") != std::string::npos);
  }

  SUBCASE("reports are deterministic") {
    CHECK(emit(run(c), Format::json) == emit(rc, Format::json));
  }
}

TEST_CASE("pass policy") {
  Report r;
  Record good;
  good.pass = true;
  Record control;
  control.control = true;
  r.records = {good, control};
  CHECK(r.ok());
  Record bad;
  r.records.push_back(bad);
  CHECK_FALSE(r.ok());
  const Summary s = r.summary();
  CHECK(s.total == 3);
  CHECK(s.failed == 2);
  CHECK(s.controls_rejected == 1);
  CHECK(metric_is_lower_bound("order"));
  CHECK(metric_is_lower_bound("margin"));
  CHECK_FALSE(metric_is_lower_bound("relative_residual"));
}

TEST_CASE("failing checks and bad operators") {
  HarnessConfig c;
  c.d = 1;
  c.samples = 3;
  c.suites = {"identities"};
  c.tol.identity = 1e-30;
  const Report r = run(c);
  CHECK(r.records.size() == 18);
  CHECK_FALSE(r.ok());
  c.eigenvalues = {JointEigenvalue{1, 1, 1, 1, 1, 1}};
  CHECK_THROWS_AS(run(c), ConfigInvalid);
}

TEST_CASE("non-finite residuals are emitted as null") {
  Report r;
  Record rec;
  rec.name = "x";
  rec.residual = std::numeric_limits<double>::quiet_NaN();
  r.records = {rec};
  const std::string j = emit(r, Format::json);
  CHECK(j.find("\"residual\": null") != std::string::npos);
  CHECK(std::isnan(parse_records(j).front().residual));
}
