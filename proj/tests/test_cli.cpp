#include <doctest.h>

#include "sphf/report.hpp"

using namespace sphf;

TEST_CASE("report json roundtrip and schema") {
  report::Report r;
  r.config["suite"] = "cdybe";
  report::Check c;
  c.name = "cdybe-1";
  c.anchor = "mixed-classical-dynamical-yang-baxter";
  c.pass = true;
  c.m = 8;
  c.identity = "cdybe-1";
  c.type = "A1";
  c.rank = 1;
  r.checks.push_back(c);
  auto j = report::to_json(r);
  CHECK(j["pass"] == true);
  CHECK(j["version"] == "1");
  CHECK(j["checks"][0]["name"] == "cdybe-1");
  CHECK(j["checks"][0].contains("paper_anchor"));
  CHECK(j["checks"][0].contains("residual_support"));
  CHECK(j["checks"][0].contains("wall_time_ms"));
  CHECK(j["checks"][0]["identity"] == "cdybe-1");
  auto r2 = report::from_json(j);
  CHECK(r2.checks.size() == 1);
  CHECK(r2.checks[0].pass);
  CHECK(r2.checks[0].anchor == c.anchor);
}

TEST_CASE("report merge: pass iff all pass, error on empty") {
  report::Report a, b;
  report::Check ca;
  ca.name = "x";
  ca.pass = true;
  a.checks.push_back(ca);
  report::Check cb;
  cb.name = "a";
  cb.pass = false;
  b.checks.push_back(cb);
  auto good = report::merge({a, a});
  CHECK(good.pass());
  auto mixed = report::merge({a, b});
  CHECK_FALSE(mixed.pass());
  // deterministic order: sorted by name
  CHECK(mixed.checks[0].name == "a");
  CHECK_THROWS(report::merge({}));
}
