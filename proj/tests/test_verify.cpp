#include <doctest.h>

#include "qpm/verify.hpp"

#include <set>

using namespace qpm;

namespace {

CheckConfig config_for(const std::string& id, int n = 2, int samples = 3) {
  const CheckInfo& info = find_check(id);
  CheckConfig c;
  c.check_id = id;
  c.group_n = n;
  c.samples = samples;
  c.surface = info.surface;
  c.surface_k = info.surface == SurfaceKind::Disc ? 3 : 2;
  if (id == "form_multiplicativity") c.tol = 1e-8;
  return c;
}

double extra(const Report& r, const std::string& key) {
  for (const auto& [k, v] : r.extras)
    if (k == key) return v;
  FAIL("missing extra " << key);
  return 0;
}

}  // namespace

TEST_CASE("catalog lists every check once") {
  const std::vector<std::string> expect = {
      "quasi_poisson_identity", "gauge_invariance",      "moment_equivariance",        "psi_poisson",
      "groupoid_axioms_fstar",  "theta_membership",      "double_axioms_interchange",  "form_multiplicativity",
      "form_nondegenerate_reduced", "morita_commuting",  "morita_moment_surjective",   "annihilator_pairing",
      "h2n_closure",            "schubert_orbit_words", "t2_lift",                    "fission_axioms",
      "restricted_morita"};
  std::vector<std::string> ids = check_ids();
  CHECK(ids.size() == expect.size());
  CHECK(std::set<std::string>(ids.begin(), ids.end()) == std::set<std::string>(expect.begin(), expect.end()));
  for (const CheckInfo& c : catalog()) {
    CHECK(!c.summary.empty());
    CHECK(!c.defect.empty());
    CHECK(!c.mutation.empty());
  }
}

TEST_CASE("configuration errors") {
  CheckConfig c = config_for("quasi_poisson_identity");
  c.check_id = "nonsense";
  CHECK_THROWS_AS(run_check(c), UnknownCheck);
  c = config_for("quasi_poisson_identity");
  c.samples = 0;
  CHECK_THROWS_AS(run_check(c), InvalidConfig);
  c = config_for("quasi_poisson_identity");
  c.tol = 0;
  CHECK_THROWS_AS(run_check(c), InvalidConfig);
  c = config_for("psi_poisson");
  c.surface = SurfaceKind::Double;
  CHECK_THROWS_AS(run_check(c), InvalidConfig);
  c = config_for("gauge_invariance");
  c.surface = SurfaceKind::None;
  CHECK_THROWS_AS(run_check(c), InvalidConfig);
  c = config_for("theta_membership");
  c.surface = SurfaceKind::Disc;
  CHECK_THROWS_AS(run_check(c), InvalidConfig);
  c = config_for("t2_lift");
  c.surface_k = 3;
  CHECK_THROWS_AS(run_check(c), InvalidConfig);
}

TEST_CASE("every check passes and every negative control fails") {
  for (const std::string& id : check_ids()) {
    for (int n : {2, 3}) {
      if (n == 3 && (id == "form_nondegenerate_reduced" || id == "form_multiplicativity")) continue;
      CheckConfig c = config_for(id, n);
      Report ok = run_check(c);
      CHECK_MESSAGE(ok.pass, id << " n=" << n << " defect " << ok.max_defect
                                << (ok.failures.empty() ? "" : " " + ok.failures.front().diagnostic));
      c.mutate = true;
      Report bad = run_check(c);
      CHECK_MESSAGE(!bad.pass, id << " n=" << n << " mutation passed");
    }
  }
}

TEST_CASE("quasi-Poisson checks also run on the doubled disc") {
  for (const std::string& id : {"quasi_poisson_identity", "gauge_invariance", "moment_equivariance"}) {
    CheckConfig c = config_for(id);
    c.surface = SurfaceKind::Double;
    c.surface_k = 4;
    CHECK_MESSAGE(run_check(c).pass, id);
    c.mutate = true;
    CHECK_FALSE(run_check(c).pass);
  }
}

TEST_CASE("pass requires the defect under tol and no failures") {
  CheckConfig c = config_for("gauge_invariance");
  Report r = run_check(c);
  CHECK(r.pass);
  CHECK(r.failures.empty());
  c.tol = 1e-30;
  Report strict = run_check(c);
  CHECK(strict.max_defect == r.max_defect);
  CHECK_FALSE(strict.pass);
}

TEST_CASE("reports are deterministic and independent of the thread count") {
  for (const std::string& id : {"quasi_poisson_identity", "theta_membership", "t2_lift", "h2n_closure"}) {
    CheckConfig c = config_for(id, 2, 4);
    c.threads = 1;
    const std::string a = to_json(run_check(c), false).dump();
    const std::string b = to_json(run_check(c), false).dump();
    c.threads = 3;
    const std::string d = to_json(run_check(c), false).dump();
    CHECK(a == b);
    CHECK(a == d);
    c.seed = 99;
    CHECK(to_json(run_check(c), false).dump() != a);
  }
}

TEST_CASE("finite-difference disagreement converges at second order") {
  CheckConfig c = config_for("quasi_poisson_identity", 2, 4);
  c.surface_k = 2;
  c.fd_step = 4e-3;
  const double coarse = extra(run_check(c), "fd_disagreement");
  c.fd_step = 2e-3;
  const double fine = extra(run_check(c), "fd_disagreement");
  CHECK(coarse > 0);
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("annihilator pairing at the documented scale") {
  CheckConfig c = config_for("annihilator_pairing", 2, 50);
  c.tol = 1e-10;
  Report r = run_check(c);
  CHECK(r.pass);
  CHECK(r.max_defect < 1e-10);
}

TEST_CASE("report JSON") {
  CheckConfig c = config_for("psi_poisson");
  Report r = run_check(c);
  nlohmann::json j = to_json(r);
  CHECK(j["check_id"] == "psi_poisson");
  CHECK(j["config"]["samples"] == 3);
  CHECK(j["config"]["surface"] == "disc");
  CHECK(j["pass"] == true);
  CHECK(j.contains("runtime_ms"));
  CHECK_FALSE(to_json(r, false).contains("runtime_ms"));
  c.mutate = true;
  nlohmann::json m = to_json(run_check(c));
  CHECK(m["pass"] == false);
  CHECK(m["config"]["mutate"] == true);
}
