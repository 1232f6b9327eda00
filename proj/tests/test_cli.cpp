#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "singcert/cli.hpp"

using namespace singcert;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
  json report() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("bounds commands") {
  auto r = run({"bounds", "inverse", "--fn", "x1 + x1^2/4", "--at", "0", "--k", "2"});
  REQUIRE(r.code == 0);
  auto j = r.report();
  CHECK(j["schema"] == "singcert-report/1");
  CHECK(j["status"] == "ok");
  CHECK(j["config"]["K"].get<double>() == doctest::Approx(1.5));
  CHECK(j["result"]["delta"].get<double>() == 0.5);
  CHECK(j["result"]["rho1"].get<double>() == doctest::Approx(1.0 / 18));

  r = run({"bounds", "split", "--fn", "x1^2 + x2^3", "--at", "0,0", "--k", "3"});
  REQUIRE(r.code == 0);
  j = r.report();
  CHECK(j["result"]["p"] == 1);
  CHECK(j["result"]["signs"] == json::array({1.0}));

  r = run({"bounds", "implicit", "--catalog", "circle"});
  CHECK(r.code == 0);
  r = run({"bounds", "rank", "--fn", "x1 + x2; (x1 + x2)^2", "--at", "0.1,0.2"});
  CHECK(r.code == 0);
  CHECK(r.report()["result"]["p"] == 1);
}

TEST_CASE("exit codes") {
  CHECK(run({"bounds", "inverse", "--catalog", "no_such_entry"}).code == 1);
  CHECK(run({"bounds", "inverse", "--fn", "x1 + * 2"}).code == 1);
  CHECK(run({"bounds", "frobnicate", "--fn", "x1"}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"bounds", "inverse", "--fn", "x1", "--at", "0,zz"}).code == 1);

  auto r = run({"bounds", "inverse", "--fn", "x1^2"});
  CHECK(r.code == 2);
  CHECK(r.report()["error"]["code"] == "SingularJacobian");
  CHECK(r.report()["status"] == "refused");

  r = run({"morse", "certify", "--fn", "x1^4/4 - x1^2/2"});
  CHECK(r.code == 2);
  CHECK(r.report()["error"]["code"] == "DuplicateCriticalValues");
}

TEST_CASE("verify commands") {
  auto r = run({"verify", "inverse", "--fn", "x1; x2", "--samples", "200"});
  CHECK(r.code == 0);
  CHECK(r.report()["verification"]["passed"] == true);

  r = run({"verify", "split", "--fn", "x1^2 + x1^3", "--samples", "200"});
  REQUIRE(r.code == 0);
  for (const auto& c : r.report()["verification"]["checks"])
    if (c["name"] == "normal_form") CHECK(c["worst"].get<double>() <= 1e-9);

  // understated K: the certificate claims too much and sampling catches it
  r = run({"verify", "inverse", "--fn", "x1 + x1^3", "--K", "0.5", "--radius", "10", "--samples", "200"});
  CHECK(r.code == 3);
  CHECK(r.report()["status"] == "failed");
  CHECK(r.report()["verification"]["passed"] == false);
}

TEST_CASE("morse commands") {
  auto r = run({"morse", "analyze", "--fn", "x1^4/4 - x1^2/2"});
  REQUIRE(r.code == 0);
  CHECK(r.report()["result"]["count"] == 3);

  r = run({"morse", "perturb", "--fn", "x1^3/3", "--eps", "0.5", "--seed", "7"});
  REQUIRE(r.code == 0);
  auto j = r.report();
  CHECK(j["result"]["tilt"].size() == 1);
  CHECK(j["result"]["morse"] == true);
  CHECK(j["result"]["critical_points"].size() == 2);
  CHECK(j["warnings"].size() == 2);

  r = run({"morse", "check-openness", "--catalog", "tilted_well", "--perturb", "0.00001*x1"});
  CHECK(r.code == 0);
  r = run({"morse", "check-openness", "--catalog", "tilted_well", "--perturb", "0.1*x1^2"});
  CHECK(r.code == 2);
  CHECK(r.report()["error"]["code"] == "PerturbationTooLarge");
}

TEST_CASE("report files and determinism") {
  const auto dir = std::filesystem::temp_directory_path() / "singcert_cli_test";
  std::filesystem::create_directories(dir);
  const std::string jpath = (dir / "r.json").string(), cpath = (dir / "r.csv").string();
  auto r = run({"morse", "certify", "--catalog", "saddle", "--json", jpath, "--csv", cpath});
  REQUIRE(r.code == 0);
  std::ifstream jf(jpath), cf(cpath);
  std::stringstream js, cs;
  js << jf.rdbuf();
  cs << cf.rdbuf();
  CHECK(js.str() == r.out);
  CHECK(cs.str().rfind("field,value\n", 0) == 0);
  CHECK(cs.str().find("result.epsilon,") != std::string::npos);
  CHECK(cs.str().find("timestamp") == std::string::npos);

  const std::vector<std::string> args{"morse", "perturb", "--catalog", "monkey", "--seed", "3"};
  const auto a = run(args);
  setenv("SINGCERT_THREADS", "1", 1);
  const auto b = run(args);
  unsetenv("SINGCERT_THREADS");
  CHECK(a.code == b.code);
  CHECK(strip_timestamp(a.out) == strip_timestamp(b.out));
  CHECK(a.report().contains("timestamp"));
  std::filesystem::remove_all(dir);
}
