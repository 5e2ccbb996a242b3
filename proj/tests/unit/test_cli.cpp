#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "doctest.h"

#include "bullbear/cli.hpp"
#include "bullbear/error.hpp"
#include "bullbear/moments.hpp"

using namespace bullbear;
using cli::Json;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir = fs::temp_directory_path() / ("bullbear_cli_" + std::to_string(::getpid()));
  Scratch() { fs::create_directories(dir); }
  ~Scratch() { fs::remove_all(dir); }

  std::string write(const std::string& name, const std::string& body) const {
    const auto path = dir / name;
    std::ofstream(path) << body;
    return path.string();
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const char* kWorkedParams = R"({"groups":[{"factor":0.5,"count":1},{"factor":2.0,"count":1}],"total_investors":3})";

}  // namespace

TEST_CASE("ingest") {
  const auto flat = cli::ingest({5.0, 5.0, 5.0, 5.0}, 1, 3);
  CHECK(flat.moments == std::vector<double>{0.0, 0.0, 0.0});

  const double l2 = std::log(2.0);
  const auto zigzag = cli::ingest({1.0, 2.0, 1.0, 2.0}, 1, 2);
  CHECK(zigzag.windows == 3);
  CHECK(zigzag.moments[0] == doctest::Approx(l2 / 3).epsilon(1e-15));
  CHECK(zigzag.moments[1] == doctest::Approx(l2 * l2).epsilon(1e-15));

  CHECK(cli::ingest({1, 2, 3, 4, 5}, 2, 1).windows == 2);
  // windows use prices 0, 2, 4
  CHECK(cli::ingest({1, 7, 3, 7, 9}, 2, 1).moments[0] == doctest::Approx(std::log(9.0) / 2));

  try {
    (void)cli::ingest({1, 2, 3}, 2, 1);
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::insufficient_data);
  }
  try {
    (void)cli::ingest({1, 2, -3, 4}, 1, 1);
    FAIL("expected NonPositivePrice");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::non_positive_price);
  }
  CHECK_THROWS_AS(cli::ingest({1, 2, 3}, 0, 1), Error);
}

TEST_CASE("prices CSV") {
  std::istringstream good("t,price\n0,1.5\n1,2\n\n5,2.25\n");
  const auto rows = cli::parse_prices_csv(good);
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].t == 5);
  CHECK(rows[2].price == 2.25);

  std::istringstream no_header("0,1.5\n1,2\n");
  CHECK_THROWS_AS(cli::parse_prices_csv(no_header), Error);
  std::istringstream backwards("t,price\n3,1\n3,2\n");
  CHECK_THROWS_AS(cli::parse_prices_csv(backwards), Error);
  std::istringstream garbage("t,price\n1,abc\n");
  CHECK_THROWS_AS(cli::parse_prices_csv(garbage), Error);
}

TEST_CASE("params JSON round trip") {
  const ModelParams params({{0.5, 2}, {1.0 / 3.0 + 1.0, 7}}, 12);
  const auto j = cli::params_to_json(params);
  const auto back = cli::params_from_json(Json::parse(j.dump()));
  CHECK(back.factors() == params.factors());
  CHECK(back.initial_counts() == params.initial_counts());
  CHECK(back.total_investors() == 12);
  CHECK_THROWS_AS(cli::params_from_json(Json::parse(R"({"groups":[]})")), Error);
  CHECK_THROWS_AS(cli::params_from_json(Json::parse(R"({"groups":[{"factor":2,"count":5}],"total_investors":3})")),
                  Error);
}

TEST_CASE("moments subcommand") {
  Scratch s;
  const auto params = s.write("p.json", kWorkedParams);

  auto r = call({"moments", "--params", params, "--t", "2", "--n-max", "2", "--mode", "exact", "--out", s.path("m.json")});
  REQUIRE(r.code == 0);
  const auto report = cli::read_json_file(s.path("m.json"));
  CHECK(report["method"] == "exact");
  CHECK(report["outputs"]["backend"] == "rational");
  CHECK(report["inputs"]["params"] == Json::parse(kWorkedParams));
  CHECK(std::abs(report["outputs"]["moments"][0].get<double>()) < 1e-16);
  CHECK(report["outputs"]["moments"][1].get<double>() ==
        doctest::Approx(2.0 / 3.0 * std::log(2.0) * std::log(2.0)).epsilon(1e-15));
  CHECK(report["outputs"]["coefficients"][1][1]["value"] == "4/9");

  r = call({"moments", "--params", params, "--t", "2.5", "--n-max", "4"});
  REQUIRE(r.code == 0);
  const auto real_t = Json::parse(r.out);
  CHECK(real_t["outputs"]["backend"] == "float");
  CHECK(real_t["outputs"]["moments"].size() == 4);

  r = call({"moments", "--params", params, "--t", "2.5", "--n-max", "2", "--backend", "rational"});
  CHECK(r.code == 1);
  CHECK(r.err.find("InvalidArgument") != std::string::npos);

  r = call({"moments", "--params", params, "--t", "3", "--n-max", "2", "--backend", "float", "--trace"});
  REQUIRE(r.code == 0);
  const auto traced = Json::parse(r.out);
  CHECK(!traced["outputs"]["trace"][1].empty());

  r = call({"moments", "--params", params, "--t", "1", "--n-max", "2", "--mode", "binomial"});
  REQUIRE(r.code == 0);
  const auto binom = Json::parse(r.out);
  CHECK(binom["method"] == "binomial");
  CHECK(binom["outputs"]["moments"][1].get<double>() == doctest::Approx(moment_binomial(1.0 / 3, 2.0, 0.5, 1, 2)));

  r = call({"moments", "--params", params, "--t", "4", "--n-max", "1", "--mode", "limit"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["outputs"]["moments"][0].get<double>() == doctest::Approx(0.0));

  r = call({"moments", "--params", params, "--t", "2.4", "--n-max", "2", "--mode", "mc", "--paths", "20000",
            "--seed", "9"});
  REQUIRE(r.code == 0);
  const auto mc = Json::parse(r.out);
  CHECK(mc["method"] == "monte-carlo");
  CHECK(mc["seed"] == 9);
  CHECK(mc["outputs"]["horizon"] == 2);

  CHECK(call({"moments", "--params", params, "--t", "2", "--n-max", "2", "--mode", "bogus"}).code == 2);
  CHECK(call({"moments", "--t", "2", "--n-max", "2"}).code == 2);
}

TEST_CASE("oracle and exact reports agree") {
  Scratch s;
  const auto params = s.write(
      "p.json", R"({"groups":[{"factor":0.75,"count":1},{"factor":1.3333333333333333,"count":2}],"total_investors":4})");
  REQUIRE(call({"oracle", "--params", params, "--t", "6", "--n", "3", "--out", s.path("o.json")}).code == 0);
  REQUIRE(call({"moments", "--params", params, "--t", "6", "--n-max", "3", "--mode", "exact", "--out",
                s.path("e.json")})
              .code == 0);
  const auto o = cli::read_json_file(s.path("o.json"));
  const auto e = cli::read_json_file(s.path("e.json"));
  CHECK(o["method"] == "oracle");
  CHECK(o["outputs"]["total_mass"] == "1");
  CHECK(o["outputs"]["moments"] == e["outputs"]["moments"]);
  CHECK(o["outputs"]["coefficients"] == e["outputs"]["coefficients"]);

  const auto r = call({"oracle", "--params", params, "--t", "12", "--n", "1", "--budget", "1000"});
  CHECK(r.code == 1);
  CHECK(r.err.find("BudgetExceeded") != std::string::npos);
}

TEST_CASE("fit subcommand") {
  Scratch s;
  const auto plain = s.write("m.json", "[0.2, 0.12, 0.052, 0.0388]");
  auto r = call({"fit", "--moments", plain, "--g", "2", "--anchor", "1000000"});
  REQUIRE(r.code == 0);
  const auto report = Json::parse(r.out);
  CHECK(report["method"] == "fit");
  CHECK(report["outputs"]["roots"][0].get<double>() == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(report["outputs"]["weights"][1].get<double>() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(report["outputs"]["mapped_params"]["groups"][0]["count"] == 250000);
  CHECK(report["outputs"]["mapped_params"]["total_investors"] == 1250000);

  const auto exact = s.write("x.json", R"({"moments":["1/5","3/25","13/250","97/2500"]})");
  r = call({"fit", "--moments", exact, "--g", "2", "--anchor", "1000", "--total", "5000"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["outputs"]["mapped_params"]["total_investors"] == 5000);

  const auto normal = s.write("n.json", "[0, 1, 0, 3]");
  r = call({"fit", "--moments", normal, "--g", "2", "--anchor", "1000"});
  CHECK(r.code == 1);
  CHECK(r.err.find("InvalidFit") != std::string::npos);

  r = call({"fit", "--moments", plain, "--g", "2", "--anchor", "3"});
  CHECK(r.code == 1);
  CHECK(r.err.find("AnchorTooSmall") != std::string::npos);
}

TEST_CASE("ingest feeds fit, reports rerun bit-exactly") {
  Scratch s;
  std::ostringstream csv;
  csv << "t,price\n";
  double p = 100.0;
  for (int i = 0; i <= 40; ++i) {
    csv << i << ',' << p << '\n';
    p *= (i % 3 == 0) ? 1.02 : (i % 3 == 1 ? 0.99 : 1.005);
  }
  const auto prices = s.write("p.csv", csv.str());
  REQUIRE(call({"ingest", "--prices", prices, "--stride", "1", "--n-max", "4", "--out", s.path("i.json")}).code == 0);
  const auto ingested = cli::read_json_file(s.path("i.json"));
  CHECK(ingested["outputs"]["windows"] == 40);
  // the fit may or may not be valid for this series; it must read the report either way
  const auto fitted = call({"fit", "--moments", s.path("i.json"), "--g", "2", "--anchor", "1000"});
  CHECK(fitted.err.find("ParseError") == std::string::npos);

  const auto params = s.write("q.json", kWorkedParams);
  REQUIRE(call({"simulate", "--params", params, "--t", "3", "--paths", "5000", "--seed", "77", "--n-max", "3",
                "--out", s.path("s.json")})
              .code == 0);
  REQUIRE(call({"moments", "--params", params, "--t", "3.7", "--n-max", "3", "--out", s.path("f.json")}).code == 0);
  for (const auto* name : {"i.json", "s.json", "f.json"}) {
    const auto original = cli::read_json_file(s.path(name));
    REQUIRE(call({"rerun", "--report", s.path(name), "--out", s.path("again.json")}).code == 0);
    const auto again = cli::read_json_file(s.path("again.json"));
    CHECK(again["outputs"] == original["outputs"]);
    CHECK(again["inputs"] == original["inputs"]);
  }
}

TEST_CASE("binary end to end") {
  Scratch s;
  const auto params = s.write("p.json", kWorkedParams);
  const std::string cmd = std::string(BULLBEAR_CLI_PATH) + " moments --params " + params +
                          " --t 2 --n-max 2 --out " + s.path("out.json");
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(cli::read_json_file(s.path("out.json"))["outputs"]["moments"].size() == 2);
  const std::string bad = std::string(BULLBEAR_CLI_PATH) + " fit --moments " + params + " --g 2 --anchor 5 2>/dev/null";
  CHECK(std::system(bad.c_str()) != 0);
}
