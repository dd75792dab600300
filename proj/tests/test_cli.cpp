// Copyright 2026 The Contention Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <json.hpp>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

const char* kCli = CONTENTION_CLI_PATH;

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("contention_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd =
      std::string(kCli) + " " + args + " 2>" + (scratch_dir() / "err").string();
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("table1 prints the homogeneous reference rows") {
  const fs::path out = scratch_dir() / "table1.csv";
  REQUIRE(run("table1 --n 3,10,100 --out " + out.string()) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.find("n,individual_payoff,utilization") != std::string::npos);
  CHECK(csv.find("3,0.14815,0.44444") != std::string::npos);
  CHECK(csv.find("10,0.03874,0.38742") != std::string::npos);
  CHECK(csv.find("100,0.00370,0.36973") != std::string::npos);
}

TEST_CASE("table2 reports all six columns per target") {
  const fs::path out = scratch_dir() / "table2.csv";
  REQUIRE(run("table2 --n 3 --out " + out.string()) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.find("target,n,average_payoff,aggregate_payoff,payoff_stddev,"
                 "utilization,nash_product,generalized_nash_product") !=
        std::string::npos);
  CHECK(csv.find("weighted,3,0.38889,1.16667,0.32710,0.47222") !=
        std::string::npos);
  CHECK(csv.find("symmetric,3,0.29630,0.88889,0.12096,0.44444") !=
        std::string::npos);
  CHECK(csv.find("egalitarian,3,0.25133") != std::string::npos);
}

TEST_CASE("region exports are deterministic byte for byte") {
  const fs::path a = scratch_dir() / "region_a.csv";
  const fs::path b = scratch_dir() / "region_b.csv";
  REQUIRE(run("region --mode base --k 1,1 --points 41 --out " + a.string()) ==
          0);
  REQUIRE(run("region --mode base --k 1,1 --points 41 --out " + b.string()) ==
          0);
  const std::string first = slurp(a);
  CHECK(first == slurp(b));
  CHECK(first.rfind("p_1,p_2,u_1,u_2\n", 0) == 0);

  const fs::path q = scratch_dir() / "region_q.csv";
  REQUIRE(run("region --mode quantized --k 1,1 --m 5 --out " + q.string()) ==
          0);
  // Header plus the 16 grid targets.
  const std::string qcsv = slurp(q);
  int lines = 0;
  for (char c : qcsv) lines += (c == '\n');
  CHECK(lines == 17);
}

TEST_CASE("dynamics command reproduces the adjustment trace") {
  const fs::path csv_out = scratch_dir() / "dyn.csv";
  REQUIRE(run("dynamics --k 1,1 --target 0.2,0.2 --start 0.8,0.9 --out " +
              csv_out.string()) == 0);
  CHECK(slurp(csv_out).rfind("t,c_t,g_level,p_1,p_2\n", 0) == 0);

  const fs::path out = scratch_dir() / "dyn.json";
  REQUIRE(run("dynamics --k 1,1 --target 0.2,0.2 --start 0.8,0.9 "
              "--format json --out " +
              out.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j.at("converged") == true);
  CHECK(j.at("hypotheses_hold") == true);
  const auto& step1 = j.at("steps")[1];
  CHECK(step1.at("c_t").get<double>() == doctest::Approx(5.0));
  CHECK(step1.at("p")[0].get<double>() == doctest::Approx(0.15));
  CHECK(step1.at("p")[1].get<double>() == doctest::Approx(0.2));
  const auto& step2 = j.at("steps")[2];
  CHECK(step2.at("c_t").get<double>() == doctest::Approx(1.75));
  CHECK(step2.at("p")[0].get<double>() == doctest::Approx(0.175));
}

TEST_CASE("simulate emits a reproducible estimate report") {
  const fs::path a = scratch_dir() / "sim_a.json";
  const fs::path b = scratch_dir() / "sim_b.json";
  const std::string args =
      "simulate --k 1,1,1 --p 0.333333,0.333333,0.333333 --slots 200000 "
      "--seed 9 --out ";
  REQUIRE(run(args + a.string()) == 0);
  REQUIRE(run(args + b.string()) == 0);
  CHECK(slurp(a) == slurp(b));

  const auto j = nlohmann::json::parse(slurp(a));
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(j.at("p_hat")[i].get<double>() - 1.0 / 3.0) < 0.01);
  }

  // A user transmitting always starves the estimator of idle slots.
  CHECK(run("simulate --k 1,1 --p 1.0,0.5 --slots 1000 --out " +
            (scratch_dir() / "sim_c.json").string()) == 4);
}

TEST_CASE("verify classifies the target pair as a Stackelberg equilibrium") {
  const fs::path out = scratch_dir() / "verify.json";
  REQUIRE(run("verify --k 1,1 --target 0.2,0.2 --phat 0.2,0.2 --out " +
              out.string()) == 0);
  auto j = nlohmann::json::parse(slurp(out));
  CHECK(j.at("stackelberg") == true);
  CHECK(j.at("g_at_phat") == 0.0);
  CHECK(j.at("verdict").at("class") == "target");

  REQUIRE(run("verify --k 1,1 --target 0.2,0.2 --phat 0.8,0.9 --out " +
              out.string()) == 0);
  j = nlohmann::json::parse(slurp(out));
  CHECK(j.at("stackelberg") == false);
  CHECK(j.at("verdict").at("class") == "second_class");
}

TEST_CASE("bad arguments exit with the validation code") {
  CHECK(run("table1 --n 0") == 2);
  CHECK(run("region --mode nonsense") != 0);
  CHECK(run("verify --k 1,1 --target 1.2,0.2") == 2);
}

TEST_CASE("config files supply defaults that flags override") {
  const fs::path cfg = scratch_dir() / "cfg.json";
  {
    std::ofstream f(cfg);
    f << R"({"n": "3", "format": "csv"})";
  }
  const fs::path out = scratch_dir() / "cfgd.csv";
  REQUIRE(run("--config " + cfg.string() + " table1 --out " + out.string()) ==
          0);
  std::string csv = slurp(out);
  CHECK(csv.find("3,0.14815") != std::string::npos);
  CHECK(csv.find("10,") == std::string::npos);

  // Explicit flag beats the file.
  REQUIRE(run("--config " + cfg.string() + " table1 --n 10 --out " +
              out.string()) == 0);
  csv = slurp(out);
  CHECK(csv.find("10,0.03874") != std::string::npos);
  CHECK(csv.find("3,0.14815") == std::string::npos);
}
