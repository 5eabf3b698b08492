#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "distloc/cli.hpp"
#include "distloc/io.hpp"

using namespace distloc;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

const std::vector<std::string> kSmallBudget = {"--trials", "20", "--refine-steps", "5",
                                               "--k-max", "2", "--lambda-max", "2",
                                               "--threads", "1"};

std::vector<std::string> with_budget(std::vector<std::string> args) {
  args.insert(args.end(), kSmallBudget.begin(), kSmallBudget.end());
  return args;
}

}  // namespace

TEST_CASE("build-family prints the instance") {
  const Result r = invoke({"build-family", "--family", "max-lb", "--param", "lambda=3"});
  REQUIRE(r.code == cli::kOk);
  const json doc = json::parse(r.out);
  CHECK(doc.at("lambda") == 3);
  CHECK(doc.at("districts") == json::parse("[[-1,-1,-1],[1,1,1]]"));

  CHECK(invoke({"build-family", "--family", "nope"}).code == cli::kUsageError);
  CHECK(invoke({"build-family", "--family", "som-I2", "--param", "alpha=3", "--param",
                "beta=2"})
            .code == cli::kValidationFailure);
}

TEST_CASE("evaluate reads an instance file") {
  const std::string path =
      write_temp("distloc_cli_i1.json", R"({"lambda": 2, "districts": [[0, 1], [0.5, 0.5]]})");
  const Result r = invoke({"evaluate", "--instance", path, "--mechanism", "median_of_midpoints",
                           "--objective", "sum-of-max"});
  REQUIRE(r.code == cli::kOk);
  const json doc = json::parse(r.out);
  CHECK(doc.at("distortion") == 1);
  CHECK(doc.at("winner") == 0.5);

  const Result csv = invoke({"evaluate", "--instance", path, "--mechanism",
                             "median-of-midpoints", "--objective", "sum_of_max", "--format",
                             "csv"});
  CHECK(csv.code == cli::kOk);
  CHECK(csv.out.find("median_of_midpoints,sum-of-max,0.5") != std::string::npos);
}

TEST_CASE("usage and validation errors") {
  const std::string path =
      write_temp("distloc_cli_ok.json", R"({"lambda": 1, "districts": [[0], [1]]})");
  const Result mech = invoke({"evaluate", "--instance", path, "--mechanism", "nope",
                              "--objective", "sum"});
  CHECK(mech.code == cli::kUsageError);
  CHECK(mech.err.find("median-of-medians") != std::string::npos);

  const Result obj = invoke({"evaluate", "--instance", path, "--mechanism",
                             "median_of_medians", "--objective", "median"});
  CHECK(obj.code == cli::kUsageError);
  CHECK(obj.err.find("max-of-sum") != std::string::npos);

  const std::string bad =
      write_temp("distloc_cli_bad.json", R"({"lambda": 2, "districts": [[0, 1], [2]]})");
  CHECK(invoke({"evaluate", "--instance", bad, "--mechanism", "median_of_medians",
                "--objective", "sum"})
            .code == cli::kValidationFailure);
  CHECK(invoke({"evaluate", "--instance", "/nonexistent.json", "--mechanism",
                "median_of_medians", "--objective", "sum"})
            .code == cli::kValidationFailure);

  CHECK(invoke({"frobnicate"}).code == cli::kUsageError);
  CHECK(invoke({"search", "--objective", "sum"}).code == cli::kUsageError);
  CHECK(invoke({"--help"}).code == cli::kOk);
}

TEST_CASE("reproduce-table with a small budget") {
  const Result r = invoke(with_budget({"reproduce-table"}));
  CHECK(r.code == cli::kOk);
  std::istringstream in(r.out);
  const auto rows = io::read_table_csv(in);
  CHECK(rows.size() == 7);
  for (const auto& row : rows) CHECK(row.pass);

  CHECK(invoke(with_budget({"reproduce-table"})).out == r.out);

  const Result j = invoke(with_budget({"reproduce-table", "--format", "json"}));
  CHECK(j.code == cli::kOk);
  CHECK(json::parse(j.out).size() == 7);
}

TEST_CASE("search honours the seed from the environment") {
  const auto args = with_budget({"search", "--mechanism", "arbitrary_of_avg", "--objective",
                                 "max-of-sum", "--no-families"});
  ::setenv("DISTLOC_SEED", "17", 1);
  const Result from_env = invoke(args);
  ::unsetenv("DISTLOC_SEED");
  auto explicit_args = args;
  explicit_args.insert(explicit_args.end(), {"--seed", "17"});
  const Result explicit_seed = invoke(explicit_args);
  const Result default_seed = invoke(args);

  REQUIRE(from_env.code == cli::kOk);
  CHECK(json::parse(from_env.out).at("seed") == 17);
  CHECK(from_env.out == explicit_seed.out);
  CHECK(json::parse(default_seed.out).at("seed") == 0);
}

TEST_CASE("sp-audit reports witnesses") {
  const std::string path =
      write_temp("distloc_cli_sp.json", R"({"lambda": 2, "districts": [[0, 10]]})");
  const Result r = invoke({"sp-audit", "--mechanism", "arbitrary_of_avg", "--instance", path});
  REQUIRE(r.code == cli::kOk);
  const json doc = json::parse(r.out);
  CHECK_FALSE(doc.at("manipulation").is_null());
  CHECK(doc.at("complete") == false);

  const Result clean = invoke({"sp-audit", "--mechanism", "qstat-of-pstat:p=1,q=2",
                               "--instances", "20", "--k", "3", "--lambda", "3"});
  REQUIRE(clean.code == cli::kOk);
  const json c = json::parse(clean.out);
  CHECK(c.at("manipulation").is_null());
  CHECK(c.at("instances_checked") == 20);
  CHECK(c.at("complete") == true);
}

TEST_CASE("output goes to a file when asked") {
  const auto path = std::filesystem::temp_directory_path() / "distloc_cli_out.json";
  std::filesystem::remove(path);
  const Result r =
      invoke({"build-family", "--family", "som-I1", "--output", path.string()});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.empty());
  std::ifstream in(path);
  CHECK(json::parse(in).at("lambda") == 2);
}
