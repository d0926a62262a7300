#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pmelab/cli.hpp"

using namespace pme;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run_command(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("spectrum subcommand: schema, first row, determinism") {
  const auto r = invoke({"spectrum", "--m", "2", "--dim", "1", "--lmax", "1",
                         "--kmax", "2"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  REQUIRE(header == "ell,k,lambda,multiplicity,degree");
  REQUIRE(first == "1,0,1,1,1");

  const auto again = invoke({"spectrum", "--m", "2", "--dim", "1", "--lmax", "1",
                             "--kmax", "2"});
  REQUIRE(again.out == r.out);  // byte-identical
}

TEST_CASE("spectrum JSON round-trips the table") {
  const auto r = invoke({"spectrum", "--m", "1.5", "--dim", "2", "--lmax", "3",
                         "--kmax", "1", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::ordered_json::parse(r.out);
  const Parameters p(1.5, 2);
  const auto table = spectrum_table(p, 3, 1);
  REQUIRE(doc.size() == table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    REQUIRE(doc[i]["ell"].get<int>() == table[i].ell);
    REQUIRE(doc[i]["k"].get<int>() == table[i].k);
    REQUIRE(doc[i]["lambda"].get<double>() == table[i].lambda);
    REQUIRE(doc[i]["multiplicity"].get<long long>() == table[i].multiplicity);
  }
}

TEST_CASE("spectrum with no admissible modes emits a header-only CSV") {
  const auto r = invoke({"spectrum", "--m", "2", "--dim", "2", "--lmax", "0",
                         "--kmax", "0"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out == "ell,k,lambda,multiplicity,degree\n");
}

TEST_CASE("crossings: the first level crossing sits at N(m-1)=1") {
  const auto r = invoke({"crossings", "--dim", "3", "--l1", "3", "--k1", "0",
                         "--l2", "0", "--k2", "1"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::ordered_json::parse(r.out);
  REQUIRE(doc["crossing_m"].get<double>() == 1.0 + 1.0 / 3.0);

  const auto none = invoke({"crossings", "--dim", "2", "--l1", "1", "--k1", "0",
                            "--l2", "2", "--k2", "0"});
  REQUIRE(none.code == 0);
  REQUIRE(nlohmann::ordered_json::parse(none.out)["crossing_m"].is_null());
}

TEST_CASE("validation failures exit with code 1") {
  REQUIRE(invoke({"spectrum", "--m", "0.5", "--dim", "1", "--lmax", "1",
                  "--kmax", "1"}).code == 1);
  REQUIRE(invoke({"spectrum", "--m", "2", "--dim", "0", "--lmax", "1",
                  "--kmax", "1"}).code == 1);
  const auto unknown = invoke({"no-such-command"});
  REQUIRE(unknown.code == 1);
  REQUIRE_FALSE(unknown.err.empty());
  const auto badflag = invoke({"spectrum", "--m", "2", "--dim", "1", "--lmax",
                               "1", "--kmax", "1", "--bogus", "3"});
  REQUIRE(badflag.code == 1);
  REQUIRE(badflag.err.find("Usage") != std::string::npos);
  REQUIRE(invoke({"simulate", "--m", "2", "--dim", "2", "--mode", "translation",
                  "--amplitude", "0.05", "--tmax", "0.1"}).code == 1);
}

TEST_CASE("unwritable output path exits with code 2") {
  const auto r = invoke({"spectrum", "--m", "2", "--dim", "1", "--lmax", "1",
                         "--kmax", "1", "--out", "/nonexistent-dir/x/y.csv"});
  REQUIRE(r.code == 2);
}

TEST_CASE("eigenfunction subcommand emits the documented columns") {
  const auto r = invoke({"eigenfunction", "--m", "2", "--dim", "2", "--l", "0",
                         "--k", "1", "--samples", "11"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  REQUIRE(header == "r,f,delta_rho");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  REQUIRE(rows == 11);
}

TEST_CASE("verify-eigensolve reports rows and convergence") {
  const auto r = invoke({"verify-eigensolve", "--m", "2", "--dim", "1", "--l", "1",
                         "--elements", "16", "--degree", "3", "--count", "3",
                         "--format", "json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::ordered_json::parse(r.out);
  REQUIRE(doc["converged"].get<bool>());
  REQUIRE(doc["rows"].size() == 3);
  for (const auto& row : doc["rows"])
    REQUIRE(row["rel_error"].get<double>() <= 1e-3);
}

TEST_CASE("simulate with s=0 is flagged as stationary") {
  const auto r = invoke({"simulate", "--m", "2", "--dim", "1", "--mode",
                         "dilation", "--amplitude", "0", "--tmax", "0.2",
                         "--cells", "64", "--observe-every", "0.05"});
  REQUIRE(r.code == 0);
  REQUIRE(r.err.find("no decay (stationary)") != std::string::npos);
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  REQUIRE(header == "t_hat,d_L1,d_weightedL2,d_W2");
}

TEST_CASE("simulate writes a manifest with fit metadata") {
  const std::string path = "/tmp/pmelab_test_manifest.json";
  std::filesystem::remove(path);
  const auto r = invoke({"simulate", "--m", "2", "--dim", "1", "--mode",
                         "translation", "--amplitude", "0.05", "--tmax", "0.8",
                         "--cells", "128", "--observe-every", "0.05",
                         "--manifest", path});
  REQUIRE(r.code == 0);
  std::ifstream in(path);
  REQUIRE(in.good());
  const auto doc = nlohmann::ordered_json::parse(in);
  REQUIRE(doc["mode"] == "translation");
  REQUIRE(doc["fit"]["status"] == "ok");
  REQUIRE(doc["fit"]["rate"].get<double>() > 0.5);
  REQUIRE(doc["mass_drift"].get<double>() <= 1e-10);
  std::filesystem::remove(path);
}

TEST_CASE("check-hardy emits a bounded seeded report") {
  const auto r = invoke({"check-hardy", "--m", "2", "--dim", "2", "--p", "2",
                         "--samples", "25", "--seed", "9"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::ordered_json::parse(r.out);
  REQUIRE(doc["all_finite"].get<bool>());
  REQUIRE(doc["seed"].get<int>() == 9);
  REQUIRE(doc["max_ratio"].get<double>() > 0.0);
  const auto again = invoke({"check-hardy", "--m", "2", "--dim", "2", "--p", "2",
                             "--samples", "25", "--seed", "9"});
  REQUIRE(again.out == r.out);
}

TEST_CASE("poisson subcommand reports the manufactured error") {
  const auto r = invoke({"poisson", "--m", "1.5", "--dim", "2", "--l", "1",
                         "--manufactured", "--elements", "32"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::ordered_json::parse(r.out);
  REQUIRE(doc["l2_error"].get<double>() <= 1e-4);
}

TEST_CASE("thread cap honors PME_LAB_THREADS") {
  setenv("PME_LAB_THREADS", "3", 1);
  REQUIRE(thread_cap() == 3);
  setenv("PME_LAB_THREADS", "0", 1);
  REQUIRE(thread_cap() >= 1);
  unsetenv("PME_LAB_THREADS");
  REQUIRE(thread_cap() >= 1);
}

TEST_CASE("radial fields serialize to CSV and JSON") {
  const RadialField f({0.0, 0.5, 1.0}, {0.25, 0.1875, 0.0}, FieldKind::density);
  REQUIRE(f.to_csv() == "r,value\n0,0.25\n0.5,0.1875\n1,0\n");
  const RadialField back = RadialField::from_json(f.to_json());
  REQUIRE(back.grid == f.grid);
  REQUIRE(back.values == f.values);
  REQUIRE(back.kind == f.kind);
}

TEST_CASE("csv quoting follows RFC rules") {
  REQUIRE(csv_escape("plain") == "plain");
  REQUIRE(csv_escape("with,comma") == "\"with,comma\"");
  REQUIRE(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
}
