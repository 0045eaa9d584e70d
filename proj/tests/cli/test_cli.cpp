#include <gtest/gtest.h>

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "spinthermo/degenerate.hpp"
#include "spinthermo/enumerate.hpp"
#include "spinthermo/serialize.hpp"
#include "spinthermo_cli/cli.hpp"

namespace fs = std::filesystem;
using spinthermo::Json;

namespace {

const fs::path kSource = SPINTHERMO_SOURCE_DIR;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;

  fs::path archive() const {
    std::smatch m;
    if (!std::regex_search(out, m, std::regex("archive: (.+)\n"))) return {};
    return m[1].str();
  }
  double value(const std::string& key) const {
    std::smatch m;
    if (!std::regex_search(out, m, std::regex(key + R"(\s*= (\S+))"))) return NAN;
    return spinthermo::parse_double(m[1].str());
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Json load(const fs::path& p) { return Json::parse(slurp(p)); }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / ("spinthermo-cli-" + std::to_string(::getpid()) + "-" + info->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
    ::setenv("SPINTHERMO_OUT", (root_ / "env").c_str(), 1);
  }
  void TearDown() override {
    ::unsetenv("SPINTHERMO_OUT");
    fs::remove_all(root_);
  }

  Outcome call(std::vector<std::string> args) {
    Outcome o;
    std::ostringstream out, err;
    o.code = spinthermo::cli::run(args, out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
  }

  fs::path write(const std::string& name, const Json& j) {
    const fs::path p = root_ / name;
    std::ofstream(p) << j.dump(2);
    return p;
  }

  fs::path root_;
};

Json small_direct_config(int n, int steps) {
  return Json::parse(R"({"schema_version": 1, "name": "small", "space": {"kind": "direct", "n_spins": )" +
                     std::to_string(n) + R"(}, "optimizer": {"steps": )" + std::to_string(steps) +
                     R"(, "learning_rate": 0.01, "restarts": 3, "seed": 11}})");
}

}  // namespace

TEST_F(Cli, TripwireNeverFiresOnShippedModels) {
  int seen = 0;
  for (const auto& e : fs::directory_iterator(kSource / "models")) {
    if (e.path().extension() != ".json") continue;
    auto o = call({"evaluate", e.path().string(), "--threads", "2"});
    EXPECT_EQ(o.code, 0) << e.path() << "\n" << o.err;
    ++seen;
  }
  EXPECT_GE(seen, 5);
}

TEST_F(Cli, ZeroModelHasZeroHeatCapacity) {
  auto o = call({"evaluate", (kSource / "models/zero_n4.json").string()});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.value("C"), 0.0);
  EXPECT_NEAR(o.value("ln Z"), 4 * std::log(2.0), 1e-15);
}

TEST_F(Cli, StarTwelveAgreesAcrossMethods) {
  const auto model = (kSource / "models/star_n12.json").string();
  auto a = call({"evaluate", model, "--method", "analytic"});
  auto e = call({"evaluate", model, "--method", "enumerate"});
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(e.code, 0);
  EXPECT_TRUE(oracle::rel_close(a.value("C"), e.value("C"), 1e-10));
  EXPECT_TRUE(oracle::rel_close(a.value("ln Z"), e.value("ln Z"), 1e-10));
}

TEST_F(Cli, StarSevenSitsInsideTheDegenerateSandwich) {
  auto o = call({"evaluate", (kSource / "models/star_n7.json").string()});
  ASSERT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("cross-checked"), std::string::npos);
  EXPECT_GE(o.value("C"), spinthermo::c_opt(64));
  EXPECT_LE(o.value("C"), spinthermo::c_opt(128));
}

TEST_F(Cli, SpectrumExportMatchesEnumeration) {
  const auto path = root_ / "spec.json";
  auto o = call({"evaluate", (kSource / "models/generic_triangle.json").string(), "--spectrum", path.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  auto s = spinthermo::spectrum_from_json(load(path));
  std::uint64_t total = 0;
  for (const auto& l : s.levels()) total += l.degeneracy;
  EXPECT_EQ(total, 8u);
}

TEST_F(Cli, AnalyticMethodRefusedForGenericModel) {
  auto o = call({"evaluate", (kSource / "models/generic_triangle.json").string(), "--method", "analytic"});
  EXPECT_EQ(o.code, spinthermo::cli::kExitValidation);
}

TEST_F(Cli, LargeClosedFormModelSkipsEnumeration) {
  auto o = call({"evaluate", (kSource / "models/star_n40.json").string()});
  ASSERT_EQ(o.code, 0) << o.err;
  auto e = call({"evaluate", (kSource / "models/star_n40.json").string(), "--method", "enumerate"});
  EXPECT_EQ(e.code, spinthermo::cli::kExitValidation);
}

TEST_F(Cli, ConfigValidation) {
  auto j = small_direct_config(3, 10);
  j["surprise"] = 1;
  EXPECT_EQ(call({"optimize", write("a.json", j).string()}).code, spinthermo::cli::kExitValidation);
  j = small_direct_config(3, 10);
  j.erase("schema_version");
  EXPECT_EQ(call({"optimize", write("b.json", j).string()}).code, spinthermo::cli::kExitValidation);
  j = small_direct_config(3, 10);
  j["optimizer"]["momentum"] = 0.9;
  EXPECT_EQ(call({"optimize", write("c.json", j).string()}).code, spinthermo::cli::kExitValidation);
  j = small_direct_config(3, 10);
  j["space"]["topology"] = "torus";
  EXPECT_EQ(call({"optimize", write("d.json", j).string()}).code, spinthermo::cli::kExitValidation);
  EXPECT_EQ(call({"optimize", (root_ / "missing.json").string()}).code, spinthermo::cli::kExitValidation);
  EXPECT_EQ(call({"reproduce", "table9"}).code, spinthermo::cli::kExitValidation);
  EXPECT_EQ(call({"frobnicate"}).code, spinthermo::cli::kExitValidation);
}

TEST_F(Cli, ZeroStepsRecordsTheInitialEvaluation) {
  Json j = Json::parse(R"({"schema_version": 1, "name": "zero-steps",
    "space": {"kind": "direct", "topology": "ring", "n_spins": 4},
    "optimizer": {"steps": 0, "init": {"type": "explicit", "theta": [0.3, -0.2, 0.5, 0.1, 0.7, -0.4, 0.2, 0.9]}}})");
  auto o = call({"optimize", write("z.json", j).string(), "--out", (root_ / "flag").string()});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto dir = o.archive();
  EXPECT_EQ(dir.parent_path(), root_ / "flag");
  for (const char* f : {"config.json", "result.json", "log.txt", "curves/trajectory.csv"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  auto r = load(dir / "result.json");
  std::vector<double> theta = j["optimizer"]["init"]["theta"];
  spinthermo::SpinHamiltonian hm(spinthermo::Topology::ring(4));
  const double expect = spinthermo::enumerate_stats(hm.with_parameters(theta), 1.0).heat_capacity;
  EXPECT_DOUBLE_EQ(r["best"]["c"].get<double>(), expect);
  EXPECT_EQ(r["best"]["theta"].get<std::vector<double>>(), theta);
  EXPECT_EQ(r["config"], load(dir / "config.json"));
}

TEST_F(Cli, ArchiveRootFollowsEnvironment) {
  auto o = call({"optimize", write("s.json", small_direct_config(3, 5)).string()});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.archive().parent_path(), root_ / "env");
}

TEST_F(Cli, RerunFromArchivedConfigIsByteIdentical) {
  auto first = call({"optimize", write("r.json", small_direct_config(5, 300)).string(), "--threads", "1"});
  ASSERT_EQ(first.code, 0) << first.err;
  auto again = call({"rerun", (first.archive() / "config.json").string(), "--threads", "3"});
  ASSERT_EQ(again.code, 0) << again.err;
  EXPECT_NE(first.archive(), again.archive());
  EXPECT_EQ(slurp(first.archive() / "result.json"), slurp(again.archive() / "result.json"));
  EXPECT_EQ(slurp(first.archive() / "config.json"), slurp(again.archive() / "config.json"));
}

TEST_F(Cli, SeedFlagIsEchoedIntoTheConfig) {
  auto o = call({"optimize", write("s.json", small_direct_config(3, 5)).string(), "--seed", "99", "--beta", "0.5"});
  ASSERT_EQ(o.code, 0) << o.err;
  auto cfg = load(o.archive() / "config.json");
  EXPECT_EQ(cfg["optimizer"]["seed"].get<int>(), 99);
  EXPECT_EQ(cfg["beta"].get<double>(), 0.5);
}

TEST_F(Cli, DirectFourSpinsGivesAllToAll) {
  auto o = call({"optimize", (kSource / "configs/appA1_n4.json").string()});
  ASSERT_EQ(o.code, 0) << o.err;
  auto r = load(o.archive() / "result.json");
  EXPECT_EQ(r["structure"]["label"], "all-to-all");
  EXPECT_NEAR(std::abs(r["structure"]["params"]["field"].get<double>()), 0.377, 0.002);
  EXPECT_NEAR(std::abs(r["structure"]["params"]["coupling"].get<double>()), 0.377, 0.002);
}

TEST_F(Cli, TiedConfigReportsFamilyParameters) {
  auto o = call({"optimize", (kSource / "configs/tied_star_n12.json").string()});
  ASSERT_EQ(o.code, 0) << o.err;
  auto r = load(o.archive() / "result.json");
  EXPECT_NEAR(r["best"]["family_params"]["a"].get<double>(), 18.297, 0.005);
  EXPECT_NEAR(r["best"]["family_params"]["b"].get<double>(), 2.033, 0.005);
  EXPECT_EQ(r["structure"]["label"], "star");
}

TEST_F(Cli, ChimeraThreeUnitsNeedsLongFlag) {
  auto o = call({"chimera", "--units", "3", "--steps", "10"});
  EXPECT_EQ(o.code, spinthermo::cli::kExitRefused);
  EXPECT_NE(o.err.find("estimated"), std::string::npos);
  EXPECT_FALSE(fs::exists(root_ / "env"));
  EXPECT_EQ(call({"chimera", "--units", "4"}).code, spinthermo::cli::kExitValidation);
}

TEST_F(Cli, ChimeraOneUnitMatchesTheTiedOracle) {
  auto o = call({"chimera", "--units", "1"});
  ASSERT_EQ(o.code, 0) << o.err;
  auto r = load(o.archive() / "result.json");
  EXPECT_LT(std::abs(r["chimera"]["oracle"]["relative_gap"].get<double>()), 0.01);
  EXPECT_EQ(r["structure"]["label"], "star-chain m=3 embedding");
}

TEST_F(Cli, TableTwoCsvRoundTripsLosslessly) {
  auto o = call({"reproduce", "table2"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto dir = o.archive();
  int curves = 0;
  for (const auto& e : fs::directory_iterator(dir / "curves")) {
    if (e.path().extension() != ".csv") continue;
    ++curves;
    auto c = spinthermo::read_curve_csv_file(e.path().string());
    std::ostringstream os;
    spinthermo::write_curve_csv(os, c);
    EXPECT_EQ(os.str(), slurp(e.path())) << e.path();
    auto side = e.path();
    side.replace_extension(".provenance.json");
    EXPECT_TRUE(load(side).contains("method"));
  }
  EXPECT_EQ(curves, 10);
  auto a = spinthermo::read_curve_csv_file((dir / "curves/star_unconstrained_a.csv").string());
  EXPECT_EQ(a.points.size(), 23u);
  EXPECT_NEAR(a.points.back().value, 85.001, 0.005);
}

TEST_F(Cli, FigureOneEmitsTheFourCurves) {
  auto o = call({"reproduce", "fig1", "--n-max", "10"});
  ASSERT_EQ(o.code, 0) << o.err;
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(o.archive() / "curves"))
    if (e.path().extension() == ".csv") names.insert(e.path().stem().string());
  EXPECT_EQ(names, (std::set<std::string>{"c_opt", "ising_1d", "non_interacting", "star"}));
}

TEST_F(Cli, BoundedFigureRunsAtReducedSize) {
  auto o = call({"reproduce", "fig9", "--n-max", "5", "--steps", "100"});
  ASSERT_EQ(o.code, 0) << o.err;
  auto c = spinthermo::read_curve_csv_file((o.archive() / "curves/bounded_c1.csv").string());
  ASSERT_EQ(c.points.size(), 3u);
  for (const auto& p : c.points) EXPECT_LE(p.value, spinthermo::c_opt_spins(int(p.n)) + 1e-9);
}
