#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "cesaro/cli.hpp"
#include "cesaro/config.hpp"
#include "cesaro/errors.hpp"

using namespace cesaro;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cesaro_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const Json& j, const std::string& name = "config.json") {
    const fs::path p = dir_ / name;
    write_text(p, j.dump(2));
    return p;
  }

  int run(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  static Json base() {
    return Json{{"version", 1},
                {"prototype", {{"boxes", Json::array({{{"lo", {0}}, {"hi", {"1/2"}}}})}}},
                {"model", "schrodinger"},
                {"K_sim", 3},
                {"N_max", 4},
                {"datum", {{"seed", 3}, {"decay", {{"kind", "power"}, {"p", 2}}}}}};
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

}  // namespace

TEST_F(CliTest, DesignDefaultGrid) {
  const auto cfg = write_config(base());
  const fs::path out = dir_ / "out";
  ASSERT_EQ(run({"design", "--config", cfg.string(), "--out", out.string(), "--check"}), kExitOk) << err_.str();
  const Json d = Json::parse(read_text(out / "design_K1.json"));
  EXPECT_LE(d.at("residual").get<double>(), 1e-10);
  EXPECT_EQ(d.at("atoms").size(), 5u);
  EXPECT_DOUBLE_EQ(d.at("L").get<double>(), 0.5);
}

TEST_F(CliTest, DesignSolveOnGrid) {
  Json j = base();
  j["design"] = {{"method", "solve"}, {"K", 1}};
  const auto cfg = write_config(j);
  ASSERT_EQ(run({"design", "--config", cfg.string(), "--out", (dir_ / "o").string(), "--check"}), kExitOk)
      << err_.str();
  const Json d = Json::parse(read_text(dir_ / "o" / "design_K1.json"));
  EXPECT_LE(d.at("residual").get<double>(), 1e-10);
  EXPECT_LE(d.at("atoms").size(), 10u);
}

TEST_F(CliTest, FullTorusSingleAtom) {
  Json j = base();
  j["prototype"] = "full";
  const auto cfg = write_config(j);
  ASSERT_EQ(run({"design", "--config", cfg.string(), "--out", dir_.string()}), kExitOk);
  EXPECT_EQ(Json::parse(read_text(dir_ / "design_K1.json")).at("atoms").size(), 1u);
}

TEST_F(CliTest, UnreachableToleranceExitsNumeric) {
  Json j = base();
  j["design"] = {{"method", "solve"}, {"candidates", "random"}, {"n_random", 8}, {"tol", 1e-20}, {"max_iter", 200}};
  const auto cfg = write_config(j);
  EXPECT_EQ(run({"design", "--config", cfg.string(), "--out", dir_.string()}), kExitNumeric);
  EXPECT_NE(err_.str().find("design infeasible"), std::string::npos);
}

TEST_F(CliTest, ConfigErrorsNameTheField) {
  Json j = base();
  j["design"] = {{"tolerance", 1}};
  auto cfg = write_config(j);
  EXPECT_EQ(run({"design", "--config", cfg.string()}), kExitConfig);
  EXPECT_NE(err_.str().find("/design/tolerance"), std::string::npos) << err_.str();

  j = base();
  j["version"] = 2;
  cfg = write_config(j);
  EXPECT_EQ(run({"calibrate", "--config", cfg.string()}), kExitConfig);
  EXPECT_NE(err_.str().find("/version"), std::string::npos);

  j = base();
  j["window"] = {{"stride", 1}, {"max", 3}};
  cfg = write_config(j);
  EXPECT_EQ(run({"experiment", "--config", cfg.string()}), kExitConfig);
  EXPECT_NE(err_.str().find("K_sim"), std::string::npos);

  j = base();
  j["schedule"] = {{"epsilon", 0.6}};
  cfg = write_config(j);
  EXPECT_EQ(run({"schedule", "--config", cfg.string()}), kExitConfig);
  EXPECT_NE(err_.str().find("/schedule/epsilon"), std::string::npos);
}

TEST_F(CliTest, SyntaxErrorReportsLine) {
  const fs::path p = dir_ / "bad.json";
  write_text(p, "{\n  \"version\": 1,\n  \"model\": ,\n}\n");
  EXPECT_EQ(run({"design", "--config", p.string()}), kExitConfig);
  EXPECT_NE(err_.str().find("line 3"), std::string::npos) << err_.str();
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({"design"}), kExitConfig);
  EXPECT_EQ(run({"nonsense"}), kExitConfig);
  EXPECT_EQ(run({"design", "--config", (dir_ / "missing.json").string()}), kExitConfig);
  EXPECT_EQ(run({"--help"}), kExitOk);
}

TEST_F(CliTest, CalibrateWritesGramTable) {
  Json j = base();
  j["model"] = "klein_gordon";
  j["mass"] = 1;
  const auto cfg = write_config(j);
  ASSERT_EQ(run({"calibrate", "--config", cfg.string(), "--out", dir_.string(), "--check"}), kExitOk);
  const Json k = Json::parse(read_text(dir_ / "calibration.json"));
  EXPECT_EQ(k.at("gram").size(), 7u);
  EXPECT_LE(k.at("c_T0").get<double>(), k.at("C_T0").get<double>());
}

TEST_F(CliTest, ScheduleRowCap) {
  Json j = base();
  j["schedule"] = {{"epsilon", 0.01}, {"interval", 3}};
  j["output"] = {{"schedule_rows", 25}};
  const auto cfg = write_config(j);
  ASSERT_EQ(run({"schedule", "--config", cfg.string(), "--out", dir_.string(), "--check"}), kExitOk) << err_.str();
  const Json meta = Json::parse(read_text(dir_ / "schedule_m3.json"));
  EXPECT_TRUE(meta.at("truncated").get<bool>());
  EXPECT_EQ(meta.at("rows_written").get<int>(), 25);
  EXPECT_DOUBLE_EQ(meta.at("t0").get<double>(), 2.0);
}

TEST_F(CliTest, ExperimentSingleIntervalAndDeterminism) {
  Json j = base();
  j["N_max"] = 1;
  j["output"] = {{"schedule_rows", 0}};
  auto cfg = write_config(j);
  ASSERT_EQ(run({"experiment", "--config", cfg.string(), "--out", (dir_ / "a").string(), "--check"}), kExitOk)
      << err_.str();
  const auto rows = parse_series_csv(read_text(dir_ / "a" / "series.csv"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].A, rows[0].Q);

  j["N_max"] = 6;
  cfg = write_config(j);
  ASSERT_EQ(run({"experiment", "--config", cfg.string(), "--out", (dir_ / "b").string()}), kExitOk);
  ASSERT_EQ(run({"experiment", "--config", cfg.string(), "--out", (dir_ / "c").string(), "--threads", "3"}),
            kExitOk);
  EXPECT_EQ(read_text(dir_ / "b" / "series.csv"), read_text(dir_ / "c" / "series.csv"));
  EXPECT_NE(out_.str().find("final A_N/(L c_T0 E)"), std::string::npos);
}

TEST_F(CliTest, ContinuousSpeedTooLow) {
  Json j = base();
  j["schedule"] = {{"speeds", {0.5}}};
  const auto cfg = write_config(j);
  EXPECT_EQ(run({"continuous", "--config", cfg.string(), "--out", dir_.string()}), kExitNumeric);
  EXPECT_NE(err_.str().find("speed too low"), std::string::npos);
}

TEST_F(CliTest, ContinuousAndVerify) {
  Json j = base();
  j["schedule"] = {{"speeds", {100, 1000}}, {"epsilon", 0.05}};
  j["verify"] = {{"trials", 10}};
  const auto cfg = write_config(j);
  ASSERT_EQ(run({"continuous", "--config", cfg.string(), "--out", dir_.string(), "--check"}), kExitOk) << err_.str();
  EXPECT_TRUE(Json::parse(read_text(dir_ / "continuous.json")).at("monotone").get<bool>());
  ASSERT_EQ(run({"verify", "--config", cfg.string(), "--out", dir_.string()}), kExitOk) << err_.str();
  EXPECT_TRUE(Json::parse(read_text(dir_ / "verify.json")).at("realization_holds").get<bool>());
}

TEST(Config, RationalsAndDefaults) {
  const RunConfig c = parse_config_text(R"({"version": 1, "prototype": {"boxes": [{"lo": ["1/8"], "hi": [0.5]}]}})");
  EXPECT_DOUBLE_EQ(c.protocol.L(), 0.375);
  EXPECT_EQ(c.protocol.model, Model::schrodinger);
  EXPECT_EQ(c.protocol.K_sim, 8);
  EXPECT_THROW(parse_config_text(R"({"version": 1, "prototype": {"boxes": [{"lo": ["1/x"], "hi": [0.5]}]}})"),
               ConfigError);
  EXPECT_THROW(parse_config_text(R"({"version": 1, "space": {"dim": 3}})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"version": 1, "model": "heat"})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"model": "wave"})"), ConfigError);
}

TEST(Serialize, RoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 123456789.125})
    EXPECT_EQ(parse_real(format_real(x)), x);
  const auto d = equispaced_design(ModalBasis(TorusSpace(2), 1), PrototypeSet(TorusSpace(2), {Box{{0.1, 0.2}, {0.3, 0.9}}}));
  const auto back = design_from_json(Json::parse(to_json(d).dump()));
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t j = 0; j < d.size(); ++j) {
    EXPECT_EQ(back.atoms[j].shift, d.atoms[j].shift);
    EXPECT_EQ(back.atoms[j].weight, d.atoms[j].weight);
  }
  EXPECT_EQ(back.residual, d.residual);
}
