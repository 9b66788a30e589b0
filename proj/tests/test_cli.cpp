#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "hpl/image.hpp"
#include "hpl/point_cloud.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli_path() {
  const char* p = std::getenv("HPL_CLI");
  if (p == nullptr) {
    ADD_FAILURE() << "HPL_CLI environment variable not set";
    return {};
  }
  return p;
}

// Runs the CLI, returns its exit code.
int run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, Interp1dDeterministicUnderFixedSeed) {
  const fs::path a = fresh_dir("hpl_cli_a");
  const fs::path b = fresh_dir("hpl_cli_b");
  const std::string flags =
      " --n 80 --graph knn:6 --epochs 30 --tol 1e-6 --seed 42 --threads 1";
  ASSERT_EQ(run_cli("interp1d --out-dir " + a.string() + flags), 0);
  ASSERT_EQ(run_cli("interp1d --out-dir " + b.string() + flags), 0);
  EXPECT_EQ(slurp(a / "interp1d.csv"), slurp(b / "interp1d.csv"));
  EXPECT_EQ(slurp(a / "interp1d_metrics.json"),
            slurp(b / "interp1d_metrics.json"));
}

TEST(Cli, ConfigRoundTripReproducesOutputs) {
  const fs::path a = fresh_dir("hpl_cli_cfg_a");
  const fs::path b = fresh_dir("hpl_cli_cfg_b");
  ASSERT_EQ(run_cli("interp1d --out-dir " + a.string() +
                    " --n 60 --graph eps:0.1 --epochs 25 --seed 9"),
            0);
  const fs::path cfg = a / "interp1d_config.json";
  ASSERT_TRUE(fs::exists(cfg));
  ASSERT_EQ(run_cli("--config " + cfg.string() + " --out-dir " + b.string()),
            0);
  EXPECT_EQ(slurp(a / "interp1d.csv"), slurp(b / "interp1d.csv"));
  EXPECT_EQ(slurp(a / "interp1d_metrics.json"),
            slurp(b / "interp1d_metrics.json"));
}

TEST(Cli, FlagsOverrideConfigValues) {
  const fs::path a = fresh_dir("hpl_cli_ovr_a");
  const fs::path b = fresh_dir("hpl_cli_ovr_b");
  const fs::path c = fresh_dir("hpl_cli_ovr_c");
  ASSERT_EQ(run_cli("interp1d --out-dir " + a.string() +
                    " --n 60 --graph eps:0.1 --epochs 25 --seed 9"),
            0);
  // same config but a different seed must change the sampled cloud
  ASSERT_EQ(run_cli("--config " + (a / "interp1d_config.json").string() +
                    " --out-dir " + b.string() + " --seed 10"),
            0);
  EXPECT_NE(slurp(a / "interp1d.csv"), slurp(b / "interp1d.csv"));
  // and the override is recorded in the new dump
  ASSERT_EQ(run_cli("--config " + (b / "interp1d_config.json").string() +
                    " --out-dir " + c.string()),
            0);
  EXPECT_EQ(slurp(b / "interp1d.csv"), slurp(c / "interp1d.csv"));
}

TEST(Cli, InvalidFlagsFailFastWithCodeTwo) {
  const fs::path d = fresh_dir("hpl_cli_bad");
  EXPECT_EQ(run_cli("ssl --points /nope.csv"), 2);  // missing --labels
  EXPECT_EQ(run_cli("interp1d --graph bogus:1 --out-dir " + d.string()), 2);
  EXPECT_EQ(run_cli("nosuchcommand"), 2);
  EXPECT_EQ(run_cli("interp1d --weights exotic --out-dir " + d.string()), 2);
}

TEST(Cli, GammaCheckWritesScheduleRows) {
  const fs::path d = fresh_dir("hpl_cli_gamma");
  ASSERT_EQ(run_cli("gamma-check --out-dir " + d.string() +
                    " --point 300:0.1 --point 600:0.09 --seed 3"),
            0);
  const std::string csv = slurp(d / "gamma_check.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_EQ(run_cli("gamma-check --out-dir " + d.string()), 2);  // no points
}

TEST(Cli, ProxTestReportsCleanRun) {
  const fs::path d = fresh_dir("hpl_cli_prox");
  const fs::path out = d / "prox.json";
  ASSERT_EQ(run_cli("prox-test --instances 200 --seed 11 --out-dir " +
                    d.string() + " --out " + out.string()),
            0);
  const json j = json::parse(slurp(out));
  EXPECT_EQ(j["instances"], 200);
  EXPECT_EQ(j["failures"], 0);
  EXPECT_LE(j["max_residual"].get<double>(), 1e-9);
}

TEST(Cli, SslOnTinyClustersIsPerfect) {
  const fs::path d = fresh_dir("hpl_cli_ssl");
  {
    std::ofstream pts(d / "points.csv");
    for (double x : {0.0, 0.01, 0.02, 1.0, 1.01, 1.02}) pts << x << "\n";
    std::ofstream lab(d / "labels.csv");
    lab << "0,0\n3,1\n";
    std::ofstream truth(d / "truth.csv");
    truth << "0,0\n1,0\n2,0\n3,1\n4,1\n5,1\n";
  }
  ASSERT_EQ(run_cli("ssl --points " + (d / "points.csv").string() +
                    " --labels " + (d / "labels.csv").string() + " --truth " +
                    (d / "truth.csv").string() +
                    " --graph knn:3 --weights homogeneous --method hpl"
                    " --epochs 200 --out-dir " +
                    d.string()),
            0);
  const json m = json::parse(slurp(d / "ssl_metrics.json"));
  EXPECT_DOUBLE_EQ(m["accuracy"].get<double>(), 1.0);
  const std::string preds = slurp(d / "predictions.csv");
  EXPECT_NE(preds.find("0,0"), std::string::npos);
  EXPECT_NE(preds.find("5,1"), std::string::npos);
}

TEST(Cli, InpaintFullyObservedReproducesImage) {
  const fs::path d = fresh_dir("hpl_cli_inpaint");
  hpl::ImageGrid img(16, 16);
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 16; ++j)
      img.at(i, j) = (i + 2 * j) / 48.0;
  const fs::path in_pgm = d / "input.pgm";
  hpl::save_pgm(img, in_pgm);
  const fs::path out_pgm = d / "restored.pgm";
  ASSERT_EQ(run_cli("inpaint --image " + in_pgm.string() +
                    " --sample-rate 1.0 --method gpl --s1 3 --s2 3 --knn 4"
                    " --K 1 --epochs 10 --out " +
                    out_pgm.string() + " --out-dir " + d.string() +
                    " --reference " + in_pgm.string()),
            0);
  EXPECT_EQ(slurp(in_pgm), slurp(out_pgm));
  const json m = json::parse(slurp(d / "inpaint_metrics.json"));
  EXPECT_DOUBLE_EQ(m["psnr_db"].get<double>(), 99.0);  // capped sentinel
  // both mask sources at once is a validation error
  EXPECT_EQ(run_cli("inpaint --image " + in_pgm.string() +
                    " --sample-rate 0.5 --mask /nope.csv --out-dir " +
                    d.string()),
            2);
}
