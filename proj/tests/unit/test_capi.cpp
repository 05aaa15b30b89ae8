#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <unistd.h>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bwkb/bwkb.h"
#include "oracles.hpp"

namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

const char* kHalf = R"({"kind": "high_contrast", "h": 0.5, "a2": 1.0})";
const char* kTwoPhase = R"({"kind": "two_phase", "h": 0.5, "a1": 100.0, "a2": 1.0})";

struct Medium {
  bwkb_medium* ptr = nullptr;
  explicit Medium(const char* json) { EXPECT_EQ(bwkb_medium_create(json, &ptr), BWKB_OK) << bwkb_last_error(); }
  ~Medium() { bwkb_medium_destroy(ptr); }
};

struct Branch {
  bwkb_branch* ptr = nullptr;
  Branch(const Medium& m, int n, int points) {
    EXPECT_EQ(bwkb_branch_create(m.ptr, n, points, &ptr), BWKB_OK) << bwkb_last_error();
  }
  ~Branch() { bwkb_branch_destroy(ptr); }
};

double f_half(double w) { return std::cos(w / 2) - (w / 4) * std::sin(w / 2); }

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("bwkb_capi_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(bwkb_version(), "0.1.0");
  EXPECT_STREQ(bwkb_status_name(BWKB_CAUSTIC), "caustic");
  EXPECT_STREQ(bwkb_status_name(BWKB_OK), "ok");
}

TEST(CApi, HighContrastFrequenciesMatchBisection) {
  Medium m(kHalf);
  double omega[3];
  ASSERT_EQ(bwkb_medium_frequencies(m.ptr, pi / 2, 3, omega), BWKB_OK) << bwkb_last_error();
  auto roots = oracle::dense_roots([](double w) { return f_half(w); }, 0.0, 20.0, 20001);
  // cos(pi / 2) = 0: the frequencies are the roots of f
  for (int n = 0; n < 3; ++n) EXPECT_NEAR(omega[n], roots.at(n), 1e-10);
  double lo, hi;
  ASSERT_EQ(bwkb_medium_band_edges(m.ptr, 0, &lo, &hi), BWKB_OK);
  EXPECT_EQ(lo, 0.0);
  EXPECT_NEAR(hi, oracle::bisect([](double w) { return f_half(w) + 1.0; }, pi, 1.5 * pi), 1e-10);
}

TEST(CApi, TwoPhaseFrequenciesMatchTransferMatrix) {
  Medium m(kTwoPhase);
  double omega[3];
  ASSERT_EQ(bwkb_medium_frequencies(m.ptr, 1.0, 3, omega), BWKB_OK) << bwkb_last_error();
  const std::vector<oracle::Layer> cell = {{0.5, 100.0}, {0.5, 1.0}};
  auto exact = oracle::bloch_frequencies([&](double w) { return oracle::layered_half_trace(cell, w); }, 1.0, 3, 1e-3);
  for (int n = 0; n < 3; ++n) EXPECT_NEAR(omega[n] / exact[n], 1.0, 1e-8) << n;
}

TEST(CApi, BranchJetAndNormalizedMode) {
  Medium m(kTwoPhase);
  Branch b(m, 1, 128);
  double jet[3], omega[2];
  ASSERT_EQ(bwkb_branch_jet(b.ptr, 0.0, 0.7, jet), BWKB_OK) << bwkb_last_error();
  ASSERT_EQ(bwkb_medium_frequencies(m.ptr, 0.7, 2, omega), BWKB_OK);
  EXPECT_NEAR(jet[0], omega[1], 1e-8);
  const int count = 4000;
  std::vector<double> y(count), re(count), im(count);
  for (int i = 0; i < count; ++i) y[i] = (i + 0.5) / count;
  ASSERT_EQ(bwkb_branch_mode(b.ptr, 0.0, 0.7, y.data(), y.size(), re.data(), im.data()), BWKB_OK);
  double norm = 0.0, mean_re = 0.0, mean_im = 0.0;
  for (int i = 0; i < count; ++i) {
    norm += (re[i] * re[i] + im[i] * im[i]) / count;
    mean_re += re[i] / count;
    mean_im += im[i] / count;
  }
  EXPECT_NEAR(norm, 1.0, 1e-6);
  // gauge: real positive cell mean
  EXPECT_GT(mean_re, 0.0);
  EXPECT_NEAR(mean_im, 0.0, 1e-6);
}

TEST(CApi, ErrorsCarryStatusAndMessage) {
  bwkb_medium* m = nullptr;
  EXPECT_EQ(bwkb_medium_create("{not json", &m), BWKB_SCHEMA);
  EXPECT_NE(std::string(bwkb_last_error()), "");
  EXPECT_EQ(m, nullptr);
  // out-of-range config values are schema errors
  EXPECT_EQ(bwkb_medium_create(R"({"kind": "high_contrast", "h": 1.5, "a2": 1})", &m), BWKB_SCHEMA);
  EXPECT_EQ(bwkb_medium_create(nullptr, &m), BWKB_INVALID_ARGUMENT);

  Medium cell(kTwoPhase);
  double lo, hi, omega;
  EXPECT_EQ(bwkb_medium_band_edges(cell.ptr, 0, &lo, &hi), BWKB_UNSUPPORTED);
  EXPECT_EQ(bwkb_medium_frequencies(cell.ptr, pi, 1, &omega), BWKB_INVALID_ARGUMENT);
  ASSERT_EQ(bwkb_medium_frequencies(cell.ptr, 0.5, 1, &omega), BWKB_OK);
  EXPECT_STREQ(bwkb_last_error(), "");
}

TEST(CApi, RunsBandsExperiment) {
  const fs::path out = scratch("bands");
  nlohmann::json config = {{"schema_version", 1},
                           {"command", "bands"},
                           {"output_dir", out.string()},
                           {"medium", nlohmann::json::parse(kHalf)},
                           {"n_max", 2}};
  ASSERT_EQ(bwkb_validate_config(config.dump().c_str()), BWKB_OK) << bwkb_last_error();
  int code = -1;
  char* result = nullptr;
  ASSERT_EQ(bwkb_run_experiment(config.dump().c_str(), &code, &result), BWKB_OK) << bwkb_last_error();
  auto r = nlohmann::json::parse(result);
  bwkb_free_string(result);
  EXPECT_EQ(code, 0);
  EXPECT_EQ(r["exit_code"], 0);
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_TRUE(fs::exists(out / "bands.csv"));
  fs::remove_all(out);
}

TEST(CApi, SchemaErrorsBecomeUsageExitCode) {
  nlohmann::json config = {{"schema_version", 1}, {"command", "bands"}};
  EXPECT_EQ(bwkb_validate_config(config.dump().c_str()), BWKB_SCHEMA);
  EXPECT_NE(std::string(bwkb_last_error()).find("output_dir"), std::string::npos);
  int code = -1;
  ASSERT_EQ(bwkb_run_experiment(config.dump().c_str(), &code, nullptr), BWKB_OK);
  EXPECT_EQ(code, 1);
}
