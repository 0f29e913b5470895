#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>

#include "pmvr/harness.hpp"

namespace pmvr {
namespace {

std::vector<RunSummary> desk(const std::string& experiment) {
  ReproduceRequest req;
  req.experiment = experiment;
  req.out_dir = (std::filesystem::temp_directory_path() / "pmvr_unit" / "reproduce").string();
  req.threads = 4;
  return reproduce(req);
}

// Recorded-run regression thresholds at desk scale; index 2 is the baseline.
TEST(ReproduceDesk, MatrixFrankWolfeGapDropsFivefold) {
  const auto start = std::chrono::steady_clock::now();
  const auto runs = desk("matrix");
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 120.0);
  ASSERT_EQ(runs.size(), 3u);
  for (std::size_t a = 0; a < 2; ++a) {
    const auto& agg = runs[a].aggregate;
    EXPECT_EQ(agg.front().runs, 10u);
    EXPECT_EQ(agg.back().iter, 2000u);
    EXPECT_LT(agg.back().fw_gap_mean, agg.front().fw_gap_mean / 5.0) << a;
  }
}

TEST(ReproduceDesk, MeanVarianceGradientMappingDropsTenfold) {
  const auto runs = desk("mv-portfolio");
  for (std::size_t a = 0; a < 2; ++a) {
    const auto& agg = runs[a].aggregate;
    EXPECT_LT(agg.back().grad_map_mean, agg.front().grad_map_mean / 10.0) << a;
  }
}

TEST(ReproduceDesk, MeanDeviationMakesProgress) {
  const auto runs = desk("md-portfolio");
  for (const auto& r : runs) EXPECT_LT(r.aggregate.back().fw_gap_mean, r.aggregate.front().fw_gap_mean);
}

}  // namespace
}  // namespace pmvr
