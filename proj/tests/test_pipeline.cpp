#include <gtest/gtest.h>

#include "gchain/errors.hpp"
#include "gchain/pipeline.hpp"

using namespace gchain;

namespace {

PipelineOptions small_options() {
  PipelineOptions o;
  o.profile_horizon = 64;
  o.dbar_horizon = 12;
  o.K_sweep = {1, 2, 4, 8};
  o.depth = 24;
  o.trajectories = 1500;
  o.seed = 17;
  o.tail_len = 64;
  o.compare_from = 12;
  return o;
}

}  // namespace

TEST(AdversarialTails, OppositeSignsForLongRange) {
  const GModel m = GModel::long_range_linear(Alphabet::binary(), 0.25, power_law_with_mass(0.5, 2.0));
  const auto [x, y] = adversarial_tails(m, 5);
  EXPECT_EQ(x.anchor(), 1);
  EXPECT_EQ(x.length(), 5);
  for (int i = 1; i <= 5; ++i) {
    EXPECT_EQ(m.sign(x.at(i)), +1);
    EXPECT_EQ(m.sign(y.at(i)), -1);
  }
  const GModel iid = GModel::iid(Alphabet({"a", "b", "c"}), {0.2, 0.3, 0.5});
  const auto [a, c] = adversarial_tails(iid, 3);
  EXPECT_EQ(a.at(2), 0);
  EXPECT_EQ(c.at(2), 2);
}

TEST(Pipeline, LongRangeRunStaysBelowBounds) {
  const GModel m = GModel::long_range_linear(Alphabet::binary(), 0.25, power_law_with_mass(0.5, 2.0));
  const PipelineResult r = run_pipeline(m, BlockSchedule::constant(1), small_options());
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.coordinate_violations, 0);
  ASSERT_EQ(r.bounds.size(), 4u);
  ASSERT_EQ(r.ratios.size(), 4u);
  for (std::size_t i = 0; i < r.bounds.size(); ++i) {
    EXPECT_NEAR(r.bounds[i].ratio, r.ratios[i].ratio, 1e-12);
    if (i > 0) {
      EXPECT_LT(r.bounds[i].ratio, r.bounds[i - 1].ratio);
    }
  }
  EXPECT_EQ(r.bound, r.bounds.back().limsup);
  for (std::size_t i = 1; i < r.dbar.dbar.size(); ++i) EXPECT_LE(r.dbar.dbar[i], r.dbar.dbar[i - 1]);
  for (const RunCheck& c : r.runs) EXPECT_TRUE(c.ok) << "run " << c.k;
  EXPECT_EQ(r.mc.trajectories, 1500);
  EXPECT_GT(r.mc.frequency[0], 0.0);
}

TEST(Pipeline, IidModelHasZeroDbar) {
  const GModel iid = GModel::iid(Alphabet::binary(), {0.3, 0.7});
  const PipelineResult r = run_pipeline(iid, BlockSchedule::constant(1), small_options());
  for (double v : r.dbar.dbar) EXPECT_EQ(v, 0.0);
  // b = 1, dbar = 0: the ratio is 1 / (K + 1).
  for (const PropositionBound& b : r.bounds) EXPECT_NEAR(b.ratio, 1.0 / (b.K + 1), 1e-15);
  for (double f : r.mc.frequency) EXPECT_EQ(f, 0.0);
  EXPECT_TRUE(r.ok());
}

TEST(Pipeline, MemoryOneDbarVanishesAfterFirstBlock) {
  const GModel m = GModel::finite_memory(Alphabet::binary(), 1, {0.2, 0.6, 0.8, 0.4});
  PipelineOptions o = small_options();
  o.trajectories = 500;
  const PipelineResult r = run_pipeline(m, BlockSchedule::constant(1), o);
  EXPECT_GT(r.dbar.dbar[0], 0.0);
  for (std::size_t i = 1; i < r.dbar.dbar.size(); ++i) EXPECT_EQ(r.dbar.dbar[i], 0.0);
  // One agreeing block covers the memory, after which the copies never separate.
  for (std::size_t k = 1; k < r.mc.disagreements_at_run.size(); ++k) EXPECT_EQ(r.mc.disagreements_at_run[k], 0);
  for (std::size_t i = 1; i < r.mc.frequency.size(); ++i) EXPECT_LE(r.mc.frequency[i], r.mc.frequency[i - 1]);
  EXPECT_TRUE(r.ok());
}

TEST(Pipeline, RejectsBadOptions) {
  const GModel iid = GModel::iid(Alphabet::binary(), {0.5, 0.5});
  PipelineOptions o = small_options();
  o.K_sweep = {};
  EXPECT_THROW(run_pipeline(iid, BlockSchedule::constant(1), o), InvalidArgument);
}
