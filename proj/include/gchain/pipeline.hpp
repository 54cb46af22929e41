#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gchain/coupling.hpp"
#include "gchain/criteria.hpp"
#include "gchain/renewal.hpp"

namespace gchain {

/// Tails on [1, length] pushing g apart as far as possible: the two symbols of
/// opposite sign for long-range models, the first and last symbol otherwise.
std::pair<Word, Word> adversarial_tails(const GModel& model, int length);

struct PipelineOptions {
  int profile_horizon = 256;  // tabulated part of the variation bound
  int dbar_horizon = 16;      // explicit corollary bounds for n <= dbar_horizon
  std::vector<int> K_sweep = {1, 2, 4, 8};
  int depth = 64;
  int trajectories = 10000;
  std::uint64_t seed = 1;
  int tail_len = 256;          // adversarial tail length used when no tails are given
  std::vector<Word> tails;     // optional explicit (x, y) tails anchored at 1
  int compare_from = 32;       // coordinates -n with n >= compare_from are checked
  BlockCouplingOptions coupling;
  unsigned threads = 0;
};

struct RunCheck {
  int k = 0;
  long long blocks = 0;
  long long disagreements = 0;
  double frequency = 0.0;
  double sigma = 0.0;
  double dbar_next = 0.0;  // dbar_{k+1}
  bool ok = true;
};

struct PipelineResult {
  VariationModel variation = VariationModel::finite_range(0);
  CorollaryDbar dbar;
  std::vector<RatioPoint> ratios;
  std::vector<PropositionBound> bounds;
  DisagreementEstimate mc;
  double bound = 1.0;  // limsup bound at the largest K of the sweep
  int coordinate_violations = 0;  // coordinates where frequency > bound + 3 sigma
  std::vector<RunCheck> runs;
  bool ok() const;
};

// Variation bound of the model -> corollary dbar -> ratio sweep and renewal
// bound -> block-coupling Monte Carlo compared against both the bound at each
// coordinate and dbar_{k+1} for blocks started after k agreeing blocks.
PipelineResult run_pipeline(const GModel& model, const BlockSchedule& schedule, const PipelineOptions& options);

}  // namespace gchain
