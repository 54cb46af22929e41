#include "gchain/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "gchain/errors.hpp"

namespace gchain {

std::pair<Word, Word> adversarial_tails(const GModel& model, int length) {
  require(length >= 0, "adversarial_tails: length must be non-negative");
  Symbol a = 0, b = static_cast<Symbol>(model.q() - 1);
  if (model.kind() == GModel::Kind::LongRangeLinear) {
    a = model.sign(0) > 0 ? 0 : 1;
    b = static_cast<Symbol>(1 - a);
  }
  const auto n = static_cast<std::size_t>(length);
  return {Word(1, std::vector<Symbol>(n, a)), Word(1, std::vector<Symbol>(n, b))};
}

bool PipelineResult::ok() const {
  return coordinate_violations == 0 && std::all_of(runs.begin(), runs.end(), [](const RunCheck& r) { return r.ok; });
}

PipelineResult run_pipeline(const GModel& model, const BlockSchedule& schedule, const PipelineOptions& opt) {
  require(!opt.K_sweep.empty(), "pipeline: empty K sweep");
  const int K_max = *std::max_element(opt.K_sweep.begin(), opt.K_sweep.end());
  require(opt.dbar_horizon >= K_max, "pipeline: dbar horizon must cover the largest K");
  require(opt.compare_from >= 0 && opt.compare_from <= opt.depth, "pipeline: compare_from outside [0, depth]");
  require(opt.tails.empty() || opt.tails.size() == 2, "pipeline: tails must come as an (x, y) pair");

  PipelineResult res;
  res.variation = VariationModel::from_profile(variation_profile(model, opt.profile_horizon));
  res.dbar = dbar_corollary(res.variation, schedule, opt.dbar_horizon);
  res.ratios = thm_g_ratio(res.dbar.dbar, schedule, opt.K_sweep);
  res.bounds = proposition_bound(res.dbar.dbar, schedule, opt.K_sweep);
  for (const PropositionBound& b : res.bounds)
    if (b.K == K_max) res.bound = b.limsup;

  const auto [x_tail, y_tail] =
      opt.tails.empty() ? adversarial_tails(model, opt.tail_len) : std::pair{opt.tails[0], opt.tails[1]};
  res.mc = estimate_disagreement(model, schedule, opt.depth, x_tail, y_tail, opt.trajectories, opt.seed,
                                 opt.coupling, opt.threads);

  for (int n = opt.compare_from; n <= opt.depth; ++n)
    if (res.mc.frequency[n] > res.bound + 3.0 * res.mc.standard_error[n]) ++res.coordinate_violations;

  for (std::size_t k = 0; k < res.mc.blocks_at_run.size(); ++k) {
    RunCheck rc;
    rc.k = static_cast<int>(k);
    rc.blocks = res.mc.blocks_at_run[k];
    rc.disagreements = res.mc.disagreements_at_run[k];
    if (rc.blocks == 0) continue;
    rc.frequency = double(rc.disagreements) / double(rc.blocks);
    rc.sigma = std::sqrt(rc.frequency * (1.0 - rc.frequency) / double(rc.blocks));
    rc.dbar_next = k < res.dbar.dbar.size() ? res.dbar.dbar[k] : res.dbar.tail_bound;
    rc.ok = rc.frequency <= rc.dbar_next + 3.0 * rc.sigma;
    res.runs.push_back(rc);
  }
  return res;
}

}  // namespace gchain
