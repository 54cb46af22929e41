#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "gchain/gmodel.hpp"
#include "gchain/rng.hpp"
#include "gchain/schedule.hpp"

namespace gchain {

/// Probability vector over the words on `support`, lexicographic order.
struct FiniteDist {
  Interval support;
  std::size_t q = 2;
  std::vector<double> probs;

  /// Checks non-negativity, size |S|^len and unit mass within 1e-12.
  void validate() const;
};

/// 1/2 sum |mu - nu|.
double total_variation(std::span<const double> mu, std::span<const double> nu);

// Maximal coupling of two distributions on the same support:
//   P(z, z) = min(mu_z, nu_z)
//   P(z, w) = (mu_z - P(z,z)) (nu_w - P(w,w)) / P(disagree)   for z != w
// stored as the diagonal plus the two defect vectors, so memory stays linear in
// the support size.
class CouplingTable {
 public:
  CouplingTable(FiniteDist mu, FiniteDist nu);

  std::size_t size() const { return mu_.probs.size(); }
  double joint(std::size_t z, std::size_t w) const;
  /// P(disagree) = 1 - sum_z min(mu_z, nu_z).
  double disagreement() const { return disagreement_; }
  const std::vector<double>& diagonal() const { return diagonal_; }
  const FiniteDist& first() const { return mu_; }
  const FiniteDist& second() const { return nu_; }

  /// Row and column sums of the joint table.
  std::vector<double> row_sums() const;
  std::vector<double> column_sums() const;
  std::vector<std::vector<double>> dense() const;

  /// Draws a pair (z, w) from the joint law.
  std::pair<std::size_t, std::size_t> sample(Rng& rng) const;

 private:
  FiniteDist mu_, nu_;
  std::vector<double> diagonal_, defect_mu_, defect_nu_;
  double disagreement_ = 0.0;
};

CouplingTable maximal_coupling(const FiniteDist& mu, const FiniteDist& nu);

// Leftward-grown pair of configurations for the block coupling. x[i], y[i] hold
// coordinate -i. `agreement_run` counts the consecutive agreeing blocks
// immediately to the right of the next block (0 at the start and after any
// disagreeing block).
struct CouplingState {
  std::vector<Symbol> x, y;
  int agreement_run = 0;
  int right_end = 0;  // a_n: the next block ends at right_end (coordinates <= 0)
  int blocks = 0;
  bool past_horizon = false;  // a run outgrew the schedule's tabulated prefix
};

/// Interval of the next block: length b_{k+1} for agreement run k.
Interval next_block(const CouplingState& state, const BlockSchedule& schedule);

/// Appends a sampled block (symbols in left-to-right order) and updates the run.
void record_block(CouplingState& state, const BlockSchedule& schedule, Interval block,
                  std::span<const Symbol> x_block, std::span<const Symbol> y_block);

struct BlockRecord {
  Interval interval;
  int run_before = 0;
  bool agreed = true;
  double tv = 0.0;               // disagreement mass of the block's maximal coupling
  double truncation_error = 0.0;  // bound on the TV error of the block conditionals
};

struct CoupledSample {
  std::vector<Symbol> x, y;         // by depth: index i is coordinate -i
  std::vector<std::uint8_t> disagree;  // indices 0..depth
  std::vector<BlockRecord> blocks;
  double max_truncation_error = 0.0;
  bool past_horizon = false;
};

struct BlockCouplingOptions {
  int block_cap = 12;
  double max_truncation_error = 1.0;
};

// One trajectory of the block coupling of pi^g(. | x) and pi^g(. | y), grown
// leftward until coordinate -depth is covered. `x_tail` and `y_tail` hold the
// fixed coordinates [1, L] (may be empty). Each block is drawn from the maximal
// coupling of the two block conditionals given everything to its right.
CoupledSample sample_block_coupling(const GModel& model, const BlockSchedule& schedule, int depth,
                                    const Word& x_tail, const Word& y_tail, std::uint64_t seed,
                                    const BlockCouplingOptions& options = {});

struct DisagreementEstimate {
  int trajectories = 0;
  std::vector<double> frequency;  // index i: coordinate -i
  std::vector<double> standard_error;  // binomial
  // Per agreement run k: blocks started with run k and how many disagreed.
  std::vector<long long> blocks_at_run;
  std::vector<long long> disagreements_at_run;
  double max_truncation_error = 0.0;
  bool past_horizon = false;
};

/// Monte Carlo over `trajectories` independent runs; trajectory i uses seed
/// derive_seed(master_seed, i), so results do not depend on `threads`.
DisagreementEstimate estimate_disagreement(const GModel& model, const BlockSchedule& schedule, int depth,
                                           const Word& x_tail, const Word& y_tail, int trajectories,
                                           std::uint64_t master_seed, const BlockCouplingOptions& options = {},
                                           unsigned threads = 0);

struct DnBounds {
  int n = 0;
  double lower = 0.0;      // max over enumerated configurations of (TV - error)
  double upper = 0.0;      // max over enumerated configurations of (TV + error)
  double reference = 0.0;  // max TV of the reference-filled conditionals
  std::size_t configurations = 0;
};

// Brute-force bracket on d_n(g, B): the sup over pairs agreeing on
// [1 - B_{n-1}, 0] of the TV between the block-J_n conditionals. Enumerates every
// agreeing part, every pair of tails on [1, tail_len] and every block word;
// contributions beyond tail_len enter through the truncation error.
// Throws BudgetExceeded when |S|^(B_{n-1} + 2 tail_len + b_n) > budget.
DnBounds dn_bruteforce(const GModel& model, const BlockSchedule& schedule, int n, int tail_len,
                       std::size_t budget = std::size_t{1} << 22, unsigned threads = 0);

/// Tail suprema dbar_n = max(sup_{n <= i <= H} d_i, tail_bound), n = 1..H.
/// Input index 0 holds d_1.
std::vector<double> dbar(std::span<const double> d_values, double tail_bound);

}  // namespace gchain
