#pragma once

#include <span>
#include <vector>

#include "gchain/schedule.hpp"

namespace gchain {

// Auxiliary block chain on {0,1}: blocks are laid leftward from coordinate 0;
// with k agreeing (all-0) blocks immediately to the right, the next block has
// length b_{k+1} and is all-1 with probability d_{k+1} (probability 1 once
// k >= K), otherwise all-0. A 1-block resets k to 0.
struct RenewalSpec {
  std::vector<double> d;  // d_1..d_K (at least K entries), non-increasing in [0, 1]
  std::vector<int> b;     // b_1..b_{K+1} (at least K+1 entries), positive
  int K = 1;

  void validate() const;
};

/// Spec with d_1..d_K and b_1..b_{K+1} taken from longer sequences/a schedule.
RenewalSpec make_renewal_spec(std::span<const double> d, const BlockSchedule& schedule, int K);

// Renewal data of the chain. With p_k = d_{k+1} prod_{j<=k}(1-d_j) (k < K) and
// p_K = prod_{j<=K}(1-d_j):
//   alpha_{B_{k+1}} = p_k                          k = 0..K
//   beta_n          = p_k  for B_k <= n < B_{k+1}  k = 0..K
// so sum alpha = 1 by telescoping.
struct AlphaBeta {
  std::vector<double> alpha;  // indices 0..B_{K+1}; alpha[0] = 0
  std::vector<double> beta;   // indices 0..B_{K+1}-1
  int period = 1;

  double alpha_at(long long i) const;
  double beta_at(long long n) const;
  long long span() const { return static_cast<long long>(alpha.size()) - 1; }
};

AlphaBeta build_alphabeta(const RenewalSpec& spec);

/// gcd of { i : alpha_i != 0 }.
int period(const AlphaBeta& ab);

/// u_0 = beta_0, u_n = sum_{i=1}^{n} alpha_i u_{n-i} + beta_n. u_n is the
/// probability of a 1 at coordinate -n.
std::vector<double> renewal_solve(const AlphaBeta& ab, int n_max);

/// lim_n u_{mn + r} = m * sum_j beta_{mj+r} / sum_i i alpha_i (m = period).
double renewal_residue_limit(const AlphaBeta& ab, int residue);

/// lim_n u_{mn} = sum_n beta_{mn} / sum_n n alpha_{mn}.
double renewal_limit(const AlphaBeta& ab);

/// Cesaro limit sum_n beta_n / sum_i i alpha_i; equals renewal_limit whenever
/// every residue class has the same limit (e.g. all d_k > 0).
double renewal_mean_limit(const AlphaBeta& ab);

/// max over residues r of renewal_residue_limit: the limsup of u_n.
double renewal_limsup(const AlphaBeta& ab);

/// The closed-form ratio
///   [sum_{k<=K} b_k d_k P_{k-1} + b_{K+1} P_K] / [sum_{k<=K+1} b_k P_{k-1}],
/// P_k = prod_{j<=k}(1 - d_j).
double block_ratio(const RenewalSpec& spec);

struct PropositionBound {
  int K = 0;
  double ratio = 0.0;   // block_ratio (Cesaro limit of the chain)
  double limit = 0.0;   // renewal_limit (limit along multiples of the period)
  double limsup = 0.0;  // renewal_limsup (bound on limsup_n of the disagreement probability)
};

/// One entry per K in the sweep, from the non-increasing dbar (dbar[0] = dbar_1).
std::vector<PropositionBound> proposition_bound(std::span<const double> dbar, const BlockSchedule& schedule,
                                                std::span<const int> K_sweep);

}  // namespace gchain
