#include "gchain/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gchain/errors.hpp"

namespace gchain {

void RenewalSpec::validate() const {
  require(K >= 1, "renewal spec: K must be at least 1");
  require(static_cast<int>(d.size()) >= K, "renewal spec: need d_1..d_K");
  require(static_cast<int>(b.size()) >= K + 1, "renewal spec: need b_1..b_{K+1}");
  for (int k = 0; k < K; ++k) {
    require(d[k] >= 0.0 && d[k] <= 1.0, "renewal spec: d values must lie in [0, 1]");
    if (k > 0) require(d[k] <= d[k - 1], "renewal spec: d must be non-increasing");
  }
  long long total = 0;
  for (int k = 0; k <= K; ++k) {
    require(b[k] >= 1, "renewal spec: block lengths must be positive");
    total += b[k];
  }
  require(total <= (1LL << 26), "renewal spec: B_{K+1} too large to tabulate");
}

RenewalSpec make_renewal_spec(std::span<const double> d, const BlockSchedule& schedule, int K) {
  require(static_cast<int>(d.size()) >= K, "make_renewal_spec: need d_1..d_K");
  RenewalSpec spec;
  spec.K = K;
  spec.d.assign(d.begin(), d.begin() + K);
  for (int k = 1; k <= K + 1; ++k) spec.b.push_back(schedule.b(k));
  spec.validate();
  return spec;
}

double AlphaBeta::alpha_at(long long i) const {
  return (i >= 0 && i < static_cast<long long>(alpha.size())) ? alpha[static_cast<std::size_t>(i)] : 0.0;
}

double AlphaBeta::beta_at(long long n) const {
  return (n >= 0 && n < static_cast<long long>(beta.size())) ? beta[static_cast<std::size_t>(n)] : 0.0;
}

AlphaBeta build_alphabeta(const RenewalSpec& spec) {
  spec.validate();
  const int K = spec.K;
  std::vector<long long> B(K + 2, 0);
  for (int k = 1; k <= K + 1; ++k) B[k] = B[k - 1] + spec.b[k - 1];

  AlphaBeta ab;
  ab.alpha.assign(static_cast<std::size_t>(B[K + 1]) + 1, 0.0);
  ab.beta.assign(static_cast<std::size_t>(B[K + 1]), 0.0);
  double survive = 1.0;  // prod_{j<=k} (1 - d_j)
  for (int k = 0; k <= K; ++k) {
    const double p = (k < K) ? spec.d[k] * survive : survive;
    ab.alpha[static_cast<std::size_t>(B[k + 1])] = p;
    for (long long n = B[k]; n < B[k + 1]; ++n) ab.beta[static_cast<std::size_t>(n)] = p;
    if (k < K) survive *= 1.0 - spec.d[k];
  }
  ab.period = period(ab);
  return ab;
}

int period(const AlphaBeta& ab) {
  long long g = 0;
  for (std::size_t i = 1; i < ab.alpha.size(); ++i)
    if (ab.alpha[i] != 0.0) g = std::gcd(g, static_cast<long long>(i));
  require(g > 0, "period: alpha has empty support");
  return static_cast<int>(g);
}

std::vector<double> renewal_solve(const AlphaBeta& ab, int n_max) {
  require(n_max >= 0, "renewal_solve: n_max must be non-negative");
  std::vector<double> u(static_cast<std::size_t>(n_max) + 1, 0.0);
  // Only the support of alpha contributes to the convolution.
  std::vector<std::pair<long long, double>> support;
  for (std::size_t i = 1; i < ab.alpha.size(); ++i)
    if (ab.alpha[i] != 0.0) support.emplace_back(static_cast<long long>(i), ab.alpha[i]);
  for (long long n = 0; n <= n_max; ++n) {
    double s = ab.beta_at(n);
    for (const auto& [i, a] : support) {
      if (i > n) break;
      s += a * u[static_cast<std::size_t>(n - i)];
    }
    u[static_cast<std::size_t>(n)] = s;
  }
  return u;
}

namespace {

double mean_interarrival(const AlphaBeta& ab) {
  double mu = 0.0;
  for (std::size_t i = 1; i < ab.alpha.size(); ++i) mu += double(i) * ab.alpha[i];
  require(mu > 0.0, "renewal limit: degenerate mean inter-arrival time");
  return mu;
}

}  // namespace

double renewal_residue_limit(const AlphaBeta& ab, int residue) {
  const int m = ab.period;
  require(residue >= 0 && residue < m, "renewal_residue_limit: residue out of range");
  double s = 0.0;
  for (std::size_t n = static_cast<std::size_t>(residue); n < ab.beta.size(); n += static_cast<std::size_t>(m))
    s += ab.beta[n];
  return m * s / mean_interarrival(ab);
}

double renewal_limit(const AlphaBeta& ab) { return renewal_residue_limit(ab, 0); }

double renewal_mean_limit(const AlphaBeta& ab) {
  const double s = std::accumulate(ab.beta.begin(), ab.beta.end(), 0.0);
  return s / mean_interarrival(ab);
}

double renewal_limsup(const AlphaBeta& ab) {
  double best = 0.0;
  for (int r = 0; r < ab.period; ++r) best = std::max(best, renewal_residue_limit(ab, r));
  return best;
}

double block_ratio(const RenewalSpec& spec) {
  spec.validate();
  const int K = spec.K;
  double num = 0.0, den = 0.0, survive = 1.0;
  for (int k = 1; k <= K; ++k) {
    num += spec.b[k - 1] * spec.d[k - 1] * survive;
    den += spec.b[k - 1] * survive;
    survive *= 1.0 - spec.d[k - 1];
  }
  num += spec.b[K] * survive;
  den += spec.b[K] * survive;
  require(den > 0.0, "block_ratio: degenerate denominator");
  return num / den;
}

std::vector<PropositionBound> proposition_bound(std::span<const double> dbar, const BlockSchedule& schedule,
                                                std::span<const int> K_sweep) {
  for (std::size_t i = 1; i < dbar.size(); ++i)
    require(dbar[i] <= dbar[i - 1], "proposition_bound: dbar must be non-increasing");
  std::vector<PropositionBound> out;
  for (int K : K_sweep) {
    const RenewalSpec spec = make_renewal_spec(dbar, schedule, K);
    const AlphaBeta ab = build_alphabeta(spec);
    out.push_back({K, block_ratio(spec), renewal_limit(ab), renewal_limsup(ab)});
  }
  return out;
}

}  // namespace gchain
