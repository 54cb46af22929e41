#include "gchain/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "gchain/errors.hpp"

namespace gchain {

namespace {

unsigned resolve_threads(unsigned threads, std::size_t work) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(work, 1)));
}

// Runs body(worker, begin, end) over a static partition of [0, count).
template <typename Body>
void parallel_chunks(std::size_t count, unsigned threads, Body&& body) {
  threads = resolve_threads(threads, count);
  if (threads == 1) {
    body(0u, std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = std::min(count, t * chunk);
    const std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&, t, begin, end] { body(t, begin, end); });
  }
  for (auto& th : pool) th.join();
}

std::size_t draw_index(std::span<const double> weights, double total, Rng& rng) {
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;
}

}  // namespace

void FiniteDist::validate() const {
  const std::size_t expected = checked_power(q, support.length(), std::size_t{1} << 30);
  require(probs.size() == expected, "distribution has " + std::to_string(probs.size()) + " entries, expected " +
                                        std::to_string(expected));
  double s = 0.0;
  for (double p : probs) {
    require(p >= 0.0 && std::isfinite(p), "distribution has a negative or non-finite entry");
    s += p;
  }
  require(std::abs(s - 1.0) <= 1e-12, "distribution mass " + std::to_string(s) + " differs from 1");
}

double total_variation(std::span<const double> mu, std::span<const double> nu) {
  require(mu.size() == nu.size(), "total_variation: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += std::abs(mu[i] - nu[i]);
  return 0.5 * s;
}

CouplingTable::CouplingTable(FiniteDist mu, FiniteDist nu) : mu_(std::move(mu)), nu_(std::move(nu)) {
  require(mu_.support == nu_.support && mu_.q == nu_.q, "maximal_coupling: marginals live on different supports");
  mu_.validate();
  nu_.validate();
  const std::size_t n = mu_.probs.size();
  diagonal_.resize(n);
  defect_mu_.resize(n);
  defect_nu_.resize(n);
  for (std::size_t z = 0; z < n; ++z) {
    diagonal_[z] = std::min(mu_.probs[z], nu_.probs[z]);
    defect_mu_[z] = mu_.probs[z] - diagonal_[z];
    defect_nu_[z] = nu_.probs[z] - diagonal_[z];
  }
  // Off-diagonal mass is sum(defect_mu) == sum(defect_nu) == TV; sum the defects
  // directly rather than 1 - overlap to keep small TVs accurate.
  const double dm = std::accumulate(defect_mu_.begin(), defect_mu_.end(), 0.0);
  const double dn = std::accumulate(defect_nu_.begin(), defect_nu_.end(), 0.0);
  disagreement_ = 0.5 * (dm + dn);
}

double CouplingTable::joint(std::size_t z, std::size_t w) const {
  if (z == w) return diagonal_.at(z);
  if (disagreement_ <= 0.0) return 0.0;
  return defect_mu_.at(z) * defect_nu_.at(w) / disagreement_;
}

std::vector<double> CouplingTable::row_sums() const {
  const double col_mass = std::accumulate(defect_nu_.begin(), defect_nu_.end(), 0.0);
  std::vector<double> out(size());
  for (std::size_t z = 0; z < size(); ++z)
    out[z] = diagonal_[z] + (disagreement_ > 0.0 ? defect_mu_[z] * col_mass / disagreement_ : 0.0);
  return out;
}

std::vector<double> CouplingTable::column_sums() const {
  const double row_mass = std::accumulate(defect_mu_.begin(), defect_mu_.end(), 0.0);
  std::vector<double> out(size());
  for (std::size_t w = 0; w < size(); ++w)
    out[w] = diagonal_[w] + (disagreement_ > 0.0 ? defect_nu_[w] * row_mass / disagreement_ : 0.0);
  return out;
}

std::vector<std::vector<double>> CouplingTable::dense() const {
  std::vector<std::vector<double>> out(size(), std::vector<double>(size()));
  for (std::size_t z = 0; z < size(); ++z)
    for (std::size_t w = 0; w < size(); ++w) out[z][w] = joint(z, w);
  return out;
}

std::pair<std::size_t, std::size_t> CouplingTable::sample(Rng& rng) const {
  const double overlap = std::accumulate(diagonal_.begin(), diagonal_.end(), 0.0);
  const double u = uniform01(rng) * (overlap + disagreement_);
  if (u < overlap || disagreement_ <= 0.0) {
    const std::size_t z = draw_index(diagonal_, overlap, rng);
    return {z, z};
  }
  const double dm = std::accumulate(defect_mu_.begin(), defect_mu_.end(), 0.0);
  const double dn = std::accumulate(defect_nu_.begin(), defect_nu_.end(), 0.0);
  const std::size_t z = draw_index(defect_mu_, dm, rng);
  const std::size_t w = draw_index(defect_nu_, dn, rng);
  return {z, w};
}

CouplingTable maximal_coupling(const FiniteDist& mu, const FiniteDist& nu) { return CouplingTable(mu, nu); }

Interval next_block(const CouplingState& state, const BlockSchedule& schedule) {
  const int length = schedule.b(state.agreement_run + 1);
  return {state.right_end - length + 1, state.right_end};
}

void record_block(CouplingState& state, const BlockSchedule& schedule, Interval block,
                  std::span<const Symbol> x_block, std::span<const Symbol> y_block) {
  require(block == next_block(state, schedule), "record_block: block does not match the schedule");
  require(x_block.size() == static_cast<std::size_t>(block.length()) && y_block.size() == x_block.size(),
          "record_block: block words have the wrong length");
  if (schedule.beyond_horizon(state.agreement_run + 1)) state.past_horizon = true;
  for (int c = block.hi; c >= block.lo; --c) {
    state.x.push_back(x_block[static_cast<std::size_t>(c - block.lo)]);
    state.y.push_back(y_block[static_cast<std::size_t>(c - block.lo)]);
  }
  const bool agreed = std::equal(x_block.begin(), x_block.end(), y_block.begin());
  state.agreement_run = agreed ? state.agreement_run + 1 : 0;
  state.right_end = block.lo - 1;
  ++state.blocks;
}

namespace {

// Coordinates [block.hi + 1, 0] from the grown side followed by the fixed tail.
Word right_context(const std::vector<Symbol>& grown, Interval block, const Word& tail) {
  std::vector<Symbol> ctx;
  ctx.reserve(static_cast<std::size_t>(-block.hi) + static_cast<std::size_t>(tail.length()));
  for (int c = block.hi + 1; c <= 0; ++c) ctx.push_back(grown[static_cast<std::size_t>(-c)]);
  ctx.insert(ctx.end(), tail.symbols().begin(), tail.symbols().end());
  return Word(block.hi + 1, std::move(ctx));
}

}  // namespace

CoupledSample sample_block_coupling(const GModel& model, const BlockSchedule& schedule, int depth,
                                    const Word& x_tail, const Word& y_tail, std::uint64_t seed,
                                    const BlockCouplingOptions& options) {
  require(depth >= 0, "sample_block_coupling: depth must be non-negative");
  require(model.positive(), "sample_block_coupling: model must be positive");
  for (const Word* tail : {&x_tail, &y_tail}) {
    if (!tail->empty()) require(tail->anchor() == 1, "sample_block_coupling: tail contexts start at coordinate 1");
    tail->validate(model.alphabet());
  }

  Rng rng(seed);
  CouplingState state;
  CoupledSample out;
  const std::size_t q = model.q();
  std::vector<Symbol> zw, ww;
  while (static_cast<int>(state.x.size()) <= depth) {
    const Interval block = next_block(state, schedule);
    if (block.length() > options.block_cap)
      throw BudgetExceeded("block length " + std::to_string(block.length()) + " exceeds block cap " +
                           std::to_string(options.block_cap));
    const BlockConditional cx = block_conditional(model, block, right_context(state.x, block, x_tail));
    const BlockConditional cy = block_conditional(model, block, right_context(state.y, block, y_tail));
    const double trunc = 0.5 * (cx.total_error() + cy.total_error());
    if (trunc > options.max_truncation_error)
      throw Error("block truncation error " + std::to_string(trunc) + " exceeds tolerance " +
                  std::to_string(options.max_truncation_error));

    // Reference fills are normalized up to rounding; renormalize before coupling.
    auto as_dist = [&](const BlockConditional& c) {
      FiniteDist d{block, q, c.probs};
      const double s = std::accumulate(d.probs.begin(), d.probs.end(), 0.0);
      for (double& p : d.probs) p /= s;
      return d;
    };
    const CouplingTable table(as_dist(cx), as_dist(cy));
    const auto [z, w] = table.sample(rng);
    zw.assign(static_cast<std::size_t>(block.length()), 0);
    ww.assign(zw.size(), 0);
    decode_word(z, q, zw);
    decode_word(w, q, ww);

    out.blocks.push_back({block, state.agreement_run, z == w, table.disagreement(), trunc});
    out.max_truncation_error = std::max(out.max_truncation_error, trunc);
    record_block(state, schedule, block, zw, ww);
  }
  out.past_horizon = state.past_horizon;
  out.disagree.resize(static_cast<std::size_t>(depth) + 1);
  for (int i = 0; i <= depth; ++i) out.disagree[i] = state.x[i] != state.y[i];
  out.x = std::move(state.x);
  out.y = std::move(state.y);
  return out;
}

DisagreementEstimate estimate_disagreement(const GModel& model, const BlockSchedule& schedule, int depth,
                                           const Word& x_tail, const Word& y_tail, int trajectories,
                                           std::uint64_t master_seed, const BlockCouplingOptions& options,
                                           unsigned threads) {
  require(trajectories > 0, "estimate_disagreement: need at least one trajectory");
  struct Partial {
    std::vector<long long> hits;
    std::vector<long long> runs, run_hits;
    double trunc = 0.0;
    bool past_horizon = false;
  };
  const unsigned workers = resolve_threads(threads, static_cast<std::size_t>(trajectories));
  std::vector<Partial> partials(workers);
  std::vector<std::exception_ptr> failures(workers);

  parallel_chunks(static_cast<std::size_t>(trajectories), workers,
                  [&](unsigned t, std::size_t begin, std::size_t end) {
                    Partial& p = partials[t];
                    p.hits.assign(static_cast<std::size_t>(depth) + 1, 0);
                    try {
                      for (std::size_t i = begin; i < end; ++i) {
                        const CoupledSample s = sample_block_coupling(model, schedule, depth, x_tail, y_tail,
                                                                      derive_seed(master_seed, i), options);
                        for (int c = 0; c <= depth; ++c) p.hits[c] += s.disagree[c];
                        for (const BlockRecord& br : s.blocks) {
                          const auto k = static_cast<std::size_t>(br.run_before);
                          if (p.runs.size() <= k) {
                            p.runs.resize(k + 1, 0);
                            p.run_hits.resize(k + 1, 0);
                          }
                          ++p.runs[k];
                          p.run_hits[k] += br.agreed ? 0 : 1;
                        }
                        p.trunc = std::max(p.trunc, s.max_truncation_error);
                        p.past_horizon = p.past_horizon || s.past_horizon;
                      }
                    } catch (...) {
                      failures[t] = std::current_exception();
                    }
                  });
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);

  DisagreementEstimate est;
  est.trajectories = trajectories;
  std::vector<long long> hits(static_cast<std::size_t>(depth) + 1, 0);
  for (const Partial& p : partials) {
    for (std::size_t c = 0; c < hits.size(); ++c) hits[c] += p.hits[c];
    if (est.blocks_at_run.size() < p.runs.size()) {
      est.blocks_at_run.resize(p.runs.size(), 0);
      est.disagreements_at_run.resize(p.runs.size(), 0);
    }
    for (std::size_t k = 0; k < p.runs.size(); ++k) {
      est.blocks_at_run[k] += p.runs[k];
      est.disagreements_at_run[k] += p.run_hits[k];
    }
    est.max_truncation_error = std::max(est.max_truncation_error, p.trunc);
    est.past_horizon = est.past_horizon || p.past_horizon;
  }
  const double N = trajectories;
  for (long long h : hits) {
    const double f = double(h) / N;
    est.frequency.push_back(f);
    est.standard_error.push_back(std::sqrt(f * (1.0 - f) / N));
  }
  return est;
}

DnBounds dn_bruteforce(const GModel& model, const BlockSchedule& schedule, int n, int tail_len,
                       std::size_t budget, unsigned threads) {
  require(n >= 1, "dn_bruteforce: n must be at least 1");
  require(tail_len >= 0, "dn_bruteforce: tail length must be non-negative");
  const std::size_t q = model.q();
  const long long agree_len_ll = schedule.B(n - 1);
  const int block_len = schedule.b(n);
  require(agree_len_ll + 2LL * tail_len + block_len < 64, "dn_bruteforce: configuration space too large");
  const int agree_len = static_cast<int>(agree_len_ll);
  checked_power(q, agree_len + 2 * tail_len + block_len, budget);

  const Interval J = schedule.J(n);
  const std::size_t agreements = checked_power(q, agree_len, budget);
  const std::size_t tails = checked_power(q, tail_len, budget);

  struct Extremes {
    double lower = 0.0, upper = 0.0, reference = 0.0;
  };
  const unsigned workers = resolve_threads(threads, agreements);
  std::vector<Extremes> partial(workers);
  std::vector<std::exception_ptr> failures(workers);

  parallel_chunks(agreements, workers, [&](unsigned t, std::size_t begin, std::size_t end) {
    try {
      Extremes& ex = partial[t];
      std::vector<Symbol> ctx(static_cast<std::size_t>(agree_len + tail_len));
      std::vector<std::vector<double>> dists(tails);
      std::vector<double> errs(tails);
      for (std::size_t a = begin; a < end; ++a) {
        decode_word(a, q, std::span<Symbol>(ctx).first(static_cast<std::size_t>(agree_len)));
        for (std::size_t tl = 0; tl < tails; ++tl) {
          decode_word(tl, q, std::span<Symbol>(ctx).subspan(static_cast<std::size_t>(agree_len)));
          const BlockConditional c = block_conditional(model, J, Word(J.hi + 1, ctx));
          dists[tl] = c.probs;
          errs[tl] = c.total_error();
        }
        for (std::size_t t1 = 0; t1 < tails; ++t1) {
          for (std::size_t t2 = t1; t2 < tails; ++t2) {
            const double tv = total_variation(dists[t1], dists[t2]);
            const double e = 0.5 * (errs[t1] + errs[t2]);
            ex.reference = std::max(ex.reference, tv);
            ex.lower = std::max(ex.lower, tv - e);
            ex.upper = std::max(ex.upper, tv + e);
          }
        }
      }
    } catch (...) {
      failures[t] = std::current_exception();
    }
  });
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);

  DnBounds out;
  out.n = n;
  out.configurations = agreements * tails * tails;
  for (const Extremes& ex : partial) {
    out.lower = std::max(out.lower, ex.lower);
    out.upper = std::max(out.upper, ex.upper);
    out.reference = std::max(out.reference, ex.reference);
  }
  out.upper = std::min(out.upper, 1.0);
  return out;
}

std::vector<double> dbar(std::span<const double> d_values, double tail_bound) {
  std::vector<double> out(d_values.size());
  double running = tail_bound;
  for (std::size_t i = d_values.size(); i-- > 0;) {
    running = std::max(running, d_values[i]);
    out[i] = running;
  }
  return out;
}

}  // namespace gchain
