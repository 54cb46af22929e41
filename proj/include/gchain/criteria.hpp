#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gchain/gmodel.hpp"
#include "gchain/schedule.hpp"

namespace gchain {

enum class Verdict { Satisfied, Violated, Inconclusive };
std::string_view to_string(Verdict v);

struct EvidenceTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct CriterionReport {
  std::string id;
  Verdict verdict = Verdict::Inconclusive;
  std::string reasoning;
  std::optional<double> limit;  // closed-form limit of the tested quantity, when known
  EvidenceTable evidence;
};

// Parametric description of n -> log rho_[0,n](g), n >= 0:
//   PowerLaw      c (n+1)^(-p)
//   Exponential   c r^n
//   FiniteRange   `level` for n < M, 0 from M on
//   Tabulated     values[n] up to the table, then min(tail(n), last value)
class VariationModel {
 public:
  enum class Kind { PowerLaw, Exponential, FiniteRange, Tabulated };

  static VariationModel power_law(double c, double p);
  static VariationModel exponential(double c, double r);
  static VariationModel finite_range(int M, double level = 1.0);
  static VariationModel tabulated(std::vector<double> values, const VariationModel& tail);
  /// Tabulated model dominating a profile of a concrete g.
  static VariationModel from_profile(const VariationProfile& profile);
  /// "power:c=1,p=2", "exp:c=1,r=0.5", "finite:M=3[,level=1]". Throws ConfigError.
  static VariationModel parse(std::string_view text);

  Kind kind() const { return kind_; }
  bool parametric() const { return kind_ != Kind::Tabulated; }
  double c() const { return c_; }
  double p() const { return p_; }
  double r() const { return r_; }
  int M() const { return M_; }
  double level() const { return level_; }
  const std::vector<double>& values() const { return values_; }
  const VariationModel& tail() const;

  double at(long long n) const;
  double rho(long long n) const;
  /// Upper bound on sum_{j>=J} at(j)^k; +infinity when the series diverges.
  double power_tail_sum(long long J, int k) const;
  std::string describe() const;

 private:
  VariationModel() = default;
  Kind kind_ = Kind::FiniteRange;
  double c_ = 0.0, p_ = 0.0, r_ = 0.0, level_ = 0.0;
  int M_ = 0;
  std::vector<double> values_;
  std::shared_ptr<const VariationModel> tail_;
};

/// sum_n (log rho_[0,n])^2 < infinity.
CriterionReport check_hyp1(const VariationModel& vm);
/// sum_n prod_{i<=n} rho_[0,i]^-(1/2 + epsilon) = infinity.
CriterionReport check_hyp2(const VariationModel& vm, double epsilon);
/// log rho_[0,n] = o(n^(-1/2)).
CriterionReport check_hyp3(const VariationModel& vm);
/// lim_n sum_{i = ceil(lambda^(n-1))}^{ceil(lambda^n)} (log rho_[0,i])^2 = 0.
/// Numeric window sums are reported for windows ending at or below max_index.
CriterionReport check_hyp5(const VariationModel& vm, double lambda, long long max_index = 2'000'000);

// Single-site sequence d_n, n >= 1:
//   Zero                0
//   Constant            a
//   PowerLaw            a n^(-p)
//   OneMinusHarmonic    1 - 1/n
//   Tabulated           values[n-1] up to the table, then the tail
class DSequence {
 public:
  enum class Kind { Zero, Constant, PowerLaw, OneMinusHarmonic, Tabulated };

  static DSequence zero();
  static DSequence constant(double a);
  static DSequence power_law(double a, double p);
  static DSequence one_minus_harmonic();
  static DSequence tabulated(std::vector<double> values, const DSequence& tail);
  /// "zero", "const:a=0.1", "power:a=0.5,p=1", "one-minus-harmonic". Throws ConfigError.
  static DSequence parse(std::string_view text);

  Kind kind() const { return kind_; }
  double a() const { return a_; }
  double p() const { return p_; }
  double at(long long n) const;
  std::string describe() const;

 private:
  DSequence() = default;
  Kind kind_ = Kind::Zero;
  double a_ = 0.0, p_ = 1.0;
  std::vector<double> values_;
  std::shared_ptr<const DSequence> tail_;
};

/// sum_n prod_{i<=n} (1 - d_i) = infinity.
CriterionReport check_thm_h(const DSequence& d);

/// Upper bound rho_n - 1 on the single-site d_n.
double d1_from_rho(double rho);

struct CorollaryBounds {
  int n = 0;
  long long first = 0, last = -1;  // window of rho indices [B_{n-1}, B_n - 1]
  double rg2 = 1.0;               // Hellinger product bound
  bool rg2_applicable = false;    // every rho in the window <= (1 + sqrt 2)^2
  double as = 1.0;                // log-series bound
  bool as_applicable = false;
  double best() const;
};

/// Both upper bounds on d_n(g, B) over the window of rho indices B_{n-1} .. B_n - 1.
CorollaryBounds dn_upper_cor(const VariationModel& vm, const BlockSchedule& schedule, int n);

struct CorollaryDbar {
  std::vector<CorollaryBounds> bounds;  // n = 1..horizon
  std::vector<double> d;                // best bound per n
  double tail_bound = 1.0;              // dominates every d_n with n > horizon
  std::vector<double> dbar;             // tail suprema, index 0 holds dbar_1
};

/// dbar_n from the corollary bounds for n <= horizon plus a dominating tail.
CorollaryDbar dbar_corollary(const VariationModel& vm, const BlockSchedule& schedule, int horizon);

struct RatioPoint {
  int K = 0;
  double ratio = 0.0;
};

/// R_K = [sum_{k<=K} b_k d_k P_{k-1} + b_{K+1} P_K] / [sum_{k<=K+1} b_k P_{k-1}],
/// P_k = prod_{j<=k} (1 - d_j), for each K in the sweep (d[0] = dbar_1).
std::vector<RatioPoint> thm_g_ratio(std::span<const double> dbar, const BlockSchedule& schedule,
                                    std::span<const int> K_sweep);

/// Schedule with B_n = ceil(l^n / (l - 1)); checks floor(l^(n-1)) <= b_n <= ceil(l^(n-1))
/// for 2 <= n <= count and throws Error if it fails.
BlockSchedule thmc_blocks(double l, int count);

}  // namespace gchain
