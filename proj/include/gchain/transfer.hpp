#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gchain/gmodel.hpp"

namespace gchain {

/// Function of the first `window` coordinates, indexed lexicographically
/// (coordinate 0 most significant).
struct CylinderFunction {
  int window = 1;
  std::vector<double> values;

  /// Indicator of `symbol` at coordinate 0.
  static CylinderFunction indicator(std::size_t q, Symbol symbol);
  /// Same function viewed on a longer window.
  CylinderFunction lifted(std::size_t q, int new_window) const;
};

/// Largest minus smallest entry.
double oscillation(std::span<const double> f);

// Transfer operator of a finite-memory g acting on functions of `window`
// coordinates (window >= max(M, 1)):
//   (L f)(x_0..x_{W-1}) = sum_s g(s x_0 .. x_{M-1}) f(s x_0 .. x_{W-2}).
// Each row holds |S| non-negative weights summing to 1, so L1 = 1 exactly.
class TransferOperator {
 public:
  explicit TransferOperator(GModel model, int window = 0, std::size_t state_budget = std::size_t{1} << 22);

  const GModel& model() const { return model_; }
  int window() const { return window_; }
  std::size_t state_dim() const { return dim_; }

  /// L f. Throws on dimension mismatch.
  std::vector<double> apply(std::span<const double> f) const;
  /// mu L (the dual action on cylinder measures).
  std::vector<double> apply_dual(std::span<const double> mu) const;

  /// Weight of the transition from state x to state y = (s, x_0..x_{W-2}).
  double weight(std::size_t x, Symbol s) const;
  std::size_t successor(std::size_t x, Symbol s) const;

 private:
  GModel model_;
  int window_;
  std::size_t q_;
  std::size_t dim_;
  std::size_t tail_divisor_;  // q^(W - M)
  std::size_t context_count_;  // q^M
};

/// L^n f; n = 0 returns f.
std::vector<double> apply_Ln(const TransferOperator& op, std::span<const double> f, int n);

struct StationaryMeasure {
  int window = 1;
  std::vector<double> probs;  // cylinder probabilities over words of length `window`
  double residual = 0.0;      // || mu L - mu ||_1 at exit
  int iterations = 0;
  bool converged = false;
  bool unique = false;        // exactly one closed communicating class

  /// Probability of a word of length <= window anchored at 0.
  double cylinder(std::span<const Symbol> word, std::size_t q) const;
};

/// Power iteration on the dual action from the uniform measure, capped at
/// max_iterations. Non-convergence is reported, not thrown.
StationaryMeasure stationary(const TransferOperator& op, double tol, int max_iterations = 100000);

struct OscillationPoint {
  int n = 0;
  double oscillation = 0.0;
  double truncation_error = 0.0;  // true oscillation <= oscillation + truncation_error
};

// sup L^n f - inf L^n f for n = 0..n_max. Long-range models run on the
// memory-`truncation` surrogate g_t(x) = g(x_0..x_t) with reference fill; with
// D = sup_x sum_s |g - g_t| the error term is D * sum_{j<n} osc(L_t^j f).
// Finite-memory models use their own memory (truncation ignored, error 0).
std::vector<OscillationPoint> uniqueness_diagnostic(const GModel& model, const CylinderFunction& f, int n_max,
                                                    int truncation,
                                                    std::size_t state_budget = std::size_t{1} << 22);

/// Memory-`memory` finite-memory surrogate of a model (exact copy for
/// finite-memory models with memory <= `memory`).
GModel truncated_surrogate(const GModel& model, int memory, std::size_t state_budget = std::size_t{1} << 22);

}  // namespace gchain
