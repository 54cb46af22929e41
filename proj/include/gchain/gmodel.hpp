#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "gchain/alphabet.hpp"

namespace gchain {

/// A g-value known up to truncation: |g(true configuration) - value| <= error.
struct GValue {
  double value = 0.0;
  double error = 0.0;
  bool exact() const { return error == 0.0; }
};

/// a_k = c * k^(-p), p > 1.
struct PowerLawCoefficients {
  double c = 0.0;
  double p = 2.0;
};

/// a_k = c * r^k, 0 < r < 1.
struct ExponentialCoefficients {
  double c = 0.0;
  double r = 0.5;
};

using CoefficientLaw = std::variant<PowerLawCoefficients, ExponentialCoefficients>;

/// Power law scaled so that sum_k a_k == mass.
PowerLawCoefficients power_law_with_mass(double mass, double p);
ExponentialCoefficients exponential_with_mass(double mass, double r);

/// Riemann zeta for p > 1 (Euler-Maclaurin, ~1e-15 relative).
double riemann_zeta(double p);

// A g-function on a finite alphabet.
//
// FiniteMemory: g(x) = table[x_0 .. x_M], table indexed lexicographically with
// coordinate 0 most significant.
//
// LongRangeLinear (binary only): g(x) = 1/2 + theta * s(x_0) * sum_{k>=1} a_k s(x_k)
// with s the sign map, 0 < theta < 1/2 and sum a_k <= 1, so 1/2 - theta <= g <= 1/2 + theta.
//
// Values are immutable; copies share the coefficient cache.
class GModel {
 public:
  enum class Kind { FiniteMemory, LongRangeLinear };

  static GModel finite_memory(Alphabet alphabet, int memory, std::vector<double> table);
  static GModel iid(Alphabet alphabet, std::vector<double> marginal);
  static GModel long_range_linear(Alphabet alphabet, double theta, CoefficientLaw law,
                                  std::array<int, 2> signs = {-1, +1});

  Kind kind() const { return kind_; }
  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t q() const { return alphabet_.size(); }
  bool positive() const;

  // FiniteMemory accessors.
  int memory() const;
  const std::vector<double>& table() const;

  // LongRangeLinear accessors.
  double theta() const;
  const CoefficientLaw& law() const;
  int sign(Symbol s) const;
  /// a_k for k >= 1.
  double coefficient(int k) const;
  /// sum_{k=1}^{n} a_k.
  double coefficient_prefix(int n) const;
  /// Bounds on sum_{k>n} a_k.
  double coefficient_tail_upper(int n) const;
  double coefficient_tail_lower(int n) const;
  /// sum_{k>=1} a_k (upper end of its enclosure).
  double coefficient_mass() const;

  /// g on the cylinder fixed by window[0..len-1] (window[0] = x_0).
  /// FiniteMemory windows shorter than M+1 are filled with symbol 0 and the
  /// error is the largest deviation over all completions. LongRangeLinear
  /// uses zero contribution beyond the window; error = theta * tail.
  GValue eval(std::span<const Symbol> window) const;

 private:
  struct Coefficients;

  GModel() = default;

  Kind kind_ = Kind::FiniteMemory;
  Alphabet alphabet_ = Alphabet::binary();
  int memory_ = 0;
  std::vector<double> table_;
  double theta_ = 0.0;
  CoefficientLaw law_ = PowerLawCoefficients{};
  std::array<int, 2> signs_ = {-1, +1};
  std::shared_ptr<const Coefficients> coef_;
};

/// g evaluated on the cylinder fixed by `word` (anchored at 0) using at most
/// `truncation` coordinates.
GValue eval_g(const GModel& model, const Word& word, int truncation);

/// pi_[m,n](block | context) = prod_{i=m}^{n} g(T^i x) for block on [m,n] and
/// context on [n+1, n+L]. Error is the multiplicative bound
/// prod(v_i + e_i) - prod(v_i); zero when every factor is exact.
GValue cylinder_prob(const GModel& model, const Word& block, const Word& context);

/// Distribution of the block on `block` given `context` on [block.hi+1, ...],
/// every block word in lexicographic order. errors[w] bounds |true - probs[w]|.
struct BlockConditional {
  std::vector<double> probs;
  std::vector<double> errors;
  double total_error() const;
};
BlockConditional block_conditional(const GModel& model, Interval block, const Word& context);

struct RhoBounds {
  double lower = 1.0;
  double upper = 1.0;
};

/// Bounds on rho_[0,n](g) = sup{ g(x)/g(y) : x_[0,n] = y_[0,n] }.
RhoBounds rho_interval(const GModel& model, int n);

/// Closed-form envelope for variation values beyond a tabulated range.
struct VariationTail {
  enum class Shape { Zero, PowerLaw, Exponential };
  Shape shape = Shape::Zero;
  double coef = 0.0;  // PowerLaw: coef * n^(-rate); Exponential: coef * rate^n
  double rate = 0.0;
  double at(int n) const;
};

/// n -> var_[0,n](log g) = log rho_[0,n](g), or an upper bound on it.
struct VariationProfile {
  enum class Kind { Exact, UpperBound };
  Kind kind = Kind::Exact;
  std::vector<double> values;
  std::optional<VariationTail> tail;

  /// Tabulated value, else the tail envelope, else throws.
  double at(int n) const;
  double rho(int n) const;
  int horizon() const { return static_cast<int>(values.size()) - 1; }
};

/// Exact uses the lower ends of rho_interval, UpperBound the upper ends.
VariationProfile variation_profile(const GModel& model, int horizon,
                                   VariationProfile::Kind kind = VariationProfile::Kind::UpperBound);

}  // namespace gchain
