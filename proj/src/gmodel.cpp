#include "gchain/gmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gchain/errors.hpp"

namespace gchain {

namespace {

// Coefficients a_1..a_N are tabulated; beyond N the power-law tail is bracketed
// by integrals.
constexpr int kCachedCoefficients = 1 << 14;

double law_coefficient(const CoefficientLaw& law, int k) {
  if (const auto* pl = std::get_if<PowerLawCoefficients>(&law)) return pl->c * std::pow(double(k), -pl->p);
  const auto& ex = std::get<ExponentialCoefficients>(law);
  return ex.c * std::pow(ex.r, double(k));
}

}  // namespace

struct GModel::Coefficients {
  std::vector<double> a;       // a[k], k = 0..N (a[0] unused)
  std::vector<double> prefix;  // prefix[n] = sum_{k<=n} a_k
  std::vector<double> suffix;  // suffix[n] = sum_{n<k<=N} a_k
  double beyond_upper = 0.0;   // bounds on sum_{k>N} a_k
  double beyond_lower = 0.0;
};

double riemann_zeta(double p) {
  require(p > 1.0, "zeta: p must exceed 1");
  constexpr int n = 64;
  double s = 0.0;
  for (int k = n - 1; k >= 1; --k) s += std::pow(double(k), -p);
  const double N = n;
  s += std::pow(N, 1.0 - p) / (p - 1.0) + 0.5 * std::pow(N, -p);
  s += p * std::pow(N, -p - 1.0) / 12.0;
  s -= p * (p + 1) * (p + 2) * std::pow(N, -p - 3.0) / 720.0;
  s += p * (p + 1) * (p + 2) * (p + 3) * (p + 4) * std::pow(N, -p - 5.0) / 30240.0;
  return s;
}

PowerLawCoefficients power_law_with_mass(double mass, double p) {
  require(mass > 0.0 && mass <= 1.0, "coefficient mass must lie in (0, 1]");
  return {mass / riemann_zeta(p), p};
}

ExponentialCoefficients exponential_with_mass(double mass, double r) {
  require(mass > 0.0 && mass <= 1.0, "coefficient mass must lie in (0, 1]");
  require(r > 0.0 && r < 1.0, "exponential rate must lie in (0, 1)");
  return {mass * (1.0 - r) / r, r};
}

GModel GModel::finite_memory(Alphabet alphabet, int memory, std::vector<double> table) {
  require(memory >= 0, "memory must be non-negative");
  const std::size_t q = alphabet.size();
  const std::size_t expected = checked_power(q, memory + 1, std::size_t{1} << 26);
  require(table.size() == expected, "table must have |S|^(M+1) = " + std::to_string(expected) + " entries");
  const std::size_t contexts = expected / q;
  for (double v : table) require(v >= 0.0 && std::isfinite(v), "table entries must be non-negative");
  for (std::size_t ctx = 0; ctx < contexts; ++ctx) {
    double s = 0.0;
    for (std::size_t x0 = 0; x0 < q; ++x0) s += table[x0 * contexts + ctx];
    require(std::abs(s - 1.0) <= 1e-12, "table rows must sum to 1 over the first symbol (context " +
                                             std::to_string(ctx) + " sums to " + std::to_string(s) + ")");
  }
  GModel m;
  m.kind_ = Kind::FiniteMemory;
  m.alphabet_ = std::move(alphabet);
  m.memory_ = memory;
  m.table_ = std::move(table);
  return m;
}

GModel GModel::iid(Alphabet alphabet, std::vector<double> marginal) {
  return finite_memory(std::move(alphabet), 0, std::move(marginal));
}

GModel GModel::long_range_linear(Alphabet alphabet, double theta, CoefficientLaw law,
                                 std::array<int, 2> signs) {
  require(alphabet.size() == 2, "long-range linear family is defined on a binary alphabet");
  require(theta > 0.0 && theta < 0.5, "theta must lie in (0, 1/2)");
  require((signs[0] == 1 && signs[1] == -1) || (signs[0] == -1 && signs[1] == 1),
          "sign map must send the two symbols to -1 and +1");
  if (const auto* pl = std::get_if<PowerLawCoefficients>(&law)) {
    require(pl->c > 0.0 && pl->p > 1.0, "power-law coefficients need c > 0 and p > 1");
  } else {
    const auto& ex = std::get<ExponentialCoefficients>(law);
    require(ex.c > 0.0 && ex.r > 0.0 && ex.r < 1.0, "exponential coefficients need c > 0 and 0 < r < 1");
  }

  auto coef = std::make_shared<Coefficients>();
  const int N = kCachedCoefficients;
  coef->a.assign(N + 1, 0.0);
  for (int k = 1; k <= N; ++k) coef->a[k] = law_coefficient(law, k);
  coef->prefix.assign(N + 1, 0.0);
  for (int k = 1; k <= N; ++k) coef->prefix[k] = coef->prefix[k - 1] + coef->a[k];
  coef->suffix.assign(N + 1, 0.0);
  for (int n = N - 1; n >= 0; --n) coef->suffix[n] = coef->suffix[n + 1] + coef->a[n + 1];
  if (const auto* pl = std::get_if<PowerLawCoefficients>(&law)) {
    coef->beyond_upper = pl->c * std::pow(double(N), 1.0 - pl->p) / (pl->p - 1.0);
    coef->beyond_lower = pl->c * std::pow(double(N + 1), 1.0 - pl->p) / (pl->p - 1.0);
  } else {
    const auto& ex = std::get<ExponentialCoefficients>(law);
    coef->beyond_upper = coef->beyond_lower = ex.c * std::pow(ex.r, double(N + 1)) / (1.0 - ex.r);
  }

  GModel m;
  m.kind_ = Kind::LongRangeLinear;
  m.alphabet_ = std::move(alphabet);
  m.theta_ = theta;
  m.law_ = law;
  m.signs_ = signs;
  m.coef_ = std::move(coef);
  require(m.coefficient_mass() <= 1.0 + 1e-9, "coefficients must satisfy sum_k a_k <= 1");
  return m;
}

bool GModel::positive() const {
  if (kind_ == Kind::LongRangeLinear) return true;
  return std::all_of(table_.begin(), table_.end(), [](double v) { return v > 0.0; });
}

int GModel::memory() const {
  require(kind_ == Kind::FiniteMemory, "memory() needs a finite-memory model");
  return memory_;
}

const std::vector<double>& GModel::table() const {
  require(kind_ == Kind::FiniteMemory, "table() needs a finite-memory model");
  return table_;
}

double GModel::theta() const {
  require(kind_ == Kind::LongRangeLinear, "theta() needs a long-range model");
  return theta_;
}

const CoefficientLaw& GModel::law() const {
  require(kind_ == Kind::LongRangeLinear, "law() needs a long-range model");
  return law_;
}

int GModel::sign(Symbol s) const { return signs_.at(s); }

double GModel::coefficient(int k) const {
  require(k >= 1, "coefficient index starts at 1");
  if (k <= kCachedCoefficients) return coef_->a[k];
  return law_coefficient(law_, k);
}

double GModel::coefficient_prefix(int n) const {
  if (n <= 0) return 0.0;
  if (n <= kCachedCoefficients) return coef_->prefix[n];
  double s = coef_->prefix[kCachedCoefficients];
  for (int k = kCachedCoefficients + 1; k <= n; ++k) s += coefficient(k);
  return s;
}

double GModel::coefficient_tail_upper(int n) const {
  n = std::max(n, 0);
  if (n < kCachedCoefficients) return coef_->suffix[n] + coef_->beyond_upper;
  if (const auto* pl = std::get_if<PowerLawCoefficients>(&law_))
    return pl->c * std::pow(double(n), 1.0 - pl->p) / (pl->p - 1.0);
  const auto& ex = std::get<ExponentialCoefficients>(law_);
  return ex.c * std::pow(ex.r, double(n + 1)) / (1.0 - ex.r);
}

double GModel::coefficient_tail_lower(int n) const {
  n = std::max(n, 0);
  if (n < kCachedCoefficients) return coef_->suffix[n] + coef_->beyond_lower;
  if (const auto* pl = std::get_if<PowerLawCoefficients>(&law_))
    return pl->c * std::pow(double(n + 1), 1.0 - pl->p) / (pl->p - 1.0);
  const auto& ex = std::get<ExponentialCoefficients>(law_);
  return ex.c * std::pow(ex.r, double(n + 1)) / (1.0 - ex.r);
}

double GModel::coefficient_mass() const { return coefficient_tail_upper(0); }

GValue GModel::eval(std::span<const Symbol> window) const {
  require(!window.empty(), "g needs at least coordinate 0");
  const std::size_t q = alphabet_.size();
  for (Symbol s : window)
    if (s >= q) throw InvalidArgument("symbol index " + std::to_string(s) + " outside alphabet");

  if (kind_ == Kind::LongRangeLinear) {
    const int len = static_cast<int>(window.size());
    double field = 0.0;
    for (int k = 1; k < len; ++k) field += coefficient(k) * signs_[window[k]];
    return {0.5 + theta_ * signs_[window[0]] * field, theta_ * coefficient_tail_upper(len - 1)};
  }

  const std::size_t need = static_cast<std::size_t>(memory_) + 1;
  if (window.size() >= need) return {table_[word_index(window.first(need), q)], 0.0};

  // Short window: reference fill with symbol 0, error over all completions.
  const std::size_t missing = need - window.size();
  const std::size_t base = word_index(window, q);
  std::size_t completions = 1;
  for (std::size_t i = 0; i < missing; ++i) completions *= q;
  const double reference = table_[base * completions];
  double err = 0.0;
  for (std::size_t c = 0; c < completions; ++c)
    err = std::max(err, std::abs(table_[base * completions + c] - reference));
  return {reference, err};
}

GValue eval_g(const GModel& model, const Word& word, int truncation) {
  require(word.anchor() == 0, "eval_g: word must be anchored at 0");
  require(word.length() >= 1, "eval_g: word must contain coordinate 0");
  require(truncation >= 1, "eval_g: truncation must be positive");
  word.validate(model.alphabet());
  auto symbols = word.symbols();
  if (model.kind() == GModel::Kind::LongRangeLinear)
    symbols = symbols.first(std::min<std::size_t>(symbols.size(), std::size_t(truncation)));
  return model.eval(symbols);
}

GValue cylinder_prob(const GModel& model, const Word& block, const Word& context) {
  require(!block.empty(), "cylinder_prob: empty block");
  if (!context.empty())
    require(context.anchor() == block.interval().hi + 1, "cylinder_prob: context must start right after the block");
  block.validate(model.alphabet());
  context.validate(model.alphabet());
  const Word full = concat(block, context);
  const auto symbols = full.symbols();
  double value = 1.0;
  double upper = 1.0;
  bool exact = true;
  for (int i = 0; i < block.length(); ++i) {
    const GValue g = model.eval(symbols.subspan(static_cast<std::size_t>(i)));
    value *= g.value;
    upper *= g.value + g.error;
    exact = exact && g.exact();
  }
  return {value, exact ? 0.0 : std::max(0.0, upper - value)};
}

double BlockConditional::total_error() const { return std::accumulate(errors.begin(), errors.end(), 0.0); }

BlockConditional block_conditional(const GModel& model, Interval block, const Word& context) {
  require(!block.empty(), "block_conditional: empty block");
  if (!context.empty())
    require(context.anchor() == block.hi + 1, "block_conditional: context must start right after the block");
  const std::size_t q = model.q();
  const int b = block.length();
  const std::size_t words = checked_power(q, b, std::size_t{1} << 24);

  std::vector<Symbol> buffer(static_cast<std::size_t>(b), 0);
  buffer.insert(buffer.end(), context.symbols().begin(), context.symbols().end());
  const std::span<const Symbol> view(buffer);

  BlockConditional out;
  out.probs.assign(words, 0.0);
  out.errors.assign(words, 0.0);

  // Fill the block right to left so each factor sees its full right context.
  auto fill = [&](auto&& self, int pos, double value, double upper, bool exact) -> void {
    for (std::size_t s = 0; s < q; ++s) {
      buffer[static_cast<std::size_t>(pos)] = static_cast<Symbol>(s);
      const GValue g = model.eval(view.subspan(static_cast<std::size_t>(pos)));
      const double v = value * g.value;
      const double u = upper * (g.value + g.error);
      const bool e = exact && g.exact();
      if (pos == 0) {
        const std::size_t idx = word_index(view.first(static_cast<std::size_t>(b)), q);
        out.probs[idx] = v;
        out.errors[idx] = e ? 0.0 : std::max(0.0, u - v);
      } else {
        self(self, pos - 1, v, u, e);
      }
    }
  };
  fill(fill, b - 1, 1.0, 1.0, true);
  return out;
}

RhoBounds rho_interval(const GModel& model, int n) {
  require(n >= 0, "rho_interval: n must be non-negative");
  require(model.positive(), "rho_interval: model must be positive");
  if (model.kind() == GModel::Kind::FiniteMemory) {
    const int M = model.memory();
    if (n >= M) return {1.0, 1.0};
    const std::size_t q = model.q();
    const std::size_t prefixes = checked_power(q, n + 1, std::size_t{1} << 26);
    const std::size_t completions = checked_power(q, M - n, std::size_t{1} << 26);
    const auto& t = model.table();
    double rho = 1.0;
    for (std::size_t w = 0; w < prefixes; ++w) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = 0.0;
      for (std::size_t c = 0; c < completions; ++c) {
        const double v = t[w * completions + c];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      rho = std::max(rho, hi / lo);
    }
    return {rho, rho};
  }

  // sup over x, y agreeing on [0,n] is attained with s(x_0) * sum_{k<=n} a_k s(x_k)
  // at its minimum -A_n and the tails pushed to +-T_n:
  //   rho_n = 1 + 2 theta T_n / (1/2 - theta (A_n + T_n)).
  const double theta = model.theta();
  const double head = model.coefficient_prefix(n);
  auto rho_for = [&](double tail) { return 1.0 + 2.0 * theta * tail / (0.5 - theta * (head + tail)); };
  return {rho_for(model.coefficient_tail_lower(n)), rho_for(model.coefficient_tail_upper(n))};
}

double VariationTail::at(int n) const {
  switch (shape) {
    case Shape::Zero:
      return 0.0;
    case Shape::PowerLaw:
      return coef * std::pow(double(std::max(n, 1)), -rate);
    case Shape::Exponential:
      return coef * std::pow(rate, double(n));
  }
  return 0.0;
}

double VariationProfile::at(int n) const {
  require(n >= 0, "variation index must be non-negative");
  if (n < static_cast<int>(values.size())) return values[static_cast<std::size_t>(n)];
  if (!tail) throw InvalidArgument("variation index " + std::to_string(n) + " beyond tabulated horizon");
  double v = tail->at(n);
  if (!values.empty()) v = std::min(v, values.back());
  return v;
}

double VariationProfile::rho(int n) const { return std::exp(at(n)); }

VariationProfile variation_profile(const GModel& model, int horizon, VariationProfile::Kind kind) {
  require(horizon >= 0, "variation_profile: horizon must be non-negative");
  VariationProfile prof;
  prof.kind = kind;
  prof.values.reserve(static_cast<std::size_t>(horizon) + 1);
  for (int n = 0; n <= horizon; ++n) {
    const RhoBounds r = rho_interval(model, n);
    double v = std::log(kind == VariationProfile::Kind::UpperBound ? r.upper : r.lower);
    v = std::max(v, 0.0);
    if (!prof.values.empty()) v = std::min(v, prof.values.back());
    prof.values.push_back(v);
  }

  if (model.kind() == GModel::Kind::FiniteMemory) {
    prof.tail = VariationTail{VariationTail::Shape::Zero, 0.0, 0.0};
    return prof;
  }
  // var_n <= 2 theta T_n / (1/2 - theta A) with the tail T_n in closed form.
  const double theta = model.theta();
  const double denom = 0.5 - theta * model.coefficient_mass();
  if (const auto* pl = std::get_if<PowerLawCoefficients>(&model.law())) {
    prof.tail = VariationTail{VariationTail::Shape::PowerLaw, 2.0 * theta * pl->c / ((pl->p - 1.0) * denom),
                              pl->p - 1.0};
  } else {
    const auto& ex = std::get<ExponentialCoefficients>(model.law());
    prof.tail = VariationTail{VariationTail::Shape::Exponential,
                              2.0 * theta * ex.c * ex.r / ((1.0 - ex.r) * denom), ex.r};
  }
  return prof;
}

}  // namespace gchain
