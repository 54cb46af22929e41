#include "gchain/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gchain/coupling.hpp"
#include "gchain/errors.hpp"
#include "gchain/hellinger.hpp"
#include "gchain/renewal.hpp"

namespace gchain {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

CriterionReport report(std::string id, Verdict v, std::string reasoning, std::optional<double> limit = {}) {
  CriterionReport r;
  r.id = std::move(id);
  r.verdict = v;
  r.reasoning = std::move(reasoning);
  r.limit = limit;
  return r;
}

// Checkpoints 10, 100, ... up to `last`.
std::vector<long long> decades(long long last) {
  std::vector<long long> out;
  for (long long n = 10; n <= last; n *= 10) out.push_back(n);
  if (out.empty() || out.back() != last) out.push_back(last);
  return out;
}

long long evidence_length(const VariationModel& vm) {
  return vm.kind() == VariationModel::Kind::Tabulated ? static_cast<long long>(vm.values().size()) : 1'000'000;
}

// The identically-zero power law and exponential behave like a finite range.
bool vanishes(const VariationModel& vm) {
  return (vm.kind() == VariationModel::Kind::PowerLaw || vm.kind() == VariationModel::Kind::Exponential) &&
         vm.c() == 0.0;
}

std::pair<std::string, double> parse_field(std::string_view item) {
  const auto eq = item.find('=');
  if (eq == std::string_view::npos) throw ConfigError("variation model: expected key=value, got '" + std::string(item) + "'");
  const std::string key(item.substr(0, eq));
  const std::string value(item.substr(eq + 1));
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return {key, v};
  } catch (const std::exception&) {
    throw ConfigError("variation model: '" + key + "' is not a number: '" + value + "'");
  }
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Satisfied:
      return "Satisfied";
    case Verdict::Violated:
      return "Violated";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

// ---------------------------------------------------------------------------
// VariationModel

VariationModel VariationModel::power_law(double c, double p) {
  require(c >= 0.0 && std::isfinite(c), "power-law variation: c must be finite and non-negative");
  require(p > 0.0 && std::isfinite(p), "power-law variation: p must be positive");
  VariationModel vm;
  vm.kind_ = Kind::PowerLaw;
  vm.c_ = c;
  vm.p_ = p;
  return vm;
}

VariationModel VariationModel::exponential(double c, double r) {
  require(c >= 0.0 && std::isfinite(c), "exponential variation: c must be finite and non-negative");
  require(r > 0.0 && r < 1.0, "exponential variation: r must lie in (0, 1)");
  VariationModel vm;
  vm.kind_ = Kind::Exponential;
  vm.c_ = c;
  vm.r_ = r;
  return vm;
}

VariationModel VariationModel::finite_range(int M, double level) {
  require(M >= 0, "finite-range variation: M must be non-negative");
  require(level >= 0.0 && std::isfinite(level), "finite-range variation: level must be finite and non-negative");
  VariationModel vm;
  vm.kind_ = Kind::FiniteRange;
  vm.M_ = M;
  vm.level_ = level;
  return vm;
}

VariationModel VariationModel::tabulated(std::vector<double> values, const VariationModel& tail) {
  require(!values.empty(), "tabulated variation: need at least one value");
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(values[i] >= 0.0 && std::isfinite(values[i]), "tabulated variation: values must be finite and non-negative");
    if (i > 0) require(values[i] <= values[i - 1], "tabulated variation: values must be non-increasing");
  }
  VariationModel vm;
  vm.kind_ = Kind::Tabulated;
  vm.values_ = std::move(values);
  vm.tail_ = std::make_shared<const VariationModel>(tail);
  return vm;
}

VariationModel VariationModel::from_profile(const VariationProfile& profile) {
  require(!profile.values.empty(), "from_profile: empty profile");
  const long long H = profile.horizon();
  VariationModel tail = finite_range(0, 0.0);
  if (profile.tail) {
    const VariationTail& t = *profile.tail;
    switch (t.shape) {
      case VariationTail::Shape::Zero:
        break;
      case VariationTail::Shape::PowerLaw:
        // coef n^-rate <= coef ((H+2)/(H+1))^rate (n+1)^-rate for n > H.
        tail = power_law(t.coef * std::pow(double(H + 2) / double(H + 1), t.rate), t.rate);
        break;
      case VariationTail::Shape::Exponential:
        tail = exponential(t.coef, t.rate);
        break;
    }
  } else {
    // No envelope: nothing is known beyond the table except monotonicity.
    tail = finite_range(std::numeric_limits<int>::max(), profile.values.back());
  }
  return tabulated(profile.values, tail);
}

VariationModel VariationModel::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw ConfigError("variation model: expected '<kind>:<key>=<value>,...', got '" + std::string(text) + "'");
  const std::string kind(text.substr(0, colon));
  std::vector<std::pair<std::string, double>> fields;
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    fields.push_back(parse_field(rest.substr(0, comma)));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  auto get = [&](const std::string& key, std::optional<double> fallback) {
    for (const auto& [k, v] : fields)
      if (k == key) return v;
    if (!fallback) throw ConfigError("variation model '" + kind + "': missing '" + key + "'");
    return *fallback;
  };
  for (const auto& [k, v] : fields) {
    (void)v;
    const bool known = (kind == "power" && (k == "c" || k == "p")) || (kind == "exp" && (k == "c" || k == "r")) ||
                       (kind == "finite" && (k == "M" || k == "level"));
    if (!known) throw ConfigError("variation model '" + kind + "': unknown key '" + k + "'");
  }
  try {
    if (kind == "power") return power_law(get("c", 1.0), get("p", std::nullopt));
    if (kind == "exp") return exponential(get("c", 1.0), get("r", std::nullopt));
    if (kind == "finite") {
      const double M = get("M", std::nullopt);
      if (M != std::floor(M)) throw ConfigError("variation model 'finite': M must be an integer");
      return finite_range(static_cast<int>(M), get("level", 1.0));
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("variation model: unknown kind '" + kind + "' (power, exp, finite)");
}

const VariationModel& VariationModel::tail() const {
  require(kind_ == Kind::Tabulated, "variation model: only tabulated models have a tail");
  return *tail_;
}

double VariationModel::at(long long n) const {
  require(n >= 0, "variation index must be non-negative");
  switch (kind_) {
    case Kind::PowerLaw:
      return c_ * std::pow(double(n + 1), -p_);
    case Kind::Exponential:
      return c_ * std::pow(r_, double(n));
    case Kind::FiniteRange:
      return n < M_ ? level_ : 0.0;
    case Kind::Tabulated:
      if (n < static_cast<long long>(values_.size())) return values_[static_cast<std::size_t>(n)];
      return std::min(tail_->at(n), values_.back());
  }
  return 0.0;
}

double VariationModel::rho(long long n) const { return std::exp(at(n)); }

double VariationModel::power_tail_sum(long long J, int k) const {
  require(J >= 0 && k >= 1, "power_tail_sum: invalid arguments");
  switch (kind_) {
    case Kind::PowerLaw: {
      if (c_ == 0.0) return 0.0;
      const double s = p_ * k;
      if (s <= 1.0) return kInf;
      // sum_{m >= J+1} m^-s <= (J+1)^-s + (J+1)^(1-s) / (s-1)
      const double m = double(J + 1);
      return std::pow(c_, k) * (std::pow(m, -s) + std::pow(m, 1.0 - s) / (s - 1.0));
    }
    case Kind::Exponential:
      return std::pow(c_, k) * std::pow(r_, double(k) * double(J)) / (1.0 - std::pow(r_, k));
    case Kind::FiniteRange:
      return J >= M_ ? 0.0 : double(M_ - J) * std::pow(level_, k);
    case Kind::Tabulated: {
      const long long H = static_cast<long long>(values_.size());
      double s = 0.0;
      for (long long j = J; j < H; ++j) s += std::pow(values_[static_cast<std::size_t>(j)], k);
      return s + tail_->power_tail_sum(std::max(J, H), k);
    }
  }
  return kInf;
}

std::string VariationModel::describe() const {
  switch (kind_) {
    case Kind::PowerLaw:
      return "power:c=" + fmt(c_) + ",p=" + fmt(p_);
    case Kind::Exponential:
      return "exp:c=" + fmt(c_) + ",r=" + fmt(r_);
    case Kind::FiniteRange:
      return "finite:M=" + std::to_string(M_) + ",level=" + fmt(level_);
    case Kind::Tabulated:
      return "tabulated[" + std::to_string(values_.size()) + "]+" + tail_->describe();
  }
  return "";
}

// ---------------------------------------------------------------------------
// Hypothesis checks

CriterionReport check_hyp1(const VariationModel& vm) {
  CriterionReport r;
  if (vm.kind() == VariationModel::Kind::Tabulated) {
    r = report("hyp1", Verdict::Inconclusive, "tabulated variation: partial sums only");
  } else if (vanishes(vm) || vm.kind() != VariationModel::Kind::PowerLaw) {
    r = report("hyp1", Verdict::Satisfied, "finite range or geometric decay: the square series converges");
  } else if (2.0 * vm.p() > 1.0) {
    r = report("hyp1", Verdict::Satisfied, "p-series with exponent 2p = " + fmt(2.0 * vm.p()) + " > 1 converges");
  } else {
    r = report("hyp1", Verdict::Violated, "p-series with exponent 2p = " + fmt(2.0 * vm.p()) + " <= 1 diverges");
  }
  r.evidence.columns = {"N", "partial_sum", "tail_upper"};
  double s = 0.0;
  long long n = 0;
  for (long long N : decades(evidence_length(vm))) {
    for (; n < N; ++n) s += vm.at(n) * vm.at(n);
    r.evidence.rows.push_back({double(N), s, vm.power_tail_sum(N, 2)});
  }
  return r;
}

CriterionReport check_hyp2(const VariationModel& vm, double epsilon) {
  require(epsilon > 0.0, "check_hyp2: epsilon must be positive");
  const double a = 0.5 + epsilon;
  CriterionReport r;
  if (vm.kind() == VariationModel::Kind::Tabulated) {
    r = report("hyp2", Verdict::Inconclusive, "tabulated variation: partial sums only");
  } else if (vanishes(vm) || vm.kind() != VariationModel::Kind::PowerLaw || vm.p() > 1.0) {
    r = report("hyp2", Verdict::Satisfied, "sum of log rho converges, so the terms stay bounded below");
  } else if (vm.p() == 1.0) {
    const double e = a * vm.c();
    r = report("hyp2", e <= 1.0 ? Verdict::Satisfied : Verdict::Violated,
               "terms decay like n^-(1/2+eps)c with (1/2+eps)c = " + fmt(e) + (e <= 1.0 ? " <= 1" : " > 1"));
  } else {
    r = report("hyp2", Verdict::Violated, "sum of log rho grows like n^(1-p): terms decay faster than any power");
  }
  r.evidence.columns = {"N", "partial_sum"};
  double log_prod = 0.0, s = 0.0;
  long long n = 0;
  for (long long N : decades(evidence_length(vm))) {
    for (; n < N; ++n) {
      log_prod += vm.at(n);
      s += std::exp(-a * log_prod);
    }
    r.evidence.rows.push_back({double(N), s});
  }
  return r;
}

CriterionReport check_hyp3(const VariationModel& vm) {
  CriterionReport r;
  if (vm.kind() == VariationModel::Kind::Tabulated) {
    r = report("hyp3", Verdict::Inconclusive, "tabulated variation: scaled values only");
  } else if (vanishes(vm) || vm.kind() != VariationModel::Kind::PowerLaw || vm.p() > 0.5) {
    r = report("hyp3", Verdict::Satisfied, "n^(1/2) log rho_n -> 0", 0.0);
  } else if (vm.p() == 0.5) {
    r = report("hyp3", Verdict::Violated, "n^(1/2) log rho_n -> c = " + fmt(vm.c()) + " != 0", vm.c());
  } else {
    r = report("hyp3", Verdict::Violated, "n^(1/2) log rho_n diverges", kInf);
  }
  r.evidence.columns = {"n", "sqrt_n_times_log_rho"};
  for (long long N : decades(evidence_length(vm))) r.evidence.rows.push_back({double(N), std::sqrt(double(N)) * vm.at(N)});
  return r;
}

CriterionReport check_hyp5(const VariationModel& vm, double lambda, long long max_index) {
  require(lambda > 1.0, "check_hyp5: lambda must exceed 1");
  CriterionReport r;
  if (vm.kind() == VariationModel::Kind::Tabulated) {
    r = report("hyp5", Verdict::Inconclusive, "tabulated variation: window sums only");
  } else if (vanishes(vm) || vm.kind() != VariationModel::Kind::PowerLaw || vm.p() > 0.5) {
    r = report("hyp5", Verdict::Satisfied, "window sums of (log rho)^2 vanish", 0.0);
  } else if (vm.p() == 0.5) {
    const double lim = vm.c() * vm.c() * std::log(lambda);
    r = report("hyp5", Verdict::Violated, "window sums of c^2/i tend to c^2 log lambda = " + fmt(lim), lim);
  } else {
    r = report("hyp5", Verdict::Violated, "window sums of c^2 i^(-2p) grow without bound", kInf);
  }
  if (vm.kind() == VariationModel::Kind::Tabulated)
    max_index = std::min<long long>(max_index, static_cast<long long>(vm.values().size()) - 1);
  r.evidence.columns = {"n", "first", "last", "window_sum"};
  for (int n = 1;; ++n) {
    const long long lo = static_cast<long long>(std::ceil(std::pow(lambda, n - 1)));
    const long long hi = static_cast<long long>(std::ceil(std::pow(lambda, n)));
    if (hi > max_index) break;
    double s = 0.0;
    for (long long i = lo; i <= hi; ++i) {
      const double t = vm.at(i);
      s += t * t;
    }
    r.evidence.rows.push_back({double(n), double(lo), double(hi), s});
  }
  return r;
}

// ---------------------------------------------------------------------------
// Single-site series

DSequence DSequence::zero() { return DSequence{}; }

DSequence DSequence::constant(double a) {
  require(a >= 0.0 && a <= 1.0, "constant d: a must lie in [0, 1]");
  DSequence d;
  d.kind_ = Kind::Constant;
  d.a_ = a;
  return d;
}

DSequence DSequence::power_law(double a, double p) {
  require(a >= 0.0 && a <= 1.0, "power-law d: a must lie in [0, 1]");
  require(p > 0.0, "power-law d: p must be positive");
  DSequence d;
  d.kind_ = Kind::PowerLaw;
  d.a_ = a;
  d.p_ = p;
  return d;
}

DSequence DSequence::one_minus_harmonic() {
  DSequence d;
  d.kind_ = Kind::OneMinusHarmonic;
  return d;
}

DSequence DSequence::tabulated(std::vector<double> values, const DSequence& tail) {
  for (double v : values) require(v >= 0.0 && v <= 1.0, "tabulated d: values must lie in [0, 1]");
  DSequence d;
  d.kind_ = Kind::Tabulated;
  d.values_ = std::move(values);
  d.tail_ = std::make_shared<const DSequence>(tail);
  return d;
}

DSequence DSequence::parse(std::string_view text) {
  if (text == "zero") return zero();
  if (text == "one-minus-harmonic") return one_minus_harmonic();
  const auto colon = text.find(':');
  const std::string kind(text.substr(0, colon));
  double a = -1.0, p = 1.0;
  std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto [k, v] = parse_field(rest.substr(0, comma));
    if (k == "a")
      a = v;
    else if (k == "p" && kind == "power")
      p = v;
    else
      throw ConfigError("d sequence '" + kind + "': unknown key '" + k + "'");
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  try {
    if (kind == "const" && a >= 0.0) return constant(a);
    if (kind == "power" && a >= 0.0) return power_law(a, p);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("d sequence: expected zero, one-minus-harmonic, const:a=.. or power:a=..,p=.., got '" +
                    std::string(text) + "'");
}

double DSequence::at(long long n) const {
  require(n >= 1, "d index must be at least 1");
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Constant:
      return a_;
    case Kind::PowerLaw:
      return a_ * std::pow(double(n), -p_);
    case Kind::OneMinusHarmonic:
      return 1.0 - 1.0 / double(n);
    case Kind::Tabulated:
      if (n <= static_cast<long long>(values_.size())) return values_[static_cast<std::size_t>(n - 1)];
      return tail_->at(n);
  }
  return 0.0;
}

std::string DSequence::describe() const {
  switch (kind_) {
    case Kind::Zero:
      return "zero";
    case Kind::Constant:
      return "constant:a=" + fmt(a_);
    case Kind::PowerLaw:
      return "power:a=" + fmt(a_) + ",p=" + fmt(p_);
    case Kind::OneMinusHarmonic:
      return "one-minus-harmonic";
    case Kind::Tabulated:
      return "tabulated[" + std::to_string(values_.size()) + "]+" + tail_->describe();
  }
  return "";
}

CriterionReport check_thm_h(const DSequence& d) {
  CriterionReport r;
  switch (d.kind()) {
    case DSequence::Kind::Zero:
      r = report("thm_h", Verdict::Satisfied, "every product is 1");
      break;
    case DSequence::Kind::Constant:
      r = d.at(1) == 0.0 ? report("thm_h", Verdict::Satisfied, "every product is 1")
                         : report("thm_h", Verdict::Violated, "products decay geometrically");
      break;
    case DSequence::Kind::PowerLaw: {
      const double a = d.a(), p = d.p();
      if (a == 0.0)
        r = report("thm_h", Verdict::Satisfied, "every product is 1");
      else if (a >= 1.0)
        r = report("thm_h", Verdict::Violated, "d_1 = 1 makes every product vanish");
      else if (p > 1.0)
        r = report("thm_h", Verdict::Satisfied, "sum d_n converges, so the products stay bounded below");
      else if (p == 1.0)
        r = report("thm_h", Verdict::Satisfied, "products decay like n^-a with a = " + fmt(a) + " < 1");
      else
        r = report("thm_h", Verdict::Violated, "products decay like exp(-a n^(1-p)), a summable sequence");
      break;
    }
    case DSequence::Kind::OneMinusHarmonic:
      r = report("thm_h", Verdict::Violated, "products equal 1/n!, a summable sequence");
      break;
    case DSequence::Kind::Tabulated:
      r = report("thm_h", Verdict::Inconclusive, "tabulated d: partial sums only");
      break;
  }
  if (d.kind() == DSequence::Kind::Tabulated) {
    for (long long n = 1; n <= 1'000'000; ++n) {
      if (d.at(n) < 1.0) continue;
      r = report("thm_h", Verdict::Violated,
                 "d_" + std::to_string(n) + " = 1 makes every later product vanish, so the series is a finite sum");
      break;
    }
  }
  r.evidence.columns = {"N", "partial_sum"};
  double prod = 1.0, s = 0.0;
  long long n = 1;
  for (long long N : decades(1'000'000)) {
    for (; n <= N; ++n) {
      prod *= 1.0 - d.at(n);
      s += prod;
    }
    r.evidence.rows.push_back({double(N), s});
  }
  return r;
}

double d1_from_rho(double rho) {
  require(rho >= 1.0, "d1_from_rho: rho must be at least 1");
  return rho - 1.0;
}

// ---------------------------------------------------------------------------
// Corollary bounds

double CorollaryBounds::best() const {
  double b = 1.0;
  if (rg2_applicable) b = std::min(b, rg2);
  if (as_applicable) b = std::min(b, as);
  return b;
}

CorollaryBounds dn_upper_cor(const VariationModel& vm, const BlockSchedule& schedule, int n) {
  require(n >= 1, "dn_upper_cor: n must be at least 1");
  CorollaryBounds c;
  c.n = n;
  c.first = schedule.B(n - 1);
  c.last = schedule.B(n) - 1;
  const double rho_first = vm.rho(c.first);  // the largest in the window
  c.rg2_applicable = rho_first <= kHellingerRhoMax;
  c.as_applicable = rho_first < kHellingerRhoMax;
  const double K = kAs1Constant;
  double prod = 1.0, series = 0.0;
  for (long long i = c.first; i <= c.last; ++i) {
    const double t = vm.at(i);
    if (c.rg2_applicable) {
      const double f = hellinger_floor(std::exp(t));
      prod *= f * f;
    }
    series += 0.25 * t * t + K * t * t * t;
  }
  if (c.rg2_applicable) c.rg2 = std::sqrt(std::max(0.0, 1.0 - prod));
  if (c.as_applicable) c.as = std::sqrt(std::min(1.0, series));
  return c;
}

CorollaryDbar dbar_corollary(const VariationModel& vm, const BlockSchedule& schedule, int horizon) {
  require(horizon >= 1, "dbar_corollary: horizon must be at least 1");
  CorollaryDbar out;
  for (int n = 1; n <= horizon; ++n) {
    out.bounds.push_back(dn_upper_cor(vm, schedule, n));
    out.d.push_back(out.bounds.back().best());
  }
  // Windows starting at or beyond B_m all lie inside [B_m, infinity), so the
  // full log series from B_m dominates every later bound. Scan forward until
  // that remainder no longer exceeds the explicit maximum.
  auto remainder = [&](int m) {
    const long long J = schedule.B(m);
    if (vm.rho(J) >= kHellingerRhoMax) return 1.0;
    const double s = 0.25 * vm.power_tail_sum(J, 2) + kAs1Constant * vm.power_tail_sum(J, 3);
    return std::isfinite(s) ? std::sqrt(std::min(1.0, s)) : 1.0;
  };
  double tail = 0.0;
  int n = horizon + 1;
  double rest = remainder(horizon);
  while (rest > tail && n <= horizon + 65536 && schedule.B(n) <= 10'000'000) {
    tail = std::max(tail, dn_upper_cor(vm, schedule, n).best());
    rest = remainder(n);
    ++n;
  }
  out.tail_bound = std::max(tail, rest);
  out.dbar = dbar(out.d, out.tail_bound);
  return out;
}

std::vector<RatioPoint> thm_g_ratio(std::span<const double> d, const BlockSchedule& schedule,
                                    std::span<const int> K_sweep) {
  std::vector<RatioPoint> out;
  for (int K : K_sweep) out.push_back({K, block_ratio(make_renewal_spec(d, schedule, K))});
  return out;
}

BlockSchedule thmc_blocks(double l, int count) {
  BlockSchedule s = BlockSchedule::ceiling(l);
  for (int n = 2; n <= count; ++n) {
    const double x = std::pow(l, n - 1);
    const int b = s.b(n);
    if (b < std::floor(x) || b > std::ceil(x))
      throw Error("thmc_blocks: b_" + std::to_string(n) + " = " + std::to_string(b) + " outside [floor(l^(n-1)), ceil(l^(n-1))]");
  }
  return s;
}

}  // namespace gchain
