#include "gchain/schedule.hpp"

#include <cmath>
#include <sstream>

#include "gchain/errors.hpp"

namespace gchain {

namespace {

long long ceiling_partial_sum(double l, int n) {
  if (n == 0) return 0;
  const long double x = std::pow(static_cast<long double>(l), n) / (static_cast<long double>(l) - 1.0L);
  require(x < 4.0e18L, "ceiling schedule: B_n overflows");
  const long double r = std::round(x);
  // l^n / (l-1) is an exact integer for e.g. l = 2; keep rounding noise from
  // bumping it up by one.
  if (std::abs(x - r) <= 1e-9L * std::max<long double>(1.0L, x)) return static_cast<long long>(r);
  return static_cast<long long>(std::ceil(x));
}

}  // namespace

BlockSchedule BlockSchedule::constant(int b) {
  require(b >= 1, "block length must be at least 1");
  BlockSchedule s;
  s.form_ = Form::Constant;
  s.values_ = {b};
  return s;
}

BlockSchedule BlockSchedule::prefix(std::vector<int> b) {
  require(!b.empty(), "block schedule prefix must be non-empty");
  for (int v : b) require(v >= 1, "block lengths must be at least 1");
  BlockSchedule s;
  s.form_ = Form::Prefix;
  s.values_ = std::move(b);
  return s;
}

BlockSchedule BlockSchedule::ceiling(double l) {
  require(l > 1.0 && std::isfinite(l), "ceiling schedule needs l > 1");
  BlockSchedule s;
  s.form_ = Form::Ceiling;
  s.l_ = l;
  return s;
}

BlockSchedule BlockSchedule::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw ConfigError("schedule '" + std::string(spec) + "': expected kind:args");
  const std::string kind(spec.substr(0, colon));
  const std::string args(spec.substr(colon + 1));
  try {
    if (kind == "const") return constant(std::stoi(args));
    if (kind == "ceil") return ceiling(std::stod(args));
    if (kind == "list") {
      std::vector<int> b;
      std::stringstream in(args);
      std::string tok;
      while (std::getline(in, tok, ',')) b.push_back(std::stoi(tok));
      return prefix(std::move(b));
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError("schedule '" + std::string(spec) + "': " + e.what());
  } catch (const std::logic_error&) {
    throw ConfigError("schedule '" + std::string(spec) + "': malformed number");
  }
  throw ConfigError("schedule '" + std::string(spec) + "': unknown kind '" + kind + "'");
}

int BlockSchedule::b(int n) const {
  require(n >= 1, "block index starts at 1");
  switch (form_) {
    case Form::Constant:
      return values_[0];
    case Form::Prefix:
      return values_[std::min<std::size_t>(static_cast<std::size_t>(n), values_.size()) - 1];
    case Form::Ceiling: {
      const long long d = ceiling_partial_sum(l_, n) - ceiling_partial_sum(l_, n - 1);
      require(d >= 1 && d <= (1LL << 30), "ceiling schedule: block length out of range");
      return static_cast<int>(d);
    }
  }
  return 1;
}

long long BlockSchedule::B(int n) const {
  require(n >= 0, "partial-sum index must be non-negative");
  if (form_ == Form::Ceiling) return ceiling_partial_sum(l_, n);
  if (form_ == Form::Constant) return static_cast<long long>(values_[0]) * n;
  long long s = 0;
  for (int i = 1; i <= n; ++i) s += b(i);
  return s;
}

Interval BlockSchedule::J(int n) const {
  require(n >= 1, "block index starts at 1");
  return {static_cast<int>(1 - B(n)), static_cast<int>(-B(n - 1))};
}

std::optional<int> BlockSchedule::horizon() const {
  if (form_ == Form::Prefix) return static_cast<int>(values_.size());
  return std::nullopt;
}

bool BlockSchedule::beyond_horizon(int n) const {
  auto h = horizon();
  return h && n > *h;
}

std::string BlockSchedule::describe() const {
  std::ostringstream out;
  switch (form_) {
    case Form::Constant:
      out << "const:" << values_[0];
      break;
    case Form::Ceiling:
      out << "ceil:" << l_;
      break;
    case Form::Prefix:
      out << "list:";
      for (std::size_t i = 0; i < values_.size(); ++i) out << (i ? "," : "") << values_[i];
      break;
  }
  return out.str();
}

}  // namespace gchain
