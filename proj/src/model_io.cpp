#include "gchain/model_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "gchain/errors.hpp"

namespace gchain {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("model key '" + key + "': expected a number, got '" + text + "'");
  }
}

int to_int(const std::string& key, const std::string& text) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("model key '" + key + "': expected an integer, got '" + text + "'");
  return v;
}

const std::string& need(const KeyValues& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("model file: missing key '" + key + "'");
  return it->second;
}

}  // namespace

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return kv;
}

GModel model_from_key_values(const KeyValues& kv) {
  const std::string& variant = need(kv, "variant");
  Alphabet alphabet = Alphabet::binary();
  if (auto it = kv.find("alphabet"); it != kv.end()) {
    try {
      alphabet = Alphabet(split_ws(it->second));
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("model key 'alphabet': ") + e.what());
    }
  }

  std::set<std::string> allowed{"variant", "alphabet"};
  auto check_keys = [&] {
    for (const auto& [k, v] : kv)
      if (!allowed.count(k)) throw ConfigError("model file: unknown key '" + k + "' for variant " + variant);
  };

  try {
    if (variant == "finite_memory") {
      allowed.insert({"memory", "table"});
      check_keys();
      const int memory = to_int("memory", need(kv, "memory"));
      std::vector<double> table;
      for (const auto& tok : split_ws(need(kv, "table"))) table.push_back(to_double("table", tok));
      return GModel::finite_memory(alphabet, memory, std::move(table));
    }
    if (variant == "long_range_linear") {
      allowed.insert({"theta", "law", "exponent", "rate", "mass", "coef", "signs"});
      check_keys();
      const double theta = to_double("theta", need(kv, "theta"));
      const std::string& law = need(kv, "law");
      const bool has_mass = kv.count("mass") != 0;
      if (has_mass == (kv.count("coef") != 0)) throw ConfigError("model file: give exactly one of 'mass' or 'coef'");
      const double scale = has_mass ? to_double("mass", kv.at("mass")) : to_double("coef", kv.at("coef"));
      CoefficientLaw coefficients;
      if (law == "power") {
        const double p = to_double("exponent", need(kv, "exponent"));
        coefficients = has_mass ? power_law_with_mass(scale, p) : PowerLawCoefficients{scale, p};
      } else if (law == "exponential") {
        const double r = to_double("rate", need(kv, "rate"));
        coefficients = has_mass ? exponential_with_mass(scale, r) : ExponentialCoefficients{scale, r};
      } else {
        throw ConfigError("model key 'law': expected power or exponential, got '" + law + "'");
      }
      std::array<int, 2> signs{-1, +1};
      if (auto it = kv.find("signs"); it != kv.end()) {
        const auto toks = split_ws(it->second);
        if (toks.size() != 2) throw ConfigError("model key 'signs': expected two values");
        signs = {to_int("signs", toks[0]), to_int("signs", toks[1])};
      }
      return GModel::long_range_linear(alphabet, theta, coefficients, signs);
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("model file: ") + e.what());
  }
  throw ConfigError("model key 'variant': expected finite_memory or long_range_linear, got '" + variant + "'");
}

GModel parse_model(std::string_view text) { return model_from_key_values(parse_key_values(text)); }

GModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string format_model(const GModel& model) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "alphabet =";
  for (const auto& s : model.alphabet().names()) out << ' ' << s;
  out << '\n';
  if (model.kind() == GModel::Kind::FiniteMemory) {
    out << "variant = finite_memory\nmemory = " << model.memory() << "\ntable =";
    for (double v : model.table()) out << ' ' << v;
    out << '\n';
    return out.str();
  }
  out << "variant = long_range_linear\ntheta = " << model.theta() << '\n';
  if (const auto* pl = std::get_if<PowerLawCoefficients>(&model.law()))
    out << "law = power\nexponent = " << pl->p << "\ncoef = " << pl->c << '\n';
  else {
    const auto& ex = std::get<ExponentialCoefficients>(model.law());
    out << "law = exponential\nrate = " << ex.r << "\ncoef = " << ex.c << '\n';
  }
  out << "signs = " << model.sign(0) << ' ' << model.sign(1) << '\n';
  return out.str();
}

}  // namespace gchain
