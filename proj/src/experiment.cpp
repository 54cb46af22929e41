#include "gchain/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "gchain/coupling.hpp"
#include "gchain/criteria.hpp"
#include "gchain/errors.hpp"
#include "gchain/pipeline.hpp"
#include "gchain/renewal.hpp"
#include "gchain/transfer.hpp"
#include "json.hpp"

namespace gchain {

namespace {

using nlohmann::json;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string num(long long x) { return std::to_string(x); }
std::string num(int x) { return std::to_string(x); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& key, const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("config '" + key + "': empty list item");
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError("config '" + key + "': empty list");
  return out;
}

long long parse_integer(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config '" + key + "': expected an integer, got '" + text + "'");
}

int parse_int(const std::string& key, const std::string& text) {
  const long long v = parse_integer(key, text);
  if (v < -2147483647LL || v > 2147483647LL) throw ConfigError("config '" + key + "': value out of range");
  return static_cast<int>(v);
}

double parse_real(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config '" + key + "': expected a real number, got '" + text + "'");
}

std::uint64_t parse_seed(const std::string& text) {
  try {
    std::size_t used = 0;
    if (!text.empty() && text[0] != '-') {
      const unsigned long long v = std::stoull(text, &used, 0);
      if (used == text.size()) return v;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("config 'seed': expected a non-negative integer, got '" + text + "'");
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    if constexpr (std::is_same_v<T, std::string>)
      s += v[i];
    else
      s += num(v[i]);
  }
  return s;
}

void positive(const char* key, double v) {
  if (!(v > 0)) throw ConfigError(std::string("config '") + key + "': must be positive");
}

void non_negative(const char* key, double v) {
  if (!(v >= 0)) throw ConfigError(std::string("config '") + key + "': must be non-negative");
}

// Wraps library precondition failures raised while building objects from the
// config so they surface as configuration errors.
template <class F>
auto as_config(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

class Artifacts {
 public:
  explicit Artifacts(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& contents) {
    const auto path = dir_ / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path.string());
    os << contents;
    if (!os) throw Error("failed writing " + path.string());
    outputs_.push_back({name, fnv1a64_hex(contents), contents.size()});
  }

  const std::vector<OutputFile>& outputs() const { return outputs_; }

 private:
  std::filesystem::path dir_;
  std::vector<OutputFile> outputs_;
};

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string> header) { row(std::vector<std::string>(header)); }
  explicit Csv(const std::vector<std::string>& header) { row(header); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json limit_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return "inf";
  return *v;
}

GModel require_model(const ExperimentConfig& c) {
  if (c.model.empty()) throw ConfigError("config 'model': required for the " + c.experiment + " experiment");
  if (!std::filesystem::exists(c.model)) throw ConfigError("config 'model': file not found: " + c.model);
  return load_model(c.model);
}

BlockSchedule schedule_of(const ExperimentConfig& c) { return BlockSchedule::parse(c.schedule); }

// ---------------------------------------------------------------------------

void run_transfer(const ExperimentConfig& c, Artifacts& art, RunManifest&) {
  const GModel model = require_model(c);
  if (c.symbol < 0 || static_cast<std::size_t>(c.symbol) >= model.q())
    throw ConfigError("config 'symbol': outside the model alphabet");
  const int n_max = c.n_max < 0 ? 50 : c.n_max;
  const CylinderFunction f = CylinderFunction::indicator(model.q(), static_cast<Symbol>(c.symbol));
  const auto diag = uniqueness_diagnostic(model, f, n_max, c.truncation);

  Csv csv({"n", "oscillation = sup L^n f - inf L^n f", "truncation_error"});
  for (const auto& p : diag) csv.row({num(p.n), num(p.oscillation), num(p.truncation_error)});
  art.write("transfer.csv", csv.str());

  const bool surrogate = model.kind() != GModel::Kind::FiniteMemory;
  const TransferOperator op(surrogate ? truncated_surrogate(model, c.truncation) : model);
  const StationaryMeasure st = stationary(op, c.tol);
  Csv stat({"word", "mu[word] (stationary cylinder probability)"});
  std::vector<Symbol> w(static_cast<std::size_t>(st.window));
  for (std::size_t i = 0; i < st.probs.size(); ++i) {
    decode_word(i, model.q(), w);
    stat.row({Word(0, w).to_string(model.alphabet()), num(st.probs[i])});
  }
  art.write("stationary.csv", stat.str());

  json j = {{"surrogate_memory", surrogate ? json(c.truncation) : json(nullptr)},
            {"window", st.window},
            {"residual", st.residual},
            {"iterations", st.iterations},
            {"converged", st.converged},
            {"unique", st.unique},
            {"final_oscillation", diag.back().oscillation},
            {"final_truncation_error", diag.back().truncation_error}};
  art.write("transfer.json", dump(j));
}

void warn_past_horizon(const std::string& schedule) {
  std::fprintf(stderr, "warning: an agreement run outgrew schedule %s; its last block length was reused\n",
               schedule.c_str());
}

void run_couple(const ExperimentConfig& c, Artifacts& art, RunManifest&) {
  const GModel model = require_model(c);
  const BlockSchedule schedule = schedule_of(c);
  const int tail_len = c.tail_len < 0 ? 64 : c.tail_len;
  const auto [x_tail, y_tail] = adversarial_tails(model, tail_len);
  BlockCouplingOptions opt;
  opt.block_cap = c.block_cap;
  const DisagreementEstimate est =
      estimate_disagreement(model, schedule, c.depth, x_tail, y_tail, c.trajectories, *c.seed, opt, c.threads);

  Csv dis({"coordinate", "empirical_disagreement = P[x_{-n} != y_{-n}]", "stderr"});
  for (std::size_t i = 0; i < est.frequency.size(); ++i)
    dis.row({num(-static_cast<long long>(i)), num(est.frequency[i]), num(est.standard_error[i])});
  art.write("couple_disagreement.csv", dis.str());

  Csv runs({"k (agreement run)", "blocks", "disagreements", "frequency"});
  for (std::size_t k = 0; k < est.blocks_at_run.size(); ++k) {
    const double f = est.blocks_at_run[k] ? double(est.disagreements_at_run[k]) / double(est.blocks_at_run[k]) : 0.0;
    runs.row({num(static_cast<long long>(k)), num(est.blocks_at_run[k]), num(est.disagreements_at_run[k]), num(f)});
  }
  art.write("couple_runs.csv", runs.str());

  if (c.dn_max > 0) {
    Csv dn({"n", "dn_lower", "dn_upper", "reference TV", "configurations"});
    for (int n = 1; n <= c.dn_max; ++n) {
      const DnBounds b = dn_bruteforce(model, schedule, n, c.dn_tail, std::size_t{1} << 22, c.threads);
      dn.row({num(n), num(b.lower), num(b.upper), num(b.reference), num(static_cast<long long>(b.configurations))});
    }
    art.write("dn.csv", dn.str());
  }

  json j = {{"trajectories", est.trajectories},
            {"depth", c.depth},
            {"tail_len", tail_len},
            {"max_truncation_error", est.max_truncation_error},
            {"past_horizon", est.past_horizon}};
  if (est.past_horizon) warn_past_horizon(c.schedule);
  art.write("couple.json", dump(j));
}

void run_renewal(const ExperimentConfig& c, Artifacts& art, RunManifest&) {
  if (c.d.empty()) throw ConfigError("config 'd': required for the renewal experiment");
  const BlockSchedule schedule = c.b.empty() ? schedule_of(c) : as_config("config 'b'", [&] {
    return BlockSchedule::prefix(c.b);
  });
  const std::vector<int> sweep = c.K_sweep.empty() ? std::vector<int>{c.K} : c.K_sweep;
  const int n_max = c.n_max < 0 ? 200 : c.n_max;

  const RenewalSpec spec = as_config("renewal spec", [&] { return make_renewal_spec(c.d, schedule, c.K); });
  const AlphaBeta ab = build_alphabeta(spec);
  const std::vector<double> u = renewal_solve(ab, n_max);
  Csv us({"n", "u_n = Ptilde[1 at -n]"});
  for (int n = 0; n <= n_max; ++n) us.row({num(n), num(u[n])});
  art.write("renewal_u.csv", us.str());

  Csv ab_csv({"i", "alpha_i", "beta_i"});
  for (long long i = 0; i <= ab.span(); ++i) ab_csv.row({num(i), num(ab.alpha_at(i)), num(ab.beta_at(i))});
  art.write("renewal_alphabeta.csv", ab_csv.str());

  Csv lim({"K", "period m", "R_K (block ratio)", "renewal_limit = lim u_{mn}", "limsup u_n"});
  for (int K : sweep) {
    const RenewalSpec s = as_config("renewal spec", [&] { return make_renewal_spec(c.d, schedule, K); });
    const AlphaBeta a = build_alphabeta(s);
    lim.row({num(K), num(a.period), num(block_ratio(s)), num(renewal_limit(a)), num(renewal_limsup(a))});
  }
  art.write("renewal_limits.csv", lim.str());

  json j = {{"K", c.K},
            {"period", ab.period},
            {"renewal_limit", renewal_limit(ab)},
            {"mean_limit", renewal_mean_limit(ab)},
            {"limsup", renewal_limsup(ab)},
            {"final_u", u.back()}};
  art.write("renewal.json", dump(j));
}

void run_criteria(const ExperimentConfig& c, Artifacts& art, RunManifest& manifest) {
  std::optional<VariationModel> vm;
  if (!c.variation.empty())
    vm = VariationModel::parse(c.variation);
  else if (!c.model.empty())
    vm = VariationModel::from_profile(variation_profile(require_model(c), c.horizon));

  json reports = json::array();
  bool consistent = true;
  std::optional<Verdict> hyp1, hyp3;
  std::set<Verdict> hyp5_verdicts;
  auto emit = [&](const CriterionReport& r, const std::string& file, std::optional<double> lambda) {
    Csv ev(r.evidence.columns);
    for (const auto& row : r.evidence.rows) {
      std::vector<std::string> cells;
      for (double x : row) cells.push_back(num(x));
      ev.row(cells);
    }
    art.write(file, ev.str());
    json e = {{"id", r.id},
              {"verdict", std::string(to_string(r.verdict))},
              {"reasoning", r.reasoning},
              {"limit", limit_json(r.limit)},
              {"evidence", file}};
    if (lambda) e["lambda"] = *lambda;
    reports.push_back(e);
  };

  for (const std::string& check : c.checks) {
    if (check == "thm_h") {
      emit(check_thm_h(DSequence::parse(c.dsequence)), "criteria_thm_h.csv", std::nullopt);
      continue;
    }
    if (!vm) throw ConfigError("config 'variation': required for " + check + " (or give 'model')");
    if (check == "hyp1") {
      const auto r = check_hyp1(*vm);
      hyp1 = r.verdict;
      emit(r, "criteria_hyp1.csv", std::nullopt);
    } else if (check == "hyp2") {
      emit(check_hyp2(*vm, c.epsilon), "criteria_hyp2.csv", std::nullopt);
    } else if (check == "hyp3") {
      const auto r = check_hyp3(*vm);
      hyp3 = r.verdict;
      emit(r, "criteria_hyp3.csv", std::nullopt);
    } else if (check == "hyp5") {
      for (std::size_t i = 0; i < c.lambda.size(); ++i) {
        const auto r = check_hyp5(*vm, c.lambda[i]);
        hyp5_verdicts.insert(r.verdict);
        emit(r, "criteria_hyp5_" + std::to_string(i) + ".csv", c.lambda[i]);
      }
    }
  }
  // Self-consistency: the verdict on the window condition does not depend on
  // lambda, and either square-summability or o(n^-1/2) decay implies it.
  if (hyp5_verdicts.size() > 1) consistent = false;
  if (hyp5_verdicts.size() == 1) {
    const Verdict v5 = *hyp5_verdicts.begin();
    for (const auto& h : {hyp1, hyp3})
      if (h == Verdict::Satisfied && v5 != Verdict::Satisfied) consistent = false;
  }
  manifest.checks_passed = consistent;

  json j = {{"variation", vm ? json(vm->describe()) : json(nullptr)},
            {"epsilon", c.epsilon},
            {"reports", reports},
            {"consistent", consistent}};
  art.write("criteria.json", dump(j));
}

void run_pipeline_experiment(const ExperimentConfig& c, Artifacts& art, RunManifest& manifest) {
  const GModel model = require_model(c);
  const BlockSchedule schedule = schedule_of(c);
  PipelineOptions opt;
  opt.profile_horizon = c.profile_horizon;
  opt.dbar_horizon = c.dbar_horizon;
  if (!c.K_sweep.empty()) opt.K_sweep = c.K_sweep;
  opt.depth = c.depth;
  opt.trajectories = c.trajectories;
  opt.seed = *c.seed;
  opt.tail_len = c.tail_len < 0 ? 256 : c.tail_len;
  opt.compare_from = c.compare_from;
  opt.coupling.block_cap = c.block_cap;
  opt.threads = c.threads;
  const PipelineResult res = as_config("pipeline", [&] { return run_pipeline(model, schedule, opt); });

  Csv dbar_csv({"n", "rho window first", "rho window last", "d_n bound (Hellinger product)",
                "d_n bound (log series)", "d_n bound", "dbar_n"});
  for (std::size_t i = 0; i < res.dbar.bounds.size(); ++i) {
    const CorollaryBounds& b = res.dbar.bounds[i];
    dbar_csv.row({num(b.n), num(b.first), num(b.last), b.rg2_applicable ? num(b.rg2) : "",
                  b.as_applicable ? num(b.as) : "", num(res.dbar.d[i]), num(res.dbar.dbar[i])});
  }
  art.write("pipeline_dbar.csv", dbar_csv.str());

  Csv bound({"K", "R_K (block ratio)", "renewal_limit", "limsup bound"});
  for (std::size_t i = 0; i < res.bounds.size(); ++i)
    bound.row({num(res.bounds[i].K), num(res.ratios[i].ratio), num(res.bounds[i].limit), num(res.bounds[i].limsup)});
  art.write("pipeline_bound.csv", bound.str());

  Csv mc({"coordinate", "empirical_disagreement = P[x_{-n} != y_{-n}]", "stderr", "renewal bound"});
  for (std::size_t i = 0; i < res.mc.frequency.size(); ++i)
    mc.row({num(-static_cast<long long>(i)), num(res.mc.frequency[i]), num(res.mc.standard_error[i]), num(res.bound)});
  art.write("pipeline_mc.csv", mc.str());

  Csv runs({"k (agreement run)", "blocks", "disagreements", "frequency", "sigma", "dbar_{k+1}", "ok"});
  for (const RunCheck& r : res.runs)
    runs.row({num(r.k), num(r.blocks), num(r.disagreements), num(r.frequency), num(r.sigma), num(r.dbar_next),
              r.ok ? "1" : "0"});
  art.write("pipeline_runs.csv", runs.str());

  manifest.checks_passed = res.ok();
  json j = {{"variation", res.variation.describe()},
            {"dbar_tail_bound", res.dbar.tail_bound},
            {"bound", res.bound},
            {"coordinate_violations", res.coordinate_violations},
            {"max_truncation_error", res.mc.max_truncation_error},
            {"past_horizon", res.mc.past_horizon},
            {"ok", res.ok()}};
  if (res.mc.past_horizon) warn_past_horizon(c.schedule);
  art.write("pipeline.json", dump(j));
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::from_key_values(const KeyValues& kv) {
  ExperimentConfig c;
  for (const auto& [key, value] : kv) {
    if (key == "experiment") c.experiment = value;
    else if (key == "model") c.model = value;
    else if (key == "schedule") c.schedule = value;
    else if (key == "out") c.out = value;
    else if (key == "seed") c.seed = parse_seed(value);
    else if (key == "threads") {
      const int t = parse_int(key, value);
      non_negative("threads", t);
      c.threads = static_cast<unsigned>(t);
    }
    else if (key == "n_max") c.n_max = parse_int(key, value);
    else if (key == "truncation") c.truncation = parse_int(key, value);
    else if (key == "symbol") c.symbol = parse_int(key, value);
    else if (key == "tol") c.tol = parse_real(key, value);
    else if (key == "depth") c.depth = parse_int(key, value);
    else if (key == "trajectories") c.trajectories = parse_int(key, value);
    else if (key == "tail_len") c.tail_len = parse_int(key, value);
    else if (key == "block_cap") c.block_cap = parse_int(key, value);
    else if (key == "dn_max") c.dn_max = parse_int(key, value);
    else if (key == "dn_tail") c.dn_tail = parse_int(key, value);
    else if (key == "d") {
      c.d.clear();
      for (const auto& s : split_list(key, value)) c.d.push_back(parse_real(key, s));
    } else if (key == "b") {
      c.b.clear();
      for (const auto& s : split_list(key, value)) c.b.push_back(parse_int(key, s));
    } else if (key == "K") c.K = parse_int(key, value);
    else if (key == "K_sweep") {
      c.K_sweep.clear();
      for (const auto& s : split_list(key, value)) c.K_sweep.push_back(parse_int(key, s));
    } else if (key == "variation") c.variation = value;
    else if (key == "epsilon") c.epsilon = parse_real(key, value);
    else if (key == "lambda") {
      c.lambda.clear();
      for (const auto& s : split_list(key, value)) c.lambda.push_back(parse_real(key, s));
    } else if (key == "checks") c.checks = split_list(key, value);
    else if (key == "dsequence") c.dsequence = value;
    else if (key == "horizon") c.horizon = parse_int(key, value);
    else if (key == "profile_horizon") c.profile_horizon = parse_int(key, value);
    else if (key == "dbar_horizon") c.dbar_horizon = parse_int(key, value);
    else if (key == "compare_from") c.compare_from = parse_int(key, value);
    else throw ConfigError("config: unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return from_key_values(parse_key_values(ss.str()));
  } catch (const InvalidArgument& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void ExperimentConfig::validate() const {
  static const std::set<std::string> kinds = {"transfer", "couple", "renewal", "criteria", "pipeline"};
  if (!kinds.count(experiment))
    throw ConfigError("config 'experiment': expected transfer, couple, renewal, criteria or pipeline, got '" +
                      experiment + "'");
  if ((experiment == "couple" || experiment == "pipeline") && !seed)
    throw ConfigError("config 'seed': required for the " + experiment + " experiment");
  if (experiment != "renewal" || b.empty()) BlockSchedule::parse(schedule);
  if (n_max < -1) throw ConfigError("config 'n_max': must be non-negative");
  non_negative("truncation", truncation);
  non_negative("symbol", symbol);
  positive("tol", tol);
  non_negative("depth", depth);
  positive("trajectories", trajectories);
  if (tail_len < -1) throw ConfigError("config 'tail_len': must be non-negative");
  positive("block_cap", block_cap);
  non_negative("dn_max", dn_max);
  non_negative("dn_tail", dn_tail);
  for (double x : d)
    if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("config 'd': values must lie in [0, 1]");
  for (int x : b) positive("b", x);
  positive("K", K);
  for (int x : K_sweep) positive("K_sweep", x);
  positive("epsilon", epsilon);
  for (double x : lambda)
    if (!(x > 1.0)) throw ConfigError("config 'lambda': values must exceed 1");
  static const std::set<std::string> known = {"hyp1", "hyp2", "hyp3", "hyp5", "thm_h"};
  for (const auto& ch : checks)
    if (!known.count(ch)) throw ConfigError("config 'checks': unknown check '" + ch + "'");
  if (!variation.empty()) VariationModel::parse(variation);
  DSequence::parse(dsequence);
  non_negative("horizon", horizon);
  non_negative("profile_horizon", profile_horizon);
  positive("dbar_horizon", dbar_horizon);
  non_negative("compare_from", compare_from);
  if (experiment == "pipeline" && compare_from > depth)
    throw ConfigError("config 'compare_from': must not exceed depth");
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  os << "experiment = " << experiment << "\nmodel = " << model << "\nschedule = " << schedule
     << "\nseed = " << (seed ? std::to_string(*seed) : "none") << "\nthreads = " << threads << "\nn_max = " << n_max
     << "\ntruncation = " << truncation << "\nsymbol = " << symbol << "\ntol = " << num(tol) << "\ndepth = " << depth
     << "\ntrajectories = " << trajectories << "\ntail_len = " << tail_len << "\nblock_cap = " << block_cap
     << "\ndn_max = " << dn_max << "\ndn_tail = " << dn_tail << "\nd = " << join(d) << "\nb = " << join(b)
     << "\nK = " << K << "\nK_sweep = " << join(K_sweep) << "\nvariation = " << variation
     << "\nepsilon = " << num(epsilon) << "\nlambda = " << join(lambda) << "\nchecks = " << join(checks)
     << "\ndsequence = " << dsequence << "\nhorizon = " << horizon << "\nprofile_horizon = " << profile_horizon
     << "\ndbar_horizon = " << dbar_horizon << "\ncompare_from = " << compare_from << "\n";
  // The model is identified by its contents, not its path.
  if (!model.empty() && std::filesystem::exists(model)) os << "model_contents =\n" << format_model(load_model(model));
  return os.str();
}

std::string RunManifest::to_json() const {
  json outs = json::array();
  for (const auto& o : outputs) outs.push_back({{"file", o.name}, {"fnv1a64", o.checksum}, {"bytes", o.bytes}});
  json j = {{"experiment", experiment},
            {"config_hash", config_hash},
            {"version", version},
            {"wall_seconds", wall_seconds},
            {"outputs", outs}};
  j["checks_passed"] = checks_passed ? json(*checks_passed) : json(nullptr);
  return j.dump(2) + "\n";
}

std::string fnv1a64_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunManifest run(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  std::error_code ec;
  std::filesystem::create_directories(config.out, ec);
  if (ec) throw ConfigError("config 'out': cannot create " + config.out.string() + ": " + ec.message());

  RunManifest m;
  m.experiment = config.experiment;
  m.config_hash = fnv1a64_hex(config.canonical());
  m.version = GCHAIN_VERSION;
  Artifacts art(config.out);
  if (config.experiment == "transfer") run_transfer(config, art, m);
  else if (config.experiment == "couple") run_couple(config, art, m);
  else if (config.experiment == "renewal") run_renewal(config, art, m);
  else if (config.experiment == "criteria") run_criteria(config, art, m);
  else run_pipeline_experiment(config, art, m);
  m.outputs = art.outputs();
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ofstream os(config.out / "manifest.json");
  os << m.to_json();
  if (!os) throw Error("cannot write manifest.json");
  return m;
}

}  // namespace gchain
