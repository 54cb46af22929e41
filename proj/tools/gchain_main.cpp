// Command-line front end: one subcommand per experiment plus a quick selftest.
// Exit codes: 0 success, 2 configuration error, 3 budget exceeded, 1 other failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gchain/coupling.hpp"
#include "gchain/criteria.hpp"
#include "gchain/errors.hpp"
#include "gchain/experiment.hpp"
#include "gchain/hellinger.hpp"
#include "gchain/renewal.hpp"
#include "gchain/transfer.hpp"

namespace {

using namespace gchain;

struct Flag {
  std::string key;
  std::string value;
  CLI::Option* option = nullptr;
};

// Flags are gathered as raw strings and validated by the config parser, so a
// config file and the command line share one code path.
class FlagSet {
 public:
  void add(CLI::App* app, const std::string& name, const std::string& key, const std::string& help) {
    flags_.push_back(std::make_unique<Flag>());
    Flag& f = *flags_.back();
    f.key = key;
    f.option = app->add_option(name, f.value, help);
  }

  KeyValues collect(const std::string& experiment, const std::string& config_path) const {
    KeyValues kv;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read config file " + config_path);
      std::ostringstream ss;
      ss << in.rdbuf();
      try {
        kv = parse_key_values(ss.str());
      } catch (const InvalidArgument& e) {
        throw ConfigError(config_path + ": " + e.what());
      }
    }
    if (kv.count("experiment") && kv["experiment"] != experiment)
      throw ConfigError("config 'experiment': file says '" + kv["experiment"] + "' but the subcommand is '" +
                        experiment + "'");
    kv["experiment"] = experiment;
    for (const auto& f : flags_)
      if (f->option->count() > 0) kv[f->key] = f->value;
    return kv;
  }

 private:
  std::vector<std::unique_ptr<Flag>> flags_;
};

struct Subcommand {
  CLI::App* app = nullptr;
  FlagSet flags;
  std::string config;
};

void add_common(Subcommand& s, bool needs_seed) {
  s.app->add_option("--config", s.config, "key = value config file; flags override its entries");
  s.flags.add(s.app, "--model", "model", "model definition file");
  s.flags.add(s.app, "--schedule", "schedule", "block schedule: const:<b>, list:<b1>,<b2>,..., ceil:<l> (const:1)");
  s.flags.add(s.app, "--out", "out", "output directory (.)");
  s.flags.add(s.app, "--threads", "threads", "worker threads, 0 = hardware concurrency (0)");
  if (needs_seed) s.flags.add(s.app, "--seed", "seed", "master seed (required)");
}

int selftest() {
  int failures = 0;
  auto check = [&](const char* name, bool ok) {
    std::printf("%s %s\n", ok ? "PASS" : "FAIL", name);
    if (!ok) ++failures;
  };

  {
    const Interval one{0, 0};
    const CouplingTable t = maximal_coupling({one, 2, {0.5, 0.5}}, {one, 2, {0.75, 0.25}});
    check("maximal coupling of (0.5,0.5) and (0.75,0.25) disagrees with mass 0.25",
          std::abs(t.disagreement() - 0.25) < 1e-15 && std::abs(t.joint(1, 0) - 0.25) < 1e-15);
  }
  {
    RenewalSpec spec{{0.5}, {2, 2}, 1};
    const AlphaBeta ab = build_alphabeta(spec);
    const auto u = renewal_solve(ab, 400);
    check("renewal K=1 d=(0.5) b=(2,2) converges to 2/3",
          std::abs(renewal_limit(ab) - 2.0 / 3.0) < 1e-15 && std::abs(u.back() - 2.0 / 3.0) < 1e-9);
  }
  {
    const GModel iid = GModel::iid(Alphabet::binary(), {0.3, 0.7});
    const StationaryMeasure st = stationary(TransferOperator(iid, 2), 1e-14);
    const Symbol w[2] = {0, 0};
    check("i.i.d. (0.3,0.7) stationary P(00) = 0.09", std::abs(st.cylinder(w, 2) - 0.09) < 1e-15);
  }
  {
    const auto vm = VariationModel::power_law(1.0, 0.5);
    const auto r = check_hyp5(vm, 2.0);
    check("window condition fails for c/sqrt(n) with limit log 2",
          r.verdict == Verdict::Violated && std::abs(*r.limit - std::log(2.0)) < 1e-15);
  }
  check("log-series constant 0.14 certified on (1, 2]", certify_as1_constant(2.0).certified);
  check("Hellinger floor at rho = 4 is 0.5", std::abs(hellinger_floor(4.0) - 0.5) < 1e-15);
  std::printf("%s\n", failures == 0 ? "selftest passed" : "selftest FAILED");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"g-chain numerics: transfer operators, block couplings, renewal bounds and uniqueness criteria"};
  app.require_subcommand(1);
  app.set_version_flag("--version", GCHAIN_VERSION);

  std::map<std::string, Subcommand> subs;
  auto make = [&](const std::string& name, const std::string& help, bool needs_seed) -> Subcommand& {
    Subcommand& s = subs[name];
    s.app = app.add_subcommand(name, help);
    add_common(s, needs_seed);
    return s;
  };

  Subcommand& transfer = make("transfer", "oscillation of L^n f and the stationary measure", false);
  transfer.flags.add(transfer.app, "--n-max", "n_max", "largest power n (50)");
  transfer.flags.add(transfer.app, "--truncation", "truncation", "surrogate memory for long-range models (8)");
  transfer.flags.add(transfer.app, "--symbol", "symbol", "f = indicator of this symbol index at coordinate 0 (0)");
  transfer.flags.add(transfer.app, "--tol", "tol", "stationary residual tolerance (1e-12)");

  Subcommand& couple = make("couple", "Monte Carlo block coupling and brute-force d_n brackets", true);
  couple.flags.add(couple.app, "--depth", "depth", "deepest coordinate -n (64)");
  couple.flags.add(couple.app, "--trajectories", "trajectories", "Monte Carlo trajectories (10000)");
  couple.flags.add(couple.app, "--tail-len", "tail_len", "adversarial tail length (64)");
  couple.flags.add(couple.app, "--block-cap", "block_cap", "largest enumerable block (12)");
  couple.flags.add(couple.app, "--dn-max", "dn_max", "brute-force d_n for n <= dn-max (0 = skip)");
  couple.flags.add(couple.app, "--dn-tail", "dn_tail", "enumerated tail length for d_n (3)");

  Subcommand& renewal = make("renewal", "renewal sequence u_n, period and limits of the auxiliary chain", false);
  renewal.flags.add(renewal.app, "--d", "d", "d_1,...,d_K (required)");
  renewal.flags.add(renewal.app, "--b", "b", "b_1,...,b_{K+1} (default: from --schedule)");
  renewal.flags.add(renewal.app, "--K", "K", "truncation level (1)");
  renewal.flags.add(renewal.app, "--K-sweep", "K_sweep", "levels for the limit table (default: K)");
  renewal.flags.add(renewal.app, "--n-max", "n_max", "last index of u (200)");

  Subcommand& criteria = make("criteria", "uniqueness criteria over a variation model", false);
  criteria.flags.add(criteria.app, "--variation", "variation", "power:c=..,p=.. | exp:c=..,r=.. | finite:M=..");
  criteria.flags.add(criteria.app, "--epsilon", "epsilon", "epsilon in the product-series criterion (0.1)");
  criteria.flags.add(criteria.app, "--lambda", "lambda", "lambda values for the window criterion (2)");
  criteria.flags.add(criteria.app, "--checks", "checks", "subset of hyp1,hyp2,hyp3,hyp5,thm_h");
  criteria.flags.add(criteria.app, "--dsequence", "dsequence",
                     "single-site d for thm_h: zero | const:a=.. | power:a=..,p=.. | one-minus-harmonic");
  criteria.flags.add(criteria.app, "--horizon", "horizon", "variation horizon when derived from --model (256)");

  Subcommand& pipeline = make("pipeline", "dbar bounds -> ratio sweep -> renewal bound vs Monte Carlo", true);
  pipeline.flags.add(pipeline.app, "--depth", "depth", "deepest coordinate -n (64)");
  pipeline.flags.add(pipeline.app, "--trajectories", "trajectories", "Monte Carlo trajectories (10000)");
  pipeline.flags.add(pipeline.app, "--tail-len", "tail_len", "adversarial tail length (256)");
  pipeline.flags.add(pipeline.app, "--block-cap", "block_cap", "largest enumerable block (12)");
  pipeline.flags.add(pipeline.app, "--K-sweep", "K_sweep", "truncation levels (1,2,4,8)");
  pipeline.flags.add(pipeline.app, "--profile-horizon", "profile_horizon", "tabulated variation horizon (256)");
  pipeline.flags.add(pipeline.app, "--dbar-horizon", "dbar_horizon", "explicit dbar entries (16)");
  pipeline.flags.add(pipeline.app, "--compare-from", "compare_from", "compare coordinates -n with n >= this (32)");

  app.add_subcommand("selftest", "quick built-in consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand("selftest")) return selftest();
    for (auto& [name, sub] : subs) {
      if (!sub.app->parsed()) continue;
      const ExperimentConfig config = ExperimentConfig::from_key_values(sub.flags.collect(name, sub.config));
      const RunManifest manifest = run(config);
      std::cout << manifest.to_json();
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
