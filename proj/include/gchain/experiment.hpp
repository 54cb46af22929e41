#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gchain/model_io.hpp"

namespace gchain {

// Effective configuration of one experiment. Configs are read from the same
// `key = value` text as model files (lists are comma separated); CLI flags
// produce the same keys. Keys and defaults:
//
//   experiment     transfer | couple | renewal | criteria | pipeline   (required)
//   model          path to a model definition file
//   schedule       block schedule (const:1, list:1,2,4, ceil:1.25)     const:1
//   out            output directory                                   .
//   seed           master seed (required for couple and pipeline)
//   threads        worker threads, 0 = hardware concurrency           0
//
//   transfer:  n_max 50, truncation 8, symbol 0 (indicator at coordinate 0), tol 1e-12
//   couple:    depth 64, trajectories 10000, tail_len 64, block_cap 12,
//              dn_max 0 (d_n brackets for n <= dn_max), dn_tail 3
//   renewal:   d (list, required), b (list; else taken from schedule), K 1,
//              K_sweep (list; default K), n_max 200
//   criteria:  variation (power:c=..,p=.. | exp:c=..,r=.. | finite:M=..; else
//              derived from model), epsilon 0.1, lambda (list) 2,
//              checks (list of hyp1 hyp2 hyp3 hyp5 thm_h) hyp1,hyp2,hyp3,hyp5,
//              dsequence (for thm_h) zero, horizon 256
//   pipeline:  depth 64, trajectories 10000, tail_len 256, block_cap 12,
//              K_sweep 1,2,4,8, profile_horizon 256, dbar_horizon 16, compare_from 32
struct ExperimentConfig {
  std::string experiment;
  std::string model;
  std::string schedule = "const:1";
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;

  int n_max = -1;  // experiment-specific default when negative
  int truncation = 8;
  int symbol = 0;
  double tol = 1e-12;

  int depth = 64;
  int trajectories = 10000;
  int tail_len = -1;
  int block_cap = 12;
  int dn_max = 0;
  int dn_tail = 3;

  std::vector<double> d;
  std::vector<int> b;
  int K = 1;
  std::vector<int> K_sweep;

  std::string variation;
  double epsilon = 0.1;
  std::vector<double> lambda = {2.0};
  std::vector<std::string> checks = {"hyp1", "hyp2", "hyp3", "hyp5"};
  std::string dsequence = "zero";
  int horizon = 256;

  int profile_horizon = 256;
  int dbar_horizon = 16;
  int compare_from = 32;

  /// Throws ConfigError naming the offending key.
  static ExperimentConfig from_key_values(const KeyValues& kv);
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Field-level validation; throws ConfigError.
  void validate() const;
  /// Fixed-order `key = value` rendering of every effective setting except `out`.
  std::string canonical() const;
};

struct OutputFile {
  std::string name;
  std::string checksum;  // FNV-1a 64, hex
  std::size_t bytes = 0;
};

struct RunManifest {
  std::string experiment;
  std::string config_hash;  // FNV-1a 64 of canonical()
  std::string version;
  double wall_seconds = 0.0;
  std::vector<OutputFile> outputs;
  std::optional<bool> checks_passed;  // pipeline and criteria self-consistency

  std::string to_json() const;
};

/// FNV-1a 64-bit hash as 16 hex digits.
std::string fnv1a64_hex(std::string_view data);

/// Runs the experiment, writes its artifacts and manifest.json into `out`.
/// Inner BudgetExceeded errors propagate unchanged.
RunManifest run(const ExperimentConfig& config);

}  // namespace gchain
