#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "gchain/gmodel.hpp"

namespace gchain {

// Model definition files are line-oriented `key = value` text. `#` starts a
// comment; blank lines are ignored; keys are case-sensitive and may appear once.
//
//   variant  = finite_memory | long_range_linear        (required)
//   alphabet = <symbol> <symbol> ...                    (default: 0 1)
//
// finite_memory:
//   memory   = M                                        (required)
//   table    = |S|^(M+1) reals, lexicographic order over x_0 .. x_M with
//              x_0 most significant                     (required)
//
// long_range_linear (binary alphabet):
//   theta    = real in (0, 1/2)                         (required)
//   law      = power | exponential                      (required)
//   exponent = p > 1          (power)
//   rate     = r in (0, 1)    (exponential)
//   mass     = sum_k a_k in (0, 1]  -- or --  coef = c (a_k = c k^-p or c r^k)
//   signs    = s(first) s(second), each -1 or +1        (default: -1 +1)
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::string_view text);
GModel model_from_key_values(const KeyValues& kv);
GModel parse_model(std::string_view text);
GModel load_model(const std::filesystem::path& path);

/// Inverse of parse_model (round-trips through parse_model).
std::string format_model(const GModel& model);

}  // namespace gchain
