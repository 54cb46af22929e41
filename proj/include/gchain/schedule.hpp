#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gchain/alphabet.hpp"

namespace gchain {

// Block-length sequence b_1, b_2, ... with partial sums B_n (B_0 = 0) and
// block intervals J_n = [1 - B_n, -B_{n-1}].
//
// Three forms:
//   constant(c)       b_n = c for all n
//   prefix({...})     explicit values; indices past the end reuse the last value
//   ceiling(l)        B_n = ceil(l^n / (l - 1)), b_n = B_n - B_{n-1}
class BlockSchedule {
 public:
  static BlockSchedule constant(int b);
  static BlockSchedule prefix(std::vector<int> b);
  static BlockSchedule ceiling(double l);

  /// "const:<b>", "list:<b1>,<b2>,...", or "ceil:<l>".
  static BlockSchedule parse(std::string_view spec);

  /// b_n for n >= 1.
  int b(int n) const;
  /// B_n for n >= 0.
  long long B(int n) const;
  Interval J(int n) const;

  /// Number of explicitly tabulated values (nullopt when a rule covers all n).
  std::optional<int> horizon() const;
  bool beyond_horizon(int n) const;

  std::string describe() const;

 private:
  enum class Form { Constant, Prefix, Ceiling };
  Form form_ = Form::Constant;
  std::vector<int> values_;
  double l_ = 0.0;
};

}  // namespace gchain
