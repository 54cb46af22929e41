#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gchain {

using Symbol = std::uint8_t;

/// Ordered finite symbol set. Symbols are referred to by their position.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> symbols);

  /// The alphabet {"0", "1"}.
  static Alphabet binary();

  std::size_t size() const { return symbols_.size(); }
  const std::string& name(Symbol s) const { return symbols_.at(s); }
  const std::vector<std::string>& names() const { return symbols_; }
  Symbol index_of(std::string_view name) const;
  bool contains(Symbol s) const { return s < symbols_.size(); }

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> symbols_;
};

/// Closed integer interval [lo, hi]; empty when lo > hi.
struct Interval {
  int lo = 0;
  int hi = -1;

  bool empty() const { return lo > hi; }
  int length() const { return empty() ? 0 : hi - lo + 1; }
  bool contains(int i) const { return lo <= i && i <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Finite sequence of symbols occupying the coordinates [anchor, anchor + length - 1].
class Word {
 public:
  Word() = default;
  Word(int anchor, std::vector<Symbol> coords);

  /// Parses symbol names. Single-character names may be written run together
  /// ("0110"); otherwise names are whitespace separated.
  static Word parse(const Alphabet& alphabet, std::string_view text, int anchor = 0);

  int anchor() const { return anchor_; }
  int length() const { return static_cast<int>(coords_.size()); }
  bool empty() const { return coords_.empty(); }
  Interval interval() const { return {anchor_, anchor_ + length() - 1}; }

  /// Symbol at absolute coordinate i.
  Symbol at(int i) const;
  std::span<const Symbol> symbols() const { return coords_; }

  /// Checks every symbol against the alphabet; throws InvalidArgument otherwise.
  void validate(const Alphabet& alphabet) const;

  std::string to_string(const Alphabet& alphabet) const;

  bool operator==(const Word&) const = default;

 private:
  int anchor_ = 0;
  std::vector<Symbol> coords_;
};

/// Concatenation of two words on adjacent intervals (left then right).
Word concat(const Word& left, const Word& right);

// Lexicographic word indexing, leftmost symbol most significant.
std::size_t word_index(std::span<const Symbol> word, std::size_t q);
void decode_word(std::size_t index, std::size_t q, std::span<Symbol> out);

/// q^n, throwing BudgetExceeded if the result exceeds `cap`.
std::size_t checked_power(std::size_t q, int n, std::size_t cap);

}  // namespace gchain
