#include "gchain/alphabet.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

#include "gchain/errors.hpp"

namespace gchain {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  require(symbols_.size() >= 2, "alphabet needs at least 2 symbols");
  require(symbols_.size() <= 255, "alphabet too large");
  std::set<std::string> seen(symbols_.begin(), symbols_.end());
  require(seen.size() == symbols_.size(), "alphabet symbols must be unique");
  for (const auto& s : symbols_) require(!s.empty(), "empty symbol name");
}

Alphabet Alphabet::binary() { return Alphabet({"0", "1"}); }

Symbol Alphabet::index_of(std::string_view name) const {
  auto it = std::find(symbols_.begin(), symbols_.end(), name);
  if (it == symbols_.end()) throw InvalidArgument("symbol '" + std::string(name) + "' not in alphabet");
  return static_cast<Symbol>(it - symbols_.begin());
}

Word::Word(int anchor, std::vector<Symbol> coords) : anchor_(anchor), coords_(std::move(coords)) {}

Word Word::parse(const Alphabet& alphabet, std::string_view text, int anchor) {
  bool single = std::all_of(alphabet.names().begin(), alphabet.names().end(),
                            [](const std::string& s) { return s.size() == 1; });
  std::vector<Symbol> coords;
  if (single && text.find_first_of(" \t") == std::string_view::npos) {
    for (char c : text) coords.push_back(alphabet.index_of(std::string_view(&c, 1)));
  } else {
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) coords.push_back(alphabet.index_of(tok));
  }
  return Word(anchor, std::move(coords));
}

Symbol Word::at(int i) const {
  if (!interval().contains(i))
    throw InvalidArgument("coordinate " + std::to_string(i) + " outside word");
  return coords_[static_cast<std::size_t>(i - anchor_)];
}

void Word::validate(const Alphabet& alphabet) const {
  for (Symbol s : coords_)
    if (!alphabet.contains(s)) throw InvalidArgument("symbol index " + std::to_string(s) + " outside alphabet");
}

std::string Word::to_string(const Alphabet& alphabet) const {
  std::string out;
  bool single = std::all_of(alphabet.names().begin(), alphabet.names().end(),
                            [](const std::string& s) { return s.size() == 1; });
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (!single && i > 0) out += ' ';
    out += alphabet.name(coords_[i]);
  }
  return out;
}

Word concat(const Word& left, const Word& right) {
  if (left.empty()) return right;
  if (right.empty()) return left;
  require(left.interval().hi + 1 == right.anchor(), "concat: words are not adjacent");
  std::vector<Symbol> coords(left.symbols().begin(), left.symbols().end());
  coords.insert(coords.end(), right.symbols().begin(), right.symbols().end());
  return Word(left.anchor(), std::move(coords));
}

std::size_t word_index(std::span<const Symbol> word, std::size_t q) {
  std::size_t idx = 0;
  for (Symbol s : word) idx = idx * q + s;
  return idx;
}

void decode_word(std::size_t index, std::size_t q, std::span<Symbol> out) {
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = static_cast<Symbol>(index % q);
    index /= q;
  }
}

std::size_t checked_power(std::size_t q, int n, std::size_t cap) {
  std::size_t r = 1;
  for (int i = 0; i < n; ++i) {
    if (r > cap / q) throw BudgetExceeded("state count " + std::to_string(q) + "^" + std::to_string(n) +
                                          " exceeds budget " + std::to_string(cap));
    r *= q;
  }
  if (r > cap) throw BudgetExceeded("state count exceeds budget " + std::to_string(cap));
  return r;
}

}  // namespace gchain
