#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gchain/errors.hpp"
#include "gchain/gmodel.hpp"
#include "gchain/model_io.hpp"
#include "oracles.hpp"

using namespace gchain;

namespace {

GModel iid37() { return GModel::iid(Alphabet::binary(), {0.3, 0.7}); }

GModel long_range(double theta = 0.25, double mass = 0.5, double p = 2.0) {
  return GModel::long_range_linear(Alphabet::binary(), theta, power_law_with_mass(mass, p));
}

GModel random_finite(std::mt19937_64& rng, std::size_t q, int M) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < q; ++i) names.push_back(std::string(1, char('a' + i)));
  std::size_t contexts = 1;
  for (int i = 0; i < M; ++i) contexts *= q;
  std::vector<double> table(q * contexts);
  for (std::size_t c = 0; c < contexts; ++c) {
    const auto col = oracle::random_simplex(rng, q, 0.05);
    for (std::size_t s = 0; s < q; ++s) table[s * contexts + c] = col[s];
  }
  return GModel::finite_memory(Alphabet(names), M, table);
}

std::vector<Symbol> random_word(std::mt19937_64& rng, std::size_t q, int len) {
  std::uniform_int_distribution<int> u(0, int(q) - 1);
  std::vector<Symbol> w(static_cast<std::size_t>(len));
  for (auto& s : w) s = static_cast<Symbol>(u(rng));
  return w;
}

}  // namespace

TEST(Alphabet, RejectsDuplicatesAndSingletons) {
  EXPECT_THROW(Alphabet({"a"}), InvalidArgument);
  EXPECT_THROW(Alphabet({"a", "a"}), InvalidArgument);
  EXPECT_EQ(Alphabet::binary().size(), 2u);
}

TEST(Word, ParseAndEmptyInterval) {
  const Word w = Word::parse(Alphabet::binary(), "0110", -3);
  EXPECT_EQ(w.interval(), (Interval{-3, 0}));
  EXPECT_EQ(w.at(-2), 1);
  EXPECT_TRUE((Interval{2, 1}).empty());
  EXPECT_THROW(Word::parse(Alphabet::binary(), "012"), InvalidArgument);
}

TEST(Zeta, MatchesClosedForms) {
  EXPECT_NEAR(riemann_zeta(2.0), std::numbers::pi * std::numbers::pi / 6.0, 1e-14);
  EXPECT_NEAR(riemann_zeta(4.0), std::pow(std::numbers::pi, 4) / 90.0, 1e-14);
}

TEST(EvalG, IidReadsTable) {
  const GValue g = eval_g(iid37(), Word::parse(Alphabet::binary(), "0"), 1);
  EXPECT_EQ(g.value, 0.3);
  EXPECT_EQ(g.error, 0.0);
}

TEST(EvalG, LongRangeTwoSymbolWord) {
  // a_k = c k^-2 with c = 0.5 * 6/pi^2; word "11" keeps only a_1.
  const double c = 0.5 * 6.0 / (std::numbers::pi * std::numbers::pi);
  const GValue g = eval_g(long_range(), Word::parse(Alphabet::binary(), "11"), 2);
  EXPECT_NEAR(g.value, 0.5 + 0.25 * c, 1e-15);
  const double exact_tail = 0.25 * (0.5 - c);
  EXPECT_GE(g.error, exact_tail - 1e-15);
  EXPECT_LE(g.error, exact_tail + 1e-6);
}

TEST(EvalG, ShortFiniteMemoryWordIsOnlyABound) {
  std::mt19937_64 rng(3);
  const GModel m = random_finite(rng, 2, 2);
  const GValue g = eval_g(m, Word(0, {1}), 5);
  EXPECT_FALSE(g.exact());
  // Every completion lies within the reported error.
  for (Symbol a : {0, 1})
    for (Symbol b : {0, 1}) {
      const std::vector<Symbol> full = {1, a, b};
      EXPECT_LE(std::abs(m.eval(full).value - g.value), g.error + 1e-15);
    }
  EXPECT_TRUE(eval_g(m, Word(0, {1, 0, 1}), 5).exact());
}

TEST(EvalG, RejectsForeignSymbols) {
  EXPECT_THROW(eval_g(iid37(), Word(0, {2}), 1), InvalidArgument);
  EXPECT_THROW(eval_g(iid37(), Word(1, {0}), 1), InvalidArgument);
}

TEST(EvalG, LongRangeMatchesSeriesOracle) {
  std::mt19937_64 rng(11);
  const double theta = 0.3, c = power_law_with_mass(0.9, 1.5).c;
  const GModel m = GModel::long_range_linear(Alphabet::binary(), theta, PowerLawCoefficients{c, 1.5});
  for (int trial = 0; trial < 200; ++trial) {
    const auto w = random_word(rng, 2, 1 + trial % 60);
    const std::vector<int> wi(w.begin(), w.end());
    EXPECT_NEAR(m.eval(w).value, oracle::long_range_g(wi, theta, c, 1.5), 1e-13);
  }
}

TEST(Normalization, SumsToOneOverFirstSymbol) {
  std::mt19937_64 rng(5);
  std::vector<GModel> models = {iid37(), long_range(), random_finite(rng, 3, 2), random_finite(rng, 2, 3),
                                GModel::long_range_linear(Alphabet::binary(), 0.4,
                                                          exponential_with_mass(1.0, 0.6))};
  for (const GModel& m : models) {
    for (int trial = 0; trial < 1000; ++trial) {
      const auto ctx = random_word(rng, m.q(), trial % 40);
      double sum = 0.0, err = 0.0;
      for (std::size_t s = 0; s < m.q(); ++s) {
        std::vector<Symbol> w = {static_cast<Symbol>(s)};
        w.insert(w.end(), ctx.begin(), ctx.end());
        const GValue g = m.eval(w);
        sum += g.value;
        err += g.error;
      }
      ASSERT_NEAR(sum, 1.0, err + 1e-14);
    }
  }
}

TEST(CylinderProb, IidProduct) {
  const Word block = Word::parse(Alphabet::binary(), "01", -1);
  const GValue p = cylinder_prob(iid37(), block, Word(1, {}));
  EXPECT_NEAR(p.value, 0.21, 1e-16);
  EXPECT_EQ(p.error, 0.0);
}

TEST(CylinderProb, MemoryOneHandProduct) {
  // table index = 2 x_0 + x_1
  const GModel m = GModel::finite_memory(Alphabet::binary(), 1, {0.2, 0.6, 0.8, 0.4});
  const Word block(-1, {1, 0});
  const Word ctx(1, {1});
  const GValue p = cylinder_prob(m, block, ctx);
  // g(x_{-1} = 1 | x_0 = 0) * g(x_0 = 0 | x_1 = 1) = 0.8 * 0.6
  EXPECT_NEAR(p.value, 0.8 * 0.6, 1e-16);
  EXPECT_EQ(p.error, 0.0);
}

TEST(CylinderProb, RejectsMisplacedContext) {
  EXPECT_THROW(cylinder_prob(iid37(), Word(-1, {0, 1}), Word(2, {0})), InvalidArgument);
}

TEST(CylinderProb, ConsistencyOnRandomSplits) {
  std::mt19937_64 rng(17);
  std::vector<GModel> models = {random_finite(rng, 3, 2), long_range()};
  for (const GModel& m : models) {
    for (int trial = 0; trial < 300; ++trial) {
      const int len = 2 + trial % 7;
      const int m_lo = -len + 1;
      const auto blk = random_word(rng, m.q(), len);
      const Word context(1, random_word(rng, m.q(), 5));
      const Word block(m_lo, blk);
      const int split = m_lo + int(rng() % std::uint64_t(len - 1));  // [m, split] and [split+1, 0]
      std::vector<Symbol> left(blk.begin(), blk.begin() + (split - m_lo + 1));
      std::vector<Symbol> right(blk.begin() + (split - m_lo + 1), blk.end());
      const Word right_w(split + 1, right);
      const GValue whole = cylinder_prob(m, block, context);
      const GValue outer = cylinder_prob(m, right_w, context);
      const GValue inner = cylinder_prob(m, Word(m_lo, left), concat(right_w, context));
      ASSERT_NEAR(whole.value, outer.value * inner.value, 1e-12);
    }
  }
}

TEST(BlockConditional, MatchesCylinderProb) {
  std::mt19937_64 rng(23);
  const GModel m = random_finite(rng, 3, 2);
  const Word ctx(1, {2, 0});
  const BlockConditional bc = block_conditional(m, {-2, 0}, ctx);
  double total = 0.0;
  for (std::size_t w = 0; w < bc.probs.size(); ++w) {
    std::vector<Symbol> sym(3);
    decode_word(w, 3, sym);
    EXPECT_NEAR(bc.probs[w], cylinder_prob(m, Word(-2, sym), ctx).value, 1e-15);
    total += bc.probs[w];
  }
  EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(Rho, IidAndBeyondMemoryAreOne) {
  const RhoBounds r = rho_interval(iid37(), 0);
  EXPECT_EQ(r.lower, 1.0);
  EXPECT_EQ(r.upper, 1.0);
  std::mt19937_64 rng(2);
  const RhoBounds r4 = rho_interval(random_finite(rng, 2, 2), 4);
  EXPECT_EQ(r4.lower, 1.0);
  EXPECT_EQ(r4.upper, 1.0);
}

TEST(Rho, FiniteMemoryMatchesEnumeration) {
  std::mt19937_64 rng(8);
  const GModel m = random_finite(rng, 2, 3);
  for (int n = 0; n < 3; ++n) {
    // Direct search over pairs of full windows agreeing on [0, n].
    double best = 1.0;
    for (std::size_t x = 0; x < 16; ++x)
      for (std::size_t y = 0; y < 16; ++y) {
        if ((x >> (3 - n)) != (y >> (3 - n))) continue;
        best = std::max(best, m.table()[x] / m.table()[y]);
      }
    EXPECT_NEAR(rho_interval(m, n).upper, best, 1e-15);
  }
}

TEST(Rho, LongRangeRandomSearchStaysBelowAnalyticUpper) {
  const double theta = 0.25, c = power_law_with_mass(0.5, 2.0).c;
  const GModel m = long_range();
  std::mt19937_64 rng(29);
  for (int n : {0, 1, 3, 8, 20}) {
    const RhoBounds r = rho_interval(m, n);
    EXPECT_LE(r.lower, r.upper);
    double found = 1.0;
    for (int trial = 0; trial < 2000; ++trial) {
      auto x = random_word(rng, 2, 300);
      auto y = random_word(rng, 2, 300);
      std::copy(x.begin(), x.begin() + n + 1, y.begin());
      // Truncation beyond 300 moves each value by at most theta * tail(299).
      const double slack = theta * c / 299.0;
      const double gx = oracle::long_range_g({x.begin(), x.end()}, theta, c, 2.0);
      const double gy = oracle::long_range_g({y.begin(), y.end()}, theta, c, 2.0);
      found = std::max(found, (gx - slack) / (gy + slack));
    }
    EXPECT_LE(found, r.upper);
    // Adversarial pair attains the closed form up to the truncation.
    EXPECT_GT(r.upper, 1.0);
  }
}

TEST(VariationProfile, MonotoneAndZeroBeyondMemory) {
  std::mt19937_64 rng(4);
  const GModel fm = random_finite(rng, 2, 3);
  const VariationProfile p = variation_profile(fm, 10, VariationProfile::Kind::Exact);
  for (int n = 3; n <= 10; ++n) EXPECT_EQ(p.at(n), 0.0);
  EXPECT_EQ(p.at(1000), 0.0);
  for (const GModel& m : {fm, long_range()}) {
    const auto up = variation_profile(m, 64, VariationProfile::Kind::UpperBound);
    const auto ex = variation_profile(m, 64, VariationProfile::Kind::Exact);
    for (int n = 0; n <= 64; ++n) {
      EXPECT_GE(up.at(n), 0.0);
      EXPECT_GE(up.at(n), ex.at(n));
      if (n > 0) {
        EXPECT_LE(up.at(n), up.at(n - 1));
      }
      EXPECT_NEAR(up.rho(n), rho_interval(m, n).upper, 1e-12 * up.rho(n));
    }
    for (int n = 65; n < 2000; n += 37) {
      EXPECT_LE(up.at(n), up.at(n - 1));
    }
  }
}

TEST(VariationProfile, PowerLawTracksTailSums) {
  // var_n = log(1 + 2 theta T_n / (1/2 - theta (A_n + T_n))) with T_n = sum_{k>n} a_k;
  // the tail is summed directly here and must fall inside the reported bracket.
  const double theta = 0.25, c = power_law_with_mass(0.5, 2.0).c;
  const auto lo = variation_profile(long_range(), 200, VariationProfile::Kind::Exact);
  const auto hi = variation_profile(long_range(), 200, VariationProfile::Kind::UpperBound);
  for (int n : {1, 5, 50, 200}) {
    // Smallest terms first; the remainder beyond N lies in [c/(N+1), c/N].
    const int N = 4'000'000;
    double T_lo = c / (N + 1.0), T_hi = c / double(N), A = 0.0;
    for (int k = N; k > n; --k) {
      T_lo += c / (double(k) * k);
      T_hi += c / (double(k) * k);
    }
    for (int k = n; k >= 1; --k) A += c / (double(k) * k);
    auto var = [&](double T) { return std::log(1.0 + 2.0 * theta * T / (0.5 - theta * (A + T))); };
    EXPECT_LE(lo.at(n), var(T_hi) * (1 + 1e-12));
    EXPECT_GE(hi.at(n), var(T_lo) * (1 - 1e-12));
    // The coefficient cache brackets the tail to within c / N_cache^2.
    EXPECT_NEAR(hi.at(n), var(T_lo), 2e-9);
    // Values scale like the tail sums: n var_n stays bounded and positive.
    EXPECT_GT(hi.at(n) * n, 0.1);
    EXPECT_LT(hi.at(n) * n, 1.0);
  }
  // Beyond the table the closed-form envelope takes over and still dominates.
  ASSERT_TRUE(hi.tail.has_value());
  EXPECT_EQ(hi.tail->shape, VariationTail::Shape::PowerLaw);
  const auto far = variation_profile(long_range(), 1000, VariationProfile::Kind::UpperBound);
  for (int n = 201; n <= 1000; n += 53) EXPECT_GE(hi.at(n), far.at(n));
}

TEST(ModelIo, RoundTripsAndRejectsBadKeys) {
  const GModel m = long_range(0.3, 0.8, 1.7);
  const GModel back = parse_model(format_model(m));
  EXPECT_EQ(back.theta(), m.theta());
  EXPECT_EQ(back.coefficient(7), m.coefficient(7));
  const GModel fm = parse_model("variant = finite_memory\nalphabet = a b c\nmemory = 0\ntable = 0.2 0.3 0.5\n");
  EXPECT_EQ(fm.q(), 3u);
  EXPECT_THROW(parse_model("variant = finite_memory\nmemory = 0\ntable = 0.2 0.3 0.5\n"), ConfigError);
  EXPECT_THROW(parse_model("variant = finite_memory\nmemory = 0\ntable = 0.5 0.5\ncolour = red\n"), ConfigError);
  EXPECT_THROW(parse_model("variant = long_range_linear\ntheta = 0.7\nlaw = power\nexponent = 2\nmass = 1\n"),
               ConfigError);
}
