#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "gchain/errors.hpp"
#include "gchain/transfer.hpp"
#include "oracles.hpp"

using namespace gchain;

namespace {

GModel memory1(double g00, double g01) {
  // table[2 x_0 + x_1] = g(x_0 | x_1)
  return GModel::finite_memory(Alphabet::binary(), 1, {g00, g01, 1.0 - g00, 1.0 - g01});
}

GModel random_memory(std::mt19937_64& rng, std::size_t q, int M) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < q; ++i) names.push_back(std::to_string(i));
  std::size_t contexts = 1;
  for (int i = 0; i < M; ++i) contexts *= q;
  std::vector<double> table(q * contexts);
  for (std::size_t c = 0; c < contexts; ++c) {
    const auto col = oracle::random_simplex(rng, q, 0.1);
    for (std::size_t s = 0; s < q; ++s) table[s * contexts + c] = col[s];
  }
  return GModel::finite_memory(Alphabet(names), M, table);
}

// P(x_0, s) = g(s x_0): one step of backward smoothing for a memory-1 model.
Eigen::MatrixXd smoothing_matrix(const GModel& m) {
  const auto q = static_cast<Eigen::Index>(m.q());
  Eigen::MatrixXd P(q, q);
  for (Eigen::Index x = 0; x < q; ++x)
    for (Eigen::Index s = 0; s < q; ++s) P(x, s) = m.table()[static_cast<std::size_t>(s * q + x)];
  return P;
}

}  // namespace

TEST(Transfer, PreservesConstantsAndPositivity) {
  std::mt19937_64 rng(1);
  for (int M : {0, 1, 2, 3}) {
    const GModel m = random_memory(rng, M == 3 ? 2 : 3, M);
    for (int W : {std::max(M, 1), std::max(M, 1) + 1}) {
      const TransferOperator op(m, W);
      const std::vector<double> one(op.state_dim(), 1.0);
      for (double v : apply_Ln(op, one, 7)) EXPECT_NEAR(v, 1.0, 1e-14);
      std::vector<double> f(op.state_dim());
      for (double& v : f) v = double(rng() % 1000) / 1000.0;
      for (double v : op.apply(f)) EXPECT_GE(v, 0.0);
    }
  }
}

TEST(Transfer, IidIndicatorSmoothsToMarginal) {
  const GModel iid = GModel::iid(Alphabet::binary(), {0.3, 0.7});
  const TransferOperator op(iid);
  const auto f = CylinderFunction::indicator(2, 0);
  for (double v : op.apply(f.values)) EXPECT_NEAR(v, 0.3, 1e-16);
  EXPECT_EQ(apply_Ln(op, f.values, 0), f.values);
}

TEST(Transfer, MemoryOneMatchesDenseMatrixPower) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const GModel m = random_memory(rng, 3, 1);
    const TransferOperator op(m);
    const Eigen::MatrixXd P = smoothing_matrix(m);
    Eigen::VectorXd f = Eigen::VectorXd::Random(3);
    const std::vector<double> fv(f.data(), f.data() + 3);
    Eigen::VectorXd g = f;
    for (int n = 1; n <= 25; ++n) {
      g = P * g;
      const auto got = apply_Ln(op, fv, n);
      for (int i = 0; i < 3; ++i) ASSERT_NEAR(got[i], g(i), 1e-12);
    }
  }
}

TEST(Transfer, DimensionMismatchThrows) {
  const TransferOperator op(memory1(0.2, 0.6));
  EXPECT_THROW(op.apply(std::vector<double>(3, 1.0)), InvalidArgument);
}

TEST(Stationary, IidProductMeasure) {
  const TransferOperator op(GModel::iid(Alphabet::binary(), {0.3, 0.7}), 2);
  const StationaryMeasure st = stationary(op, 1e-14);
  EXPECT_TRUE(st.converged);
  EXPECT_TRUE(st.unique);
  const Symbol w00[2] = {0, 0};
  EXPECT_NEAR(st.cylinder(w00, 2), 0.09, 1e-15);
}

TEST(Stationary, MemoryOneMatchesEigensolver) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const GModel m = trial == 0 ? memory1(0.2, 0.6) : random_memory(rng, 2 + trial % 3, 1);
    const StationaryMeasure st = stationary(TransferOperator(m), 1e-14);
    ASSERT_TRUE(st.converged);
    // Left Perron vector of the smoothing matrix.
    Eigen::EigenSolver<Eigen::MatrixXd> es(smoothing_matrix(m).transpose());
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()(i).real() > es.eigenvalues()(best).real()) best = i;
    EXPECT_NEAR(es.eigenvalues()(best).real(), 1.0, 1e-12);
    Eigen::VectorXd v = es.eigenvectors().col(best).real();
    v /= v.sum();
    for (Eigen::Index i = 0; i < v.size(); ++i) EXPECT_NEAR(st.probs[static_cast<std::size_t>(i)], v(i), 1e-10);
  }
}

TEST(Stationary, ReducibleTableIsFlagged) {
  // 0 -> 0 and 1 -> 1 with certainty: two closed classes.
  const GModel m = GModel::finite_memory(Alphabet::binary(), 1, {1.0, 0.0, 0.0, 1.0});
  const StationaryMeasure st = stationary(TransferOperator(m), 1e-12);
  EXPECT_FALSE(st.unique);
}

TEST(Stationary, MarginalsConsistentAcrossWindows) {
  std::mt19937_64 rng(4);
  const GModel m = random_memory(rng, 2, 2);
  const StationaryMeasure s2 = stationary(TransferOperator(m, 2), 1e-15);
  const StationaryMeasure s4 = stationary(TransferOperator(m, 4), 1e-15);
  double total = 0.0;
  for (std::size_t w = 0; w < 4; ++w) {
    Symbol word[2];
    decode_word(w, 2, word);
    EXPECT_NEAR(s2.cylinder(word, 2), s4.cylinder(word, 2), 1e-12);
    total += s2.probs[w];
    EXPECT_GE(s2.probs[w], 0.0);
  }
  EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(Stationary, AgreesWithSimulatedTrajectory) {
  std::mt19937_64 rng(5);
  const GModel m = random_memory(rng, 2, 2);
  const StationaryMeasure st = stationary(TransferOperator(m, 3), 1e-15);
  // Grow x_0, x_{-1}, x_{-2}, ... leftward with g(s x_0 x_1).
  const int N = 200000;
  std::vector<int> path = {0, 0};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < N + 1000; ++i) {
    const int a = path[path.size() - 1], b = path[path.size() - 2];
    const double p0 = m.table()[static_cast<std::size_t>(0 * 4 + a * 2 + b)];
    path.push_back(u(rng) < p0 ? 0 : 1);
  }
  std::vector<double> freq(8, 0.0);
  for (int i = 1000; i < N + 1000; ++i) {
    // word on coordinates (0, 1, 2) read left to right
    const int w = path[i + 2] * 4 + path[i + 1] * 2 + path[i];
    freq[static_cast<std::size_t>(w)] += 1.0 / N;
  }
  for (std::size_t w = 0; w < 8; ++w) EXPECT_NEAR(freq[w], st.probs[w], 4.0 / std::sqrt(double(N)));
}

TEST(Uniqueness, IidOscillationVanishesAfterOneStep) {
  const GModel iid = GModel::iid(Alphabet::binary(), {0.3, 0.7});
  const auto osc = uniqueness_diagnostic(iid, CylinderFunction::indicator(2, 0), 5, 4);
  EXPECT_EQ(osc[0].oscillation, 1.0);
  for (int n = 1; n <= 5; ++n) EXPECT_NEAR(osc[n].oscillation, 0.0, 1e-16);
}

TEST(Uniqueness, MemoryOneDecaysAtDobrushinRate) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const GModel m = random_memory(rng, 3, 1);
    const Eigen::MatrixXd P = smoothing_matrix(m);
    double delta = 0.0;  // 1/2 max_{x,x'} sum_s |P(x,s) - P(x',s)|
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 3; ++y) delta = std::max(delta, 0.5 * (P.row(x) - P.row(y)).cwiseAbs().sum());
    const auto osc = uniqueness_diagnostic(m, CylinderFunction::indicator(3, 1), 30, 0);
    for (int n = 0; n <= 30; ++n) {
      EXPECT_EQ(osc[n].truncation_error, 0.0);
      EXPECT_LE(osc[n].oscillation, std::pow(delta, n) * osc[0].oscillation + 1e-15);
    }
  }
}

TEST(Uniqueness, LongRangeSurrogatesDecrease) {
  const GModel m = GModel::long_range_linear(Alphabet::binary(), 0.25, power_law_with_mass(0.5, 2.0));
  for (int Mt : {4, 6, 8}) {
    const auto osc = uniqueness_diagnostic(m, CylinderFunction::indicator(2, 0), 20, Mt);
    for (std::size_t n = 1; n < osc.size(); ++n) {
      EXPECT_LE(osc[n].oscillation, osc[n - 1].oscillation + 1e-15);
      EXPECT_GE(osc[n].truncation_error, 0.0);
    }
    EXPECT_GT(osc[1].truncation_error, 0.0);
    EXPECT_LT(osc.back().oscillation, 1e-3);
  }
}

TEST(Uniqueness, OversizedTruncationIsAnExplicitError) {
  const GModel m = GModel::long_range_linear(Alphabet::binary(), 0.25, power_law_with_mass(0.5, 2.0));
  EXPECT_THROW(uniqueness_diagnostic(m, CylinderFunction::indicator(2, 0), 3, 30), BudgetExceeded);
  EXPECT_THROW(TransferOperator(GModel::iid(Alphabet::binary(), {0.5, 0.5}), 40), BudgetExceeded);
}
