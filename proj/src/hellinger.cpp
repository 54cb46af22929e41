#include "gchain/hellinger.hpp"

#include <algorithm>
#include <cmath>

#include "gchain/alphabet.hpp"
#include "gchain/errors.hpp"

namespace gchain {

double hellinger_affinity(std::span<const double> mu, std::span<const double> nu) {
  require(mu.size() == nu.size(), "hellinger_affinity: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += std::sqrt(mu[i] * nu[i]);
  return s;
}

double ratio_spread(std::span<const double> mu, std::span<const double> nu) {
  require(mu.size() == nu.size() && !mu.empty(), "ratio_spread: size mismatch");
  double rho = 1.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    require(mu[i] > 0.0 && nu[i] > 0.0, "ratio_spread: distributions must be strictly positive");
    rho = std::max({rho, mu[i] / nu[i], nu[i] / mu[i]});
  }
  return rho;
}

double hellinger_floor(double rho) {
  require(rho >= 1.0, "hellinger_floor: rho must be at least 1");
  const double s = std::sqrt(rho) - 1.0;
  return 1.0 - 0.5 * s * s;
}

double hellinger_product(std::span<const double> rhos) {
  double p = 1.0;
  for (double rho : rhos) {
    const double f = hellinger_floor(rho);
    p *= f * f;
  }
  return p;
}

double tv_upper_rg2(std::span<const double> rhos) {
  for (double rho : rhos) require(rho <= kHellingerRhoMax, "tv_upper_rg2: rho exceeds (1 + sqrt 2)^2");
  return std::sqrt(std::max(0.0, 1.0 - hellinger_product(rhos)));
}

std::vector<double> site_ratios(std::span<const double> mu, std::span<const double> nu, std::size_t q, int length) {
  require(length >= 1, "site_ratios: length must be positive");
  const std::size_t n = checked_power(q, length, std::size_t{1} << 26);
  require(mu.size() == n && nu.size() == n, "site_ratios: size mismatch");
  std::vector<double> rhos(static_cast<std::size_t>(length), 1.0);
  // Marginals of the rightmost `length - j` coordinates, computed by folding
  // away the leftmost coordinate one at a time.
  std::vector<double> m(mu.begin(), mu.end()), v(nu.begin(), nu.end());
  for (int j = 0; j < length; ++j) {
    const std::size_t rest = m.size() / q;  // words on coordinates j+1..
    std::vector<double> m_rest(rest, 0.0), v_rest(rest, 0.0);
    for (std::size_t s = 0; s < q; ++s)
      for (std::size_t e = 0; e < rest; ++e) {
        m_rest[e] += m[s * rest + e];
        v_rest[e] += v[s * rest + e];
      }
    double rho = 1.0;
    for (std::size_t s = 0; s < q; ++s)
      for (std::size_t e = 0; e < rest; ++e) {
        const double a = m[s * rest + e] / m_rest[e];
        const double b = v[s * rest + e] / v_rest[e];
        require(a > 0.0 && b > 0.0, "site_ratios: measures must be strictly positive");
        rho = std::max({rho, a / b, b / a});
      }
    rhos[static_cast<std::size_t>(j)] = rho;
    m = std::move(m_rest);
    v = std::move(v_rest);
  }
  return rhos;
}

namespace {

double u_of(double t) {
  const double s = std::expm1(0.5 * t);
  return s * s;
}

// Upper bound on h over [t0, t1]: both factors of a - t^2/4 grow with t and
// u^2/4 is subtracted at its smallest value.
double cell_bound(double t0, double t1) {
  const double e1 = std::expm1(0.5 * t1);
  const double f1 = (e1 - 0.5 * t1) * (e1 + 0.5 * t1);
  const double u0 = u_of(t0);
  return (f1 - 0.25 * u0 * u0) / (t0 * t0 * t0);
}

}  // namespace

As1Certificate certify_as1_constant(double lambda, double K, int cells) {
  require(lambda > 1.0 && lambda < kHellingerRhoMax, "certify_as1_constant: lambda must lie in (1, (1 + sqrt 2)^2)");
  require(cells >= 1, "certify_as1_constant: need at least one cell");
  const double t_max = std::log(lambda);
  // On (0, t_small], A(t) <= (t/2)^2 e^{t/2} / 2 and B(t) <= t e^{t/2}, so h <= e^t / 8.
  const double t_small = std::min(t_max, 0.1);
  double bound = std::exp(t_small) / 8.0;
  if (t_max > t_small) {
    const double ratio = std::pow(t_max / t_small, 1.0 / cells);
    double t0 = t_small;
    for (int c = 0; c < cells; ++c) {
      const double t1 = (c + 1 == cells) ? t_max : t0 * ratio;
      bound = std::max(bound, cell_bound(t0, t1));
      t0 = t1;
    }
  }
  bound *= 1.0 + 1e-12;  // rounding slack in the cell evaluations
  return {lambda, K, bound, bound <= K};
}

double as1_constant(double lambda) {
  require(lambda > 1.0 && lambda < kHellingerRhoMax, "as1_constant: lambda must lie in (1, (1 + sqrt 2)^2)");
  return kAs1Constant;
}

double as1_floor(std::span<const double> rhos, double lambda) {
  const double K = as1_constant(lambda);
  double s = 0.0;
  for (double rho : rhos) {
    require(rho >= 1.0 && rho <= lambda, "as1_floor: rho outside [1, lambda]");
    const double t = std::log(rho);
    s += 0.25 * t * t + K * t * t * t;
  }
  return 1.0 - s;
}

}  // namespace gchain
