#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gchain {

/// (1 + sqrt 2)^2: the largest ratio for which the Hellinger floor is non-negative.
inline constexpr double kHellingerRhoMax = 5.828427124746190;

/// sum_w sqrt(mu_w nu_w).
double hellinger_affinity(std::span<const double> mu, std::span<const double> nu);

/// sup_w max(mu_w / nu_w, nu_w / mu_w); both vectors must be strictly positive.
double ratio_spread(std::span<const double> mu, std::span<const double> nu);

/// 1 - (sqrt(rho) - 1)^2 / 2, a lower bound on the affinity of any two
/// distributions whose ratio spread is at most rho. Requires rho >= 1.
double hellinger_floor(double rho);

/// sqrt(1 - prod_i hellinger_floor(rho_i)^2), an upper bound on the total
/// variation between two measures on a block whose site-wise conditional
/// ratio spreads are rho_i. Throws InvalidArgument if some rho_i > kHellingerRhoMax.
double tv_upper_rg2(std::span<const double> rhos);

// Site-wise conditional ratio spreads of two strictly positive measures on
// words of length `length` (lexicographic, leftmost most significant). Entry j
// refers to the j-th coordinate from the left, conditioned on every coordinate
// to its right:
//   rho_j = sup { mu(s | eta) / nu(s | eta), nu(s | eta) / mu(s | eta) }.
std::vector<double> site_ratios(std::span<const double> mu, std::span<const double> nu, std::size_t q, int length);

// Constant K in
//   prod_i hellinger_floor(rho_i)^2 >= 1 - sum_i ((log rho_i)^2 / 4 + K (log rho_i)^3)
// for 1 <= rho_i <= lambda < kHellingerRhoMax. Each factor is 1 - a_i with
// a_i = u_i - u_i^2/4, u_i = (sqrt(rho_i) - 1)^2, and a_i in [0, 1], so
// prod (1 - a_i) >= 1 - sum a_i and it suffices that
//   h(t) = (a(t) - t^2/4) / t^3 <= K   for 0 < t <= log lambda.
// sup h = 0.13267 (at t = 0.606), so one constant serves the whole domain.
inline constexpr double kAs1Constant = 0.14;

struct As1Certificate {
  double lambda = 0.0;
  double K = 0.0;
  double bound = 0.0;  // rigorous upper bound on sup h over (0, log lambda]
  bool certified = false;
};

// Certifies h <= K on (0, log lambda]. Near 0 the factorization
// a - t^2/4 = (e^{t/2} - 1 - t/2)(e^{t/2} - 1 + t/2) - u^2/4 and Taylor
// remainders give h(t) <= e^t / 8; beyond that a geometric grid bounds each
// cell using the monotonicity of both factors and of u.
As1Certificate certify_as1_constant(double lambda, double K = kAs1Constant, int cells = 200000);

/// Returns kAs1Constant after checking 1 < lambda < kHellingerRhoMax.
double as1_constant(double lambda);

/// 1 - sum_i ((log rho_i)^2 / 4 + K (log rho_i)^3) with K = as1_constant(lambda).
/// Throws InvalidArgument if some rho_i lies outside [1, lambda].
double as1_floor(std::span<const double> rhos, double lambda);

/// prod_i hellinger_floor(rho_i)^2.
double hellinger_product(std::span<const double> rhos);

}  // namespace gchain
