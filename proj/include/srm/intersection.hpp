#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "srm/params.hpp"
#include "srm/random.hpp"
#include "srm/renewal.hpp"

namespace srm::isect {

// beta_q = q*beta - q + 1; the q-fold intersection of independent copies is
// again renewal-like with this index, recurrent iff beta_q >= 0.
double beta_index(const BetaValue& beta, int q);

// Sign of beta_q: exact integer arithmetic when beta carries a ratio, else a
// +-1e-12 window around zero.  Returns -1, 0, +1.
int beta_index_sign(const BetaValue& beta, int q);

Regime regime_of(const BetaValue& beta, int p);

// Largest q with beta_q > 0, i.e. q < 1/(1-beta).  Finite for every beta < 1.
int p_prime(const BetaValue& beta);

// Smallest q with beta_q < 0.  Defined when regime_of(beta, p) is sub-critical.
int first_negative_index(const BetaValue& beta, int p);

// D = sum_{s=q..p} (-1)^(p-s) C(p,s) (-beta_s)^(p-1) with q the first negative
// index; lies in (0,1) on the sub-critical range.
double shape_constant(const BetaValue& beta, int p);

// Sorted intersection of several sorted hit lists.
std::vector<std::uint64_t> intersect_paths(
    std::span<const std::vector<std::uint64_t>> paths);

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double estimate = 0.0;
};

// P(the p-fold intersection never returns) = 1 / sum_n u(n)^p, computed from
// the truncated series with a rigorous tail envelope:
//   sum_{n>N} u(n)^p <= C_env^p * N^{beta_p} / |beta_p|,
// C_env taken as the sup of u(n) n^{1-beta} over the trailing half of the
// table.  Sub-critical regimes only.
Bracket terminating_prob(const renewal::Law& law, const renewal::Tables& tables, int p);

// Survival asymptotics of the first joint return time at horizon n:
//   beta_p > 0:  n^-beta_p (C Gamma(beta) Gamma(1-beta))^p / (Gamma(beta_p) Gamma(1-beta_p))
//   beta_p = 0:  (C Gamma(beta) Gamma(1-beta))^p / log n
double intersection_tail_asymptotic(const renewal::Law& law, const BetaValue& beta,
                                    int p, std::uint64_t n);

// Monte Carlo companion: frequency of {no joint epoch in 1..n} among reps
// independent p-tuples of renewal sets.
double intersection_tail_mc(const renewal::Law& law, int p, std::uint64_t n,
                            std::uint64_t reps, RandomStream& rng);

// One draw of the spectral tail process restricted to {0,...,m}: a Rademacher
// sign and indicators of membership in the p-fold intersection (always 1 at 0).
struct TailProcessDraw {
  int sign = 1;
  std::vector<std::uint8_t> in_intersection;
};

TailProcessDraw sample_tail_process(const renewal::Law& law, int p, std::uint64_t m,
                                    RandomStream& rng);

}  // namespace srm::isect
