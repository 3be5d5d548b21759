#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "srm/params.hpp"
#include "srm/renewal.hpp"

namespace srm::tuples {

// Strictly increasing index tuples i_1 < ... < i_p with i_p <= index_cap and
// product i_1 * ... * i_p <= product_cap.  The product bound is applied to
// floor(product_cap), so admission is decided in exact integer arithmetic.
struct Domain {
  int p = 1;
  double product_cap = 0.0;
  std::uint64_t index_cap = UINT64_MAX;
};

// Visits tuples in lexicographic order.  Prefixes whose minimal completion
// already exceeds the product bound are pruned without descending.
void for_each_tuple(const Domain& domain,
                    const std::function<void(std::span<const std::uint64_t>)>& fn,
                    std::uint64_t guard = 100'000'000);

std::vector<std::vector<std::uint64_t>> enumerate_tuples(const Domain& domain,
                                                         std::uint64_t guard = 100'000'000);

// Tuple count with the last coordinate folded into a closed form; costs one
// visit per feasible (p-1)-prefix.  The guard bounds prefix visits.
std::uint64_t count_tuples(const Domain& domain, std::uint64_t guard = 100'000'000);

// x log^(p-1) x / (p! (p-1)!), the first-order size of the product-bounded
// tuple family.
double count_asymptotic(double x, int p);

// P(U_1 ... U_p <= s) = s * sum_{k<p} (-log s)^k / k! for iid uniforms.
double product_uniform_cdf(double s, int p);

// Tuple-domain radius r_n = w_n^p / c_n^alpha; defined for the sub-critical
// and critical regimes, where it feeds the truncated evaluation domain.
double domain_radius(const renewal::Tables& tables, const BetaValue& beta,
                     double alpha, int p, std::uint64_t n);

// Closed-form stand-in for the critical radius, (C/(1-beta))^p log n /
// (log log n)^(p-1); tracks domain_radius to first order.
double domain_radius_critical_asymptotic(const renewal::Law& law, const BetaValue& beta,
                                         int p, std::uint64_t n);

struct CountPair {
  std::uint64_t exact = 0;
  double asymptotic = 0.0;
};

// Size of the truncated evaluation domain: tuples with product <= K r_n and
// top index <= w_n.  The asymptotic column is regime-dispatched.
CountPair truncated_domain_count(const renewal::Law& law, const renewal::Tables& tables,
                                 const BetaValue& beta, double alpha, int p,
                                 std::uint64_t n, double K);

// Ordered pairs of domain tuples sharing exactly r indices, r = 0..p.
// Materializes the domain once; guarded by the square of its size.
std::vector<std::uint64_t> overlap_pair_counts(const renewal::Tables& tables,
                                               const BetaValue& beta, double alpha,
                                               int p, std::uint64_t n, double K,
                                               std::uint64_t pair_guard = 10'000'000);

}  // namespace srm::tuples
