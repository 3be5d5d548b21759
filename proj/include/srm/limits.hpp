#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "srm/intersection.hpp"
#include "srm/params.hpp"
#include "srm/random.hpp"
#include "srm/renewal.hpp"

namespace srm::limits {

// Scaling sequence c_n for the running maximum:
//   super-critical: n^((1-beta_p)/alpha)
//   critical:       (n (log log n)^(p-1) / log n)^(1/alpha), needs n >= 16
//   sub-critical:   (n log^(p-1) n)^(1/alpha)
double normalization(const ModelParams& params);
double normalization_for(Regime regime, double alpha, const BetaValue& beta, int p,
                         std::uint64_t n);

struct ConstantValue {
  double value = 0.0;
  std::optional<isect::Bracket> bracket;  // carried through from the terminating prob
};

// Constant in front of the limiting Frechet functional; regime-dispatched.
// tables must cover a u horizon adequate for the sub-critical series.
ConstantValue limit_constant(const renewal::Law& law, const renewal::Tables& tables,
                             const BetaValue& beta, int p);

// P(sup over a set of Lebesgue measure leb <= x) for the Frechet sup-measure.
double frechet_max_cdf(double x, double leb, double constant, double alpha);

// Supports of the aggregation family: all c subset of {1..index_cap} with
// p <= |c| <= p_prime.  A support c stands for the bundle of all p-subsets of
// c, whose signed contributions sum to e_p over c.
std::vector<std::vector<std::uint32_t>> enumerate_aggregations(
    int index_cap, int p, int p_prime, std::uint64_t guard = 5'000'000);

// Visitor form that never materializes the list.
void for_each_aggregation(int index_cap, int p, int p_prime,
                          const std::function<void(std::span<const std::uint32_t>)>& fn,
                          std::uint64_t guard = 5'000'000);

struct ZDraw {
  double value = 0.0;
  double value_half_cap = 0.0;  // same draw, supports within the first L/2 indices
  bool cap_sensitive = false;   // |value - value_half_cap| > tolerance
};

// One draw of the limiting extreme-value functional: standard Poisson arrivals
// and Rademacher signs, maximized over the aggregation family.
ZDraw sample_limit_functional(double alpha, int p, int p_prime, int index_cap,
                              RandomStream& rng, double sensitivity_tol = 1e-6);

constexpr int kDefaultAggregationCap = 64;

// Distribution of the limiting maximum over blocks of unit measure.
// Sub-critical and critical regimes have the closed Frechet form; the
// super-critical law is kept as a sorted cache of simulated draws.
class LimitLaw {
 public:
  static LimitLaw closed_form(double constant, double alpha);
  static LimitLaw empirical(const renewal::Law& law, const BetaValue& beta, int p,
                            double alpha, std::uint64_t draws, std::uint64_t seed,
                            int index_cap = kDefaultAggregationCap);

  double cdf(double x) const;
  bool is_closed_form() const { return draws_.empty(); }
  double constant() const { return constant_; }

 private:
  double constant_ = 0.0;
  double alpha_ = 1.0;
  std::vector<double> draws_;  // sorted when empirical
};

// Regime survey for one parameter triple; the one-stop summary the CLI prints.
struct RegimeReport {
  double alpha = 0.0;
  BetaValue beta;
  int p = 1;
  Regime regime = Regime::SuperCritical;
  std::vector<double> beta_indices;  // beta_q for q = 1..max(p, p')
  int p_prime = 1;
  std::optional<int> first_negative_index;       // sub only
  std::optional<isect::Bracket> terminating;     // sub only
  std::optional<double> shape;                   // sub only
  ConstantValue constant;
  std::optional<double> extremal_index;          // sub: q*D; critical: 0
};

RegimeReport make_regime_report(const renewal::Law& law, const renewal::Tables& tables,
                                const BetaValue& beta, int p, double alpha);

}  // namespace srm::limits
