#include "srm/tuples.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srm/intersection.hpp"
#include "srm/limits.hpp"

namespace srm::tuples {

namespace {

std::uint64_t product_floor(double cap) {
  if (cap < 1.0) return 0;
  if (cap >= 9.2e18) throw std::invalid_argument("tuple domain: product cap too large");
  return static_cast<std::uint64_t>(std::floor(cap));
}

// remaining budget after prefix: true iff prod * next admissible
bool fits(std::uint64_t prod, std::uint64_t next, std::uint64_t cap) {
  return next <= cap / prod;
}

void tuple_walk(const Domain& d, std::uint64_t cap, std::vector<std::uint64_t>& cur,
                std::uint64_t prod, std::uint64_t next,
                const std::function<void(std::span<const std::uint64_t>)>& fn,
                std::uint64_t guard, std::uint64_t& seen) {
  if (static_cast<int>(cur.size()) == d.p) {
    if (++seen > guard) throw std::length_error("tuple enumeration exceeds its guard");
    fn(cur);
    return;
  }
  int remaining = d.p - static_cast<int>(cur.size());
  for (std::uint64_t i = next;; ++i) {
    if (i > d.index_cap) break;
    // cheapest completion uses i, i+1, ..., i+remaining-1
    std::uint64_t probe = prod;
    bool ok = true;
    for (int j = 0; j < remaining; ++j) {
      std::uint64_t factor = i + static_cast<std::uint64_t>(j);
      if (!fits(probe, factor, cap)) {
        ok = false;
        break;
      }
      probe *= factor;
    }
    if (!ok) break;  // larger i only gets worse
    if (i + static_cast<std::uint64_t>(remaining) - 1 > d.index_cap) break;
    cur.push_back(i);
    tuple_walk(d, cap, cur, prod * i, i + 1, fn, guard, seen);
    cur.pop_back();
  }
}

void count_walk(const Domain& d, std::uint64_t cap, int depth, std::uint64_t prod,
                std::uint64_t next, std::uint64_t& total, std::uint64_t guard,
                std::uint64_t& visits) {
  if (++visits > guard) throw std::length_error("tuple count exceeds its guard");
  if (depth == d.p - 1) {
    // last coordinate ranges over (prev, min(index_cap, cap / prod)]
    std::uint64_t hi = std::min(d.index_cap, cap / prod);
    if (hi >= next) total += hi - next + 1;
    return;
  }
  int remaining = d.p - depth;
  for (std::uint64_t i = next;; ++i) {
    if (i > d.index_cap) break;
    std::uint64_t probe = prod;
    bool ok = true;
    for (int j = 0; j < remaining; ++j) {
      std::uint64_t factor = i + static_cast<std::uint64_t>(j);
      if (!fits(probe, factor, cap)) {
        ok = false;
        break;
      }
      probe *= factor;
    }
    if (!ok) break;
    if (i + static_cast<std::uint64_t>(remaining) - 1 > d.index_cap) break;
    count_walk(d, cap, depth + 1, prod * i, i + 1, total, guard, visits);
  }
}

}  // namespace

void for_each_tuple(const Domain& d,
                    const std::function<void(std::span<const std::uint64_t>)>& fn,
                    std::uint64_t guard) {
  if (d.p < 1) throw std::invalid_argument("tuple domain: p must be >= 1");
  std::uint64_t cap = product_floor(d.product_cap);
  if (cap == 0) return;
  std::vector<std::uint64_t> cur;
  cur.reserve(static_cast<std::size_t>(d.p));
  std::uint64_t seen = 0;
  tuple_walk(d, cap, cur, 1, 1, fn, guard, seen);
}

std::vector<std::vector<std::uint64_t>> enumerate_tuples(const Domain& d,
                                                         std::uint64_t guard) {
  std::vector<std::vector<std::uint64_t>> out;
  for_each_tuple(
      d, [&out](std::span<const std::uint64_t> t) { out.emplace_back(t.begin(), t.end()); },
      guard);
  return out;
}

std::uint64_t count_tuples(const Domain& d, std::uint64_t guard) {
  if (d.p < 1) throw std::invalid_argument("tuple domain: p must be >= 1");
  std::uint64_t cap = product_floor(d.product_cap);
  if (cap == 0) return 0;
  std::uint64_t total = 0;
  std::uint64_t visits = 0;
  count_walk(d, cap, 0, 1, 1, total, guard, visits);
  return total;
}

double count_asymptotic(double x, int p) {
  if (x <= 1.0) return 0.0;
  double fact_p = 1.0, fact_pm1 = 1.0;
  for (int i = 2; i <= p; ++i) fact_p *= i;
  for (int i = 2; i <= p - 1; ++i) fact_pm1 *= i;
  return x * std::pow(std::log(x), p - 1) / (fact_p * fact_pm1);
}

double product_uniform_cdf(double s, int p) {
  if (p < 1) throw std::invalid_argument("product_uniform_cdf: p must be >= 1");
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  double ls = -std::log(s);
  double term = 1.0, acc = 1.0;
  for (int k = 1; k < p; ++k) {
    term *= ls / k;
    acc += term;
  }
  return s * acc;
}

double domain_radius(const renewal::Tables& tables, const BetaValue& beta,
                     double alpha, int p, std::uint64_t n) {
  Regime regime = isect::regime_of(beta, p);
  if (regime == Regime::SuperCritical)
    throw std::domain_error("domain_radius: defined for sub-critical and critical regimes");
  double w = tables.stationary_mass(n);
  double c = limits::normalization_for(regime, alpha, beta, p, n);
  return std::pow(w, p) / std::pow(c, alpha);
}

double domain_radius_critical_asymptotic(const renewal::Law& law, const BetaValue& beta,
                                         int p, std::uint64_t n) {
  double nn = static_cast<double>(n);
  double base = std::pow(law.tail_constant / (1.0 - beta.value), p);
  return base * std::log(nn) / std::pow(std::log(std::log(nn)), p - 1);
}

CountPair truncated_domain_count(const renewal::Law& law, const renewal::Tables& tables,
                                 const BetaValue& beta, double alpha, int p,
                                 std::uint64_t n, double K) {
  Regime regime = isect::regime_of(beta, p);
  double r = domain_radius(tables, beta, alpha, p, n);
  double w = tables.stationary_mass(n);

  Domain d;
  d.p = p;
  d.product_cap = K * r;
  d.index_cap = static_cast<std::uint64_t>(std::floor(w));

  CountPair out;
  out.exact = count_tuples(d);

  double fact_p = 1.0, fact_pm1 = 1.0;
  for (int i = 2; i <= p; ++i) fact_p *= i;
  for (int i = 2; i <= p - 1; ++i) fact_pm1 *= i;
  if (regime == Regime::SubCritical) {
    double shape = isect::shape_constant(beta, p);
    out.asymptotic =
        K / (fact_p * fact_pm1) * shape * std::pow(w, p) / static_cast<double>(n);
  } else {
    double base = std::pow(law.tail_constant / (1.0 - beta.value), p);
    out.asymptotic = K / (fact_p * fact_pm1) * base * std::log(static_cast<double>(n));
  }
  return out;
}

std::vector<std::uint64_t> overlap_pair_counts(const renewal::Tables& tables,
                                               const BetaValue& beta, double alpha,
                                               int p, std::uint64_t n, double K,
                                               std::uint64_t pair_guard) {
  double r = domain_radius(tables, beta, alpha, p, n);
  Domain d;
  d.p = p;
  d.product_cap = K * r;
  d.index_cap = static_cast<std::uint64_t>(std::floor(tables.stationary_mass(n)));
  auto family = enumerate_tuples(d);

  std::uint64_t m = family.size();
  if (m * m > pair_guard)
    throw std::length_error("overlap_pair_counts: family too large for pairwise scan");

  std::vector<std::uint64_t> counts(static_cast<std::size_t>(p) + 1, 0);
  std::vector<std::uint64_t> joint;
  for (const auto& a : family) {
    for (const auto& b : family) {
      joint.clear();
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                            std::back_inserter(joint));
      ++counts[joint.size()];
    }
  }
  return counts;
}

}  // namespace srm::tuples
