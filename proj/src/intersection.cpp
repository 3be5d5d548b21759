#include "srm/intersection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srm::isect {

namespace {

constexpr double kZeroWindow = 1e-12;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
  return r;
}

}  // namespace

double beta_index(const BetaValue& beta, int q) {
  return static_cast<double>(q) * beta.value - static_cast<double>(q) + 1.0;
}

int beta_index_sign(const BetaValue& beta, int q) {
  if (beta.ratio) {
    auto [num, den] = *beta.ratio;
    // beta_q = (q*num - (q-1)*den) / den with den > 0
    std::int64_t top = q * num - static_cast<std::int64_t>(q - 1) * den;
    return top > 0 ? 1 : top < 0 ? -1 : 0;
  }
  double v = beta_index(beta, q);
  if (std::abs(v) < kZeroWindow) return 0;
  return v > 0 ? 1 : -1;
}

Regime regime_of(const BetaValue& beta, int p) {
  switch (beta_index_sign(beta, p)) {
    case 1: return Regime::SuperCritical;
    case 0: return Regime::Critical;
    default: return Regime::SubCritical;
  }
}

int p_prime(const BetaValue& beta) {
  if (!(beta.value > 0.0) || !(beta.value < 1.0))
    throw std::invalid_argument("p_prime: beta must lie in (0,1)");
  int q = 1;
  while (q < (1 << 24) && beta_index_sign(beta, q + 1) > 0) ++q;
  return q;
}

int first_negative_index(const BetaValue& beta, int p) {
  for (int q = 1; q <= p; ++q) {
    if (beta_index_sign(beta, q) < 0) return q;
  }
  throw std::domain_error("first_negative_index: no negative index up to p");
}

double shape_constant(const BetaValue& beta, int p) {
  if (regime_of(beta, p) != Regime::SubCritical)
    throw std::domain_error("shape_constant: defined in the sub-critical regime only");
  int q0 = first_negative_index(beta, p);
  double total = 0.0;
  for (int s = q0; s <= p; ++s) {
    double term = binomial(p, s) * std::pow(-beta_index(beta, s), p - 1);
    total += ((p - s) % 2 == 0) ? term : -term;
  }
  return total;
}

std::vector<std::uint64_t> intersect_paths(
    std::span<const std::vector<std::uint64_t>> paths) {
  if (paths.empty()) return {};
  std::vector<std::uint64_t> acc = paths.front();
  for (std::size_t r = 1; r < paths.size() && !acc.empty(); ++r) {
    std::vector<std::uint64_t> next;
    std::set_intersection(acc.begin(), acc.end(), paths[r].begin(), paths[r].end(),
                          std::back_inserter(next));
    acc = std::move(next);
  }
  return acc;
}

Bracket terminating_prob(const renewal::Law& law, const renewal::Tables& tables, int p) {
  if (beta_index_sign(BetaValue{law.beta, std::nullopt}, p) >= 0)
    throw std::domain_error("terminating_prob: requires a sub-critical pair (beta, p)");
  const auto N = tables.u_horizon();
  if (N < 16) throw std::out_of_range("terminating_prob: table too short");

  double series = 0.0;
  for (std::uint64_t n = 0; n <= N; ++n) series += std::pow(tables.u[n], p);

  // trailing-window envelope for u(n) <= C_env n^(beta-1)
  double c_env = 0.0;
  for (std::uint64_t n = N / 2; n <= N; ++n) {
    c_env = std::max(c_env,
                     tables.u[n] * std::pow(static_cast<double>(n), 1.0 - law.beta));
  }
  double beta_p = static_cast<double>(p) * law.beta - p + 1.0;
  double tail_bound = std::pow(c_env, p) *
                      std::pow(static_cast<double>(N), beta_p) / std::abs(beta_p);

  Bracket b;
  b.estimate = 1.0 / series;
  b.hi = 1.0 / series;
  b.lo = 1.0 / (series + tail_bound);
  return b;
}

double intersection_tail_asymptotic(const renewal::Law& law, const BetaValue& beta,
                                    int p, std::uint64_t n) {
  int sign = beta_index_sign(beta, p);
  if (sign < 0)
    throw std::domain_error(
        "intersection_tail_asymptotic: sub-critical intersections terminate");
  double gg = std::tgamma(beta.value) * std::tgamma(1.0 - beta.value);
  double base = std::pow(law.tail_constant * gg, p);
  if (sign == 0) return base / std::log(static_cast<double>(n));
  double bp = beta_index(beta, p);
  return std::pow(static_cast<double>(n), -bp) * base /
         (std::tgamma(bp) * std::tgamma(1.0 - bp));
}

double intersection_tail_mc(const renewal::Law& law, int p, std::uint64_t n,
                            std::uint64_t reps, RandomStream& rng) {
  std::uint64_t open = 0;
  std::vector<std::vector<std::uint64_t>> sets(p);
  for (std::uint64_t r = 0; r < reps; ++r) {
    for (int j = 0; j < p; ++j) sets[j] = renewal::sample_renewal_epochs(law, n, rng);
    auto joint = intersect_paths(sets);
    // joint always contains 0; a terminating-by-n sample has nothing else
    if (joint.size() <= 1) ++open;
  }
  return static_cast<double>(open) / static_cast<double>(reps);
}

TailProcessDraw sample_tail_process(const renewal::Law& law, int p, std::uint64_t m,
                                    RandomStream& rng) {
  TailProcessDraw draw;
  draw.sign = rng.next_sign();
  std::vector<std::vector<std::uint64_t>> sets(p);
  for (int j = 0; j < p; ++j) sets[j] = renewal::sample_renewal_epochs(law, m, rng);
  auto joint = intersect_paths(sets);
  std::vector<std::uint8_t> mask(m + 1, 0);
  for (auto k : joint) mask[k] = 1;
  draw.in_intersection = std::move(mask);
  return draw;
}

}  // namespace srm::isect
