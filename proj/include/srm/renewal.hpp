#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "srm/random.hpp"

namespace srm::renewal {

// Increment law on {1,2,...} described through its survival function
// tail(n) = P(T > n), tail(0) = 1, with tail(n) ~ tail_constant * n^-beta.
// quantile(u) = min{n >= 1 : tail(n) < u} drives sampling by inversion;
// laws without a closed form may leave it empty and pay for a search.
struct Law {
  double beta = 0.5;
  double tail_constant = 1.0;
  std::function<double(std::uint64_t)> tail;
  std::function<double(std::uint64_t)> pmf;
  std::function<std::uint64_t(double)> quantile;
};

// tail(n) = (n+1)^-beta.  Satisfies the bounded-hazard condition
// sup_n n*pmf(n)/tail(n) < inf and has tail_constant = 1.
Law default_law(double beta);

// One increment by tail inversion.  Values beyond 2^62 saturate; horizons in
// use are far below that, so saturation only shows up in the deep tail.
std::uint64_t sample_increment(const Law& law, RandomStream& rng);

// u[k] = P(k is a renewal epoch), u[0] = 1.
// w[k] = sum_{j=1..k} tail(j); conditioning_mass(k) = 1 + w[k-1] is the mass
// of stationary paths meeting {1,...,k}.
struct Tables {
  std::vector<double> u;
  std::vector<double> w;

  std::uint64_t u_horizon() const { return u.empty() ? 0 : u.size() - 1; }
  std::uint64_t w_horizon() const { return w.empty() ? 0 : w.size() - 1; }

  double stationary_mass(std::uint64_t n) const { return w.at(n); }
  double conditioning_mass(std::uint64_t n) const {
    return n == 0 ? 0.0 : 1.0 + w.at(n - 1);
  }
  // W_k as a function of k is the cumulative first-hit distribution up to
  // normalization: P(V <= k) = conditioning_mass(k) / conditioning_mass(n).
  double first_hit_cdf(std::uint64_t k, std::uint64_t n) const {
    return conditioning_mass(k) / conditioning_mass(n);
  }
};

struct TableOptions {
  std::uint64_t recursion_cap = std::uint64_t{1} << 17;
  bool allow_fft = false;  // opt-in O(N log N) route past the cap
};

// Renewal mass function by direct convolution, u(n) = sum f(k) u(n-k), or by
// FFT power-series inversion of 1 - sum pmf(k) x^k when N exceeds the cap.
Tables renewal_mass(const Law& law, std::uint64_t N, const TableOptions& opts = {});

// Grows w past the u horizon; sampling at large n needs only w.
void extend_weights(const Law& law, Tables& tables, std::uint64_t N);

// Renewal set conditioned to meet {1,...,n}: first hit V has mass
// tail(k-1)/conditioning_mass(n) at k, then i.i.d. increments until the path
// leaves the window.  hits are the points in {1..n}; overshoot is the first
// point beyond n.
struct Path {
  std::vector<std::uint64_t> hits;
  std::uint64_t overshoot = 0;
};

Path sample_conditioned_renewal(const Law& law, const Tables& tables,
                                std::uint64_t n, RandomStream& rng);

// Unconditioned renewal epochs in [0, horizon], starting from 0.
std::vector<std::uint64_t> sample_renewal_epochs(const Law& law, std::uint64_t horizon,
                                                 RandomStream& rng);

struct WeightPair {
  double exact;
  double asymptotic;  // tail_constant * n^(1-beta) / (1-beta)
};

WeightPair stationary_weight(const Law& law, const Tables& tables, std::uint64_t n);

// n^(beta-1) / (tail_constant * Gamma(beta) * Gamma(1-beta))
double renewal_mass_asymptotic(const Law& law, std::uint64_t n);

// max_{k <= upto} |sum_{j=0..k} tail(j) u(k-j) - 1|; identically 0 for a
// proper law up to rounding.
double stationary_identity_residual(const Law& law, const Tables& tables,
                                    std::uint64_t upto);

}  // namespace srm::renewal
