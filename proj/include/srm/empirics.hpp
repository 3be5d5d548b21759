#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "srm/params.hpp"
#include "srm/renewal.hpp"

namespace srm::empirics {

// Half-open fraction-of-horizon interval (lo, hi] inside [0,1]; site k belongs
// when lo < k/n <= hi.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Per-interval maxima of the path; an interval capturing no site yields -inf.
std::vector<double> empirical_supmeasure(std::span<const double> value,
                                         std::span<const Interval> intervals);

// Disjoint index blocks {(j-1)d+1, ..., jd}; the ragged tail past
// block_count * block_len is dropped by every block statistic.
struct BlockScheme {
  std::uint64_t block_len = 1;

  std::uint64_t block_count(std::uint64_t n) const { return n / block_len; }
};

// sqrt(n) blocks except in the critical regime, which pins d_n = ceil(n / log^p n).
std::uint64_t default_block_len(Regime regime, std::uint64_t n, int p);

std::vector<double> block_maxima(std::span<const double> value,
                                 const BlockScheme& scheme);

struct ExceedanceCounts {
  std::uint64_t blocks_hit = 0;
  std::uint64_t exceedances = 0;
};

ExceedanceCounts exceedance_counts(std::span<const double> value,
                                   const BlockScheme& scheme, double threshold);

// blocks_hit / exceedances; empty when nothing exceeds the threshold.
std::optional<double> extremal_index_blocks(std::span<const double> value,
                                            const BlockScheme& scheme,
                                            double threshold);

// Kolmogorov-Smirnov statistic against a reference distribution function.
double ks_distance(std::span<const double> samples,
                   const std::function<double(double)>& cdf);

// Nearest-rank empirical quantile, q in [0,1].
double quantile(std::span<const double> values, double q);
double quantile_abs(std::span<const double> values, double q);

struct SweepRow {
  std::uint64_t n = 0;
  std::uint64_t replicates = 0;
  double median_max = 0.0;
  double c_n = 0.0;
  double normalized = 0.0;            // median_max / c_n
  std::optional<double> ks;           // max/c_n samples vs the supplied limit law
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double slope = 0.0;  // least squares on log median_max vs log n
  Regime regime = Regime::SuperCritical;
};

struct SweepOptions {
  int threads = 1;
  std::function<double(double)> limit_cdf;  // optional per-row KS reference
};

// Median running maximum across a dyadic horizon grid (4 points or more).
// Replicate r reuses stream (seed, r) at every n, so rows are coupled and the
// whole sweep is reproducible independent of threading.
SweepResult scaling_sweep(const ModelParams& base, const renewal::Law& law,
                          std::span<const std::uint64_t> n_grid,
                          std::uint64_t replicates, const SweepOptions& opts = {});

struct RhoEstimate {
  double estimate = 0.0;    // half the probability that the p-fold
                            // intersection meets the first block
  double asymptotic = 0.0;  // regime formula at the same n, d_n
  double std_error = 0.0;
  std::uint64_t trials = 0;
};

// Conditional Monte Carlo: p-1 paths are drawn conditioned to meet the block
// (importance weight (W_d/W_n)^(p-1)), and the last path's hit probability on
// their common hits is computed exactly by a first-passage recursion over the
// renewal mass.  p = 1 collapses to a deterministic exact value.  Requires
// beta_p <= 0 and a u table covering the block length.
RhoEstimate rho_block_mc(const ModelParams& params, const renewal::Law& law,
                         const renewal::Tables& tables, const BlockScheme& scheme,
                         std::uint64_t trials);

struct TailCheckOptions {
  double quantile = 0.999;            // threshold as a |X| quantile, per replicate
  double ratio_cut = 0.5;             // neighbor occupied when |X_{k+j}| exceeds
                                      // ratio_cut * |X_k|
  std::uint64_t reference_draws = 200000;
  std::uint64_t min_exceedances = 2000;
  int threads = 1;
};

struct TailCheckReport {
  double tv = 0.0;
  std::uint64_t exceedances = 0;
  std::vector<double> empirical;  // atom = sign bit | occupancy bits 1..m
  std::vector<double> reference;
};

// Conditional law of (sign(X_k), occupancy of the next m sites) at high
// levels, against the simulated spectral tail process.  Occupancy uses the
// value ratio: sites whose value stays comparable to the exceedance count as
// occupied, which is the finite-n reading of the limit's exact zero pattern.
TailCheckReport conditional_tail_check(const ModelParams& params,
                                       const renewal::Law& law,
                                       const renewal::Tables& tables, int m,
                                       std::uint64_t replicates,
                                       const TailCheckOptions& opts = {});

}  // namespace srm::empirics
