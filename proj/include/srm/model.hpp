#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "srm/params.hpp"
#include "srm/random.hpp"
#include "srm/renewal.hpp"

namespace srm::model {

// Stream fork layout under one replicate stream.  Fixed tags keep the arrival
// block, the sign block, and each per-series path block on their own streams,
// so environments that share a replicate stream but differ in window length or
// series count agree on every component they have in common.
inline constexpr std::uint64_t kGammaTag = 0;
inline constexpr std::uint64_t kSignTag = 1;
inline constexpr std::uint64_t kPathTagBase = 2;

// Independent ingredients of one realization: Poisson arrival magnitudes,
// Rademacher signs, and one window-conditioned renewal path per series index.
struct SeriesEnvironment {
  ModelParams params;
  std::uint64_t series_len = 0;      // resolved L
  std::vector<double> gamma;         // Gamma_1 < Gamma_2 < ...
  std::vector<double> sign;          // +-1
  std::vector<double> weight;        // sign_i * Gamma_i^(-1/alpha)
  std::vector<renewal::Path> path;   // path[i] belongs to series index i+1
  double stationary_mass = 0.0;      // w_n
  double conditioning_mass = 0.0;    // 1 + w_{n-1}
};

// Series count when the caller leaves it unset.  Scales with the conditioning
// mass so the expected number of series covering a site stays order one; the
// super-critical factor is doubled because heavy coverage overlaps there.
// Empirical choice, auditable through truncation_diagnostic.
std::uint64_t default_series_len(Regime regime, double conditioning_mass, int p);

SeriesEnvironment sample_environment(const ModelParams& params, const renewal::Law& law,
                                     const renewal::Tables& tables, RandomStream& root);

// One evaluated window.  value[k-1] holds X_k for sites k = 1..n; the coverage
// lists (CSR over sites) hold the series indices whose path hits each site.
struct PathRealization {
  std::vector<double> value;
  std::vector<std::uint32_t> cover_offset;  // n + 1 entries
  std::vector<std::uint32_t> cover_index;   // 1-based series indices
  double scale = 0.0;                       // w_n^(p/alpha)
  std::uint64_t tuples_evaluated = 0;

  std::span<const std::uint32_t> coverage(std::uint64_t site) const {
    return std::span<const std::uint32_t>(cover_index)
        .subspan(cover_offset[site - 1], cover_offset[site] - cover_offset[site - 1]);
  }
};

// X_k = w_n^(p/alpha) * e_p({weight_i : i covers k}).  Sites covered by fewer
// than p series evaluate to zero.
PathRealization evaluate_path(const SeriesEnvironment& env);

// Same realization restricted to index tuples with product below K * r_n and
// top index below w_n; everything the scaling limit keeps.  Needs a regime
// where r_n is defined, so super-critical inputs are rejected.
PathRealization evaluate_truncated_path(const SeriesEnvironment& env, double K);

struct TruncationOptions {
  std::uint64_t start_len = 0;  // 0: a quarter of the regime default
  int doublings = 4;
  double tol = 0.01;
};

struct TruncationReport {
  struct Row {
    std::uint64_t series_len;
    double median_gap;  // median over reps of max_k |X^(L) - X^(2L)| / c_n
    double q90_gap;
  };
  std::vector<Row> rows;
  std::optional<std::uint64_t> recommended;  // first L with median_gap < tol
};

// Doubling study of the series cutoff: for each L in the ladder, evaluates the
// window at L and at 2L on shared randomness and reports the normalized
// sup-norm gap across replicates.
TruncationReport truncation_diagnostic(const ModelParams& params,
                                       const renewal::Law& law,
                                       const renewal::Tables& tables, std::uint64_t reps,
                                       const TruncationOptions& opts = {});

}  // namespace srm::model
