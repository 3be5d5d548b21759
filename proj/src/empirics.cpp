#include "srm/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "srm/intersection.hpp"
#include "srm/limits.hpp"
#include "srm/model.hpp"
#include "srm/parallel.hpp"

namespace srm::empirics {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// P(a window-conditioned renewal set meets A), A sorted, by first-passage
// decomposition: h_j = 1/W_n - sum_{l<j} h_l u(a_j - a_l).
double hit_probability(const renewal::Tables& tables, double conditioning_mass,
                       std::span<const std::uint64_t> a) {
  std::vector<double> h(a.size());
  double total = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    double v = 1.0 / conditioning_mass;
    for (std::size_t l = 0; l < j; ++l) v -= h[l] * tables.u[a[j] - a[l]];
    h[j] = v;
    total += v;
  }
  return total;
}

}  // namespace

std::vector<double> empirical_supmeasure(std::span<const double> value,
                                         std::span<const Interval> intervals) {
  if (intervals.empty()) throw std::invalid_argument("no intervals given");
  auto n = static_cast<double>(value.size());
  std::vector<double> out;
  out.reserve(intervals.size());
  for (const auto& iv : intervals) {
    if (!(iv.lo >= 0.0) || !(iv.hi <= 1.0) || !(iv.lo <= iv.hi)) {
      throw std::invalid_argument("interval must satisfy 0 <= lo <= hi <= 1");
    }
    auto first = static_cast<std::uint64_t>(std::floor(iv.lo * n + 1e-9)) + 1;
    auto last = static_cast<std::uint64_t>(std::floor(iv.hi * n + 1e-9));
    first = std::max<std::uint64_t>(first, 1);
    last = std::min<std::uint64_t>(last, value.size());
    double m = kNegInf;
    for (std::uint64_t k = first; k <= last; ++k) m = std::max(m, value[k - 1]);
    out.push_back(m);
  }
  return out;
}

std::uint64_t default_block_len(Regime regime, std::uint64_t n, int p) {
  double d;
  if (regime == Regime::Critical) {
    d = std::ceil(static_cast<double>(n) /
                  std::pow(std::log(static_cast<double>(n)), p));
  } else {
    d = std::floor(std::sqrt(static_cast<double>(n)));
  }
  auto len = static_cast<std::uint64_t>(d);
  return std::clamp<std::uint64_t>(len, 1, n);
}

std::vector<double> block_maxima(std::span<const double> value,
                                 const BlockScheme& scheme) {
  if (scheme.block_len == 0) throw std::invalid_argument("block length must be positive");
  std::uint64_t blocks = value.size() / scheme.block_len;
  std::vector<double> out(blocks, kNegInf);
  for (std::uint64_t j = 0; j < blocks; ++j) {
    for (std::uint64_t k = j * scheme.block_len; k < (j + 1) * scheme.block_len; ++k) {
      out[j] = std::max(out[j], value[k]);
    }
  }
  return out;
}

ExceedanceCounts exceedance_counts(std::span<const double> value,
                                   const BlockScheme& scheme, double threshold) {
  ExceedanceCounts counts;
  std::uint64_t blocks = value.size() / scheme.block_len;
  for (std::uint64_t j = 0; j < blocks; ++j) {
    bool hit = false;
    for (std::uint64_t k = j * scheme.block_len; k < (j + 1) * scheme.block_len; ++k) {
      if (value[k] > threshold) {
        counts.exceedances += 1;
        hit = true;
      }
    }
    counts.blocks_hit += hit;
  }
  return counts;
}

std::optional<double> extremal_index_blocks(std::span<const double> value,
                                            const BlockScheme& scheme,
                                            double threshold) {
  auto counts = exceedance_counts(value, scheme, threshold);
  if (counts.exceedances == 0) return std::nullopt;
  return static_cast<double>(counts.blocks_hit) /
         static_cast<double>(counts.exceedances);
}

double ks_distance(std::span<const double> samples,
                   const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("no samples given");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    double f = std::clamp(cdf(sorted[i]), 0.0, 1.0);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
  }
  return d;
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw std::invalid_argument("no values given");
  if (!(q >= 0.0) || !(q <= 1.0)) throw std::invalid_argument("quantile outside [0,1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  auto rank = static_cast<std::uint64_t>(std::ceil(q * static_cast<double>(sorted.size())));
  rank = std::clamp<std::uint64_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

double quantile_abs(std::span<const double> values, double q) {
  std::vector<double> magnitudes(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) magnitudes[i] = std::abs(values[i]);
  return quantile(magnitudes, q);
}

SweepResult scaling_sweep(const ModelParams& base, const renewal::Law& law,
                          std::span<const std::uint64_t> n_grid,
                          std::uint64_t replicates, const SweepOptions& opts) {
  if (n_grid.size() < 4) throw std::invalid_argument("horizon grid needs 4 points");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] == 0 || (n_grid[i] & (n_grid[i] - 1)) != 0) {
      throw std::invalid_argument("horizon grid must be dyadic");
    }
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
      throw std::invalid_argument("horizon grid must increase");
    }
  }
  if (replicates == 0) throw std::invalid_argument("replicates must be positive");

  SweepResult result;
  result.regime = isect::regime_of(base.beta, base.p);
  for (std::uint64_t n : n_grid) {
    ModelParams params = base;
    params.n = n;
    params.validate();
    auto tables = renewal::renewal_mass(law, 64);
    renewal::extend_weights(law, tables, n);

    auto maxima = parallel::replicate_map<double>(
        replicates, opts.threads, [&](std::uint64_t r) {
          auto root = RandomStream::seed_stream(params.seed, r);
          auto env = model::sample_environment(params, law, tables, root);
          auto path = model::evaluate_path(env);
          double m = kNegInf;
          for (double v : path.value) m = std::max(m, v);
          return m;
        });

    SweepRow row;
    row.n = n;
    row.replicates = replicates;
    row.median_max = median_of(maxima);
    row.c_n = limits::normalization(params);
    row.normalized = row.median_max / row.c_n;
    if (opts.limit_cdf) {
      std::vector<double> normalized(maxima.size());
      for (std::size_t i = 0; i < maxima.size(); ++i) normalized[i] = maxima[i] / row.c_n;
      row.ks = ks_distance(normalized, opts.limit_cdf);
    }
    result.rows.push_back(std::move(row));
  }

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  auto m = static_cast<double>(result.rows.size());
  for (const auto& row : result.rows) {
    double x = std::log(static_cast<double>(row.n));
    double y = std::log(row.median_max);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  result.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return result;
}

RhoEstimate rho_block_mc(const ModelParams& params, const renewal::Law& law,
                         const renewal::Tables& tables, const BlockScheme& scheme,
                         std::uint64_t trials) {
  params.validate();
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  std::uint64_t d = scheme.block_len;
  std::uint64_t n = params.n;
  if (d == 0 || d > n) throw std::invalid_argument("block length outside [1, n]");
  // p = 1 always has a positive tail index yet admits an exact first-hit law,
  // so only the genuinely multi-path regimes are gated on beta_p
  if (params.p >= 2 && isect::beta_index_sign(params.beta, params.p) > 0) {
    throw std::domain_error("block-hit asymptotics need beta_p <= 0");
  }
  if (tables.u_horizon() < d || tables.w_horizon() < n) {
    throw std::out_of_range("tables must cover the block (u) and horizon (w)");
  }

  double mass_n = tables.conditioning_mass(n);
  double mass_d = tables.conditioning_mass(d);

  RhoEstimate out;
  out.trials = trials;

  if (params.p == 1) {
    std::vector<std::uint64_t> block(d);
    for (std::uint64_t k = 0; k < d; ++k) block[k] = k + 1;
    out.estimate = 0.5 * hit_probability(tables, mass_n, block);
    out.std_error = 0.0;
  } else {
    double weight = std::pow(mass_d / mass_n, params.p - 1);
    double sum = 0.0;
    double sum_sq = 0.0;
    std::vector<std::uint64_t> joint;
    std::vector<std::uint64_t> narrowed;
    for (std::uint64_t t = 0; t < trials; ++t) {
      auto root = RandomStream::seed_stream(params.seed, t);
      for (int i = 0; i < params.p - 1; ++i) {
        auto stream = root.fork(static_cast<std::uint64_t>(i));
        auto path = renewal::sample_conditioned_renewal(law, tables, d, stream);
        if (i == 0) {
          joint = std::move(path.hits);
        } else {
          narrowed.clear();
          std::set_intersection(joint.begin(), joint.end(), path.hits.begin(),
                                path.hits.end(), std::back_inserter(narrowed));
          joint.swap(narrowed);
        }
        if (joint.empty()) break;
      }
      double est =
          joint.empty() ? 0.0 : 0.5 * weight * hit_probability(tables, mass_n, joint);
      sum += est;
      sum_sq += est * est;
    }
    double mean = sum / static_cast<double>(trials);
    double var = sum_sq / static_cast<double>(trials) - mean * mean;
    out.estimate = mean;
    out.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(trials));
  }

  if (params.p == 1) {
    out.asymptotic = 0.5 * tables.stationary_mass(d) / tables.stationary_mass(n);
    return out;
  }
  double per_block = static_cast<double>(n) / static_cast<double>(scheme.block_count(n));
  double w_n = tables.stationary_mass(n);
  double factor;
  if (isect::beta_index_sign(params.beta, params.p) < 0) {
    factor = isect::terminating_prob(law, tables, params.p).estimate;
  } else {
    double gamma_pair = law.tail_constant * std::tgamma(params.beta.value) *
                        std::tgamma(1.0 - params.beta.value);
    factor = std::pow(gamma_pair, params.p) / std::log(static_cast<double>(d));
  }
  out.asymptotic = 0.5 * factor * per_block / std::pow(w_n, params.p);
  return out;
}

TailCheckReport conditional_tail_check(const ModelParams& params,
                                       const renewal::Law& law,
                                       const renewal::Tables& tables, int m,
                                       std::uint64_t replicates,
                                       const TailCheckOptions& opts) {
  params.validate();
  if (m < 1) throw std::invalid_argument("pattern depth must be at least 1");
  if (m > 20) throw std::invalid_argument("pattern depth too large for atom table");
  if (replicates == 0) throw std::invalid_argument("replicates must be positive");
  std::size_t atoms = std::size_t{1} << (m + 1);

  auto per_replicate = parallel::replicate_map<std::vector<std::uint64_t>>(
      replicates, opts.threads, [&](std::uint64_t r) {
        std::vector<std::uint64_t> counts(atoms, 0);
        auto root = RandomStream::seed_stream(params.seed, r);
        auto env = model::sample_environment(params, law, tables, root);
        auto path = model::evaluate_path(env);
        double threshold = quantile_abs(path.value, opts.quantile);
        for (std::uint64_t k = 1; k + static_cast<std::uint64_t>(m) <= params.n; ++k) {
          double a = std::abs(path.value[k - 1]);
          if (!(a > threshold)) continue;
          std::size_t atom = path.value[k - 1] > 0 ? 1 : 0;
          for (int j = 1; j <= m; ++j) {
            if (std::abs(path.value[k - 1 + j]) > opts.ratio_cut * a) {
              atom |= std::size_t{1} << j;
            }
          }
          counts[atom] += 1;
        }
        return counts;
      });

  TailCheckReport report;
  std::vector<std::uint64_t> empirical(atoms, 0);
  for (const auto& counts : per_replicate) {
    for (std::size_t i = 0; i < atoms; ++i) empirical[i] += counts[i];
  }
  for (auto c : empirical) report.exceedances += c;
  if (report.exceedances < opts.min_exceedances) {
    throw std::runtime_error("not enough exceedances above the threshold");
  }

  std::vector<std::uint64_t> reference(atoms, 0);
  auto ref_stream = RandomStream::seed_stream(params.seed, 0).fork(std::uint64_t{1} << 40);
  for (std::uint64_t t = 0; t < opts.reference_draws; ++t) {
    auto draw = isect::sample_tail_process(law, params.p, static_cast<std::uint64_t>(m),
                                           ref_stream);
    std::size_t atom = draw.sign > 0 ? 1 : 0;
    for (int j = 1; j <= m; ++j) {
      if (draw.in_intersection[static_cast<std::size_t>(j)]) atom |= std::size_t{1} << j;
    }
    reference[atom] += 1;
  }

  report.empirical.resize(atoms);
  report.reference.resize(atoms);
  double tv = 0.0;
  for (std::size_t i = 0; i < atoms; ++i) {
    report.empirical[i] =
        static_cast<double>(empirical[i]) / static_cast<double>(report.exceedances);
    report.reference[i] =
        static_cast<double>(reference[i]) / static_cast<double>(opts.reference_draws);
    tv += std::abs(report.empirical[i] - report.reference[i]);
  }
  report.tv = 0.5 * tv;
  return report;
}

}  // namespace srm::empirics
