#include "srm/model.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>

#include "srm/intersection.hpp"
#include "srm/limits.hpp"
#include "srm/symmetric.hpp"
#include "srm/tuples.hpp"

namespace srm::model {

namespace {

std::uint64_t resolve_series_len(const ModelParams& params, Regime regime,
                                 double conditioning_mass) {
  std::uint64_t len = params.series_len
                          ? static_cast<std::uint64_t>(*params.series_len)
                          : default_series_len(regime, conditioning_mass, params.p);
  if (len < static_cast<std::uint64_t>(params.p)) {
    throw std::invalid_argument("series length must be at least p");
  }
  return len;
}

// Coverage lists in CSR form, series indices ascending within each site.
void build_coverage(const SeriesEnvironment& env, PathRealization& out) {
  std::uint64_t n = env.params.n;
  out.cover_offset.assign(n + 1, 0);
  for (const auto& path : env.path) {
    for (auto k : path.hits) out.cover_offset[k] += 1;
  }
  for (std::uint64_t k = 1; k <= n; ++k) out.cover_offset[k] += out.cover_offset[k - 1];
  out.cover_index.resize(out.cover_offset[n]);
  std::vector<std::uint32_t> cursor(out.cover_offset.begin(),
                                    out.cover_offset.end() - 1);
  for (std::uint32_t i = 0; i < env.path.size(); ++i) {
    for (auto k : env.path[i].hits) out.cover_index[cursor[k - 1]++] = i + 1;
  }
}

std::uint64_t subsets_of_size(std::uint64_t m, int p) {
  if (m < static_cast<std::uint64_t>(p)) return 0;
  std::uint64_t c = 1;
  for (int j = 1; j <= p; ++j) c = c * (m - static_cast<std::uint64_t>(p - j)) / j;
  return c;
}

double tuple_domain_radius(const SeriesEnvironment& env) {
  Regime regime = isect::regime_of(env.params.beta, env.params.p);
  if (regime == Regime::SuperCritical) {
    throw std::domain_error(
        "tuple-domain radius undefined in the super-critical regime");
  }
  double c = limits::normalization_for(regime, env.params.alpha, env.params.beta,
                                       env.params.p, env.params.n);
  return std::pow(env.stationary_mass, env.params.p) / std::pow(c, env.params.alpha);
}

}  // namespace

std::uint64_t default_series_len(Regime regime, double conditioning_mass, int p) {
  auto mass = static_cast<std::uint64_t>(std::ceil(conditioning_mass));
  std::uint64_t len = regime == Regime::SuperCritical
                          ? std::max<std::uint64_t>(128, 2 * mass)
                          : std::max<std::uint64_t>(64, mass);
  return std::max<std::uint64_t>(len, static_cast<std::uint64_t>(p));
}

SeriesEnvironment sample_environment(const ModelParams& params, const renewal::Law& law,
                                     const renewal::Tables& tables, RandomStream& root) {
  params.validate();
  if (tables.w_horizon() < params.n) {
    throw std::out_of_range("weight table does not cover the horizon");
  }
  Regime regime = isect::regime_of(params.beta, params.p);

  SeriesEnvironment env;
  env.params = params;
  env.stationary_mass = tables.stationary_mass(params.n);
  env.conditioning_mass = tables.conditioning_mass(params.n);
  env.series_len = resolve_series_len(params, regime, env.conditioning_mass);

  auto gamma_stream = root.fork(kGammaTag);
  auto sign_stream = root.fork(kSignTag);
  env.gamma.resize(env.series_len);
  env.sign.resize(env.series_len);
  env.weight.resize(env.series_len);
  double arrival = 0.0;
  for (std::uint64_t i = 0; i < env.series_len; ++i) {
    arrival += gamma_stream.next_exponential();
    env.gamma[i] = arrival;
    env.sign[i] = sign_stream.next_sign();
    env.weight[i] = env.sign[i] * std::pow(arrival, -1.0 / params.alpha);
  }

  env.path.resize(env.series_len);
  for (std::uint64_t i = 0; i < env.series_len; ++i) {
    auto path_stream = root.fork(kPathTagBase + i);
    env.path[i] = renewal::sample_conditioned_renewal(law, tables, params.n, path_stream);
  }
  return env;
}

PathRealization evaluate_path(const SeriesEnvironment& env) {
  std::uint64_t n = env.params.n;
  int p = env.params.p;

  PathRealization out;
  build_coverage(env, out);
  out.scale = std::pow(env.stationary_mass, static_cast<double>(p) / env.params.alpha);
  out.value.assign(n, 0.0);

  std::vector<double> site_weights;
  for (std::uint64_t k = 1; k <= n; ++k) {
    auto cover = out.coverage(k);
    if (cover.size() < static_cast<std::size_t>(p)) continue;
    site_weights.clear();
    for (auto i : cover) site_weights.push_back(env.weight[i - 1]);
    out.value[k - 1] = out.scale * elementary_symmetric(site_weights, p);
    out.tuples_evaluated += subsets_of_size(cover.size(), p);
  }
  return out;
}

PathRealization evaluate_truncated_path(const SeriesEnvironment& env, double K) {
  if (!(K > 0.0)) throw std::invalid_argument("truncation level must be positive");
  std::uint64_t n = env.params.n;
  int p = env.params.p;
  double radius = tuple_domain_radius(env);

  PathRealization out;
  build_coverage(env, out);
  out.scale = std::pow(env.stationary_mass, static_cast<double>(p) / env.params.alpha);
  out.value.assign(n, 0.0);

  auto index_cap = std::min<std::uint64_t>(
      env.series_len, static_cast<std::uint64_t>(std::floor(env.stationary_mass)));
  tuples::Domain domain{p, K * radius, index_cap};

  std::vector<std::uint64_t> joint;
  std::vector<std::uint64_t> narrowed;
  tuples::for_each_tuple(domain, [&](std::span<const std::uint64_t> tuple) {
    out.tuples_evaluated += 1;
    double contribution = 1.0;
    for (auto i : tuple) contribution *= env.weight[i - 1];
    joint.assign(env.path[tuple[0] - 1].hits.begin(), env.path[tuple[0] - 1].hits.end());
    for (std::size_t j = 1; j < tuple.size() && !joint.empty(); ++j) {
      const auto& hits = env.path[tuple[j] - 1].hits;
      narrowed.clear();
      std::set_intersection(joint.begin(), joint.end(), hits.begin(), hits.end(),
                            std::back_inserter(narrowed));
      joint.swap(narrowed);
    }
    for (auto k : joint) out.value[k - 1] += contribution;
  });
  for (auto& v : out.value) v *= out.scale;
  return out;
}

TruncationReport truncation_diagnostic(const ModelParams& params,
                                       const renewal::Law& law,
                                       const renewal::Tables& tables, std::uint64_t reps,
                                       const TruncationOptions& opts) {
  if (reps == 0) throw std::invalid_argument("reps must be positive");
  params.validate();
  Regime regime = isect::regime_of(params.beta, params.p);
  double mass = tables.conditioning_mass(params.n);
  std::uint64_t base =
      opts.start_len
          ? opts.start_len
          : std::max<std::uint64_t>(default_series_len(regime, mass, params.p) / 4,
                                    static_cast<std::uint64_t>(params.p));
  double scale = limits::normalization(params);

  TruncationReport report;
  std::uint64_t len = base;
  for (int d = 0; d < opts.doublings; ++d, len *= 2) {
    std::vector<double> gaps(reps);
    for (std::uint64_t r = 0; r < reps; ++r) {
      auto root = RandomStream::seed_stream(params.seed, r);
      ModelParams at_len = params;
      at_len.series_len = static_cast<std::uint32_t>(len);
      ModelParams at_double = params;
      at_double.series_len = static_cast<std::uint32_t>(2 * len);
      auto path_len = evaluate_path(sample_environment(at_len, law, tables, root));
      auto path_double = evaluate_path(sample_environment(at_double, law, tables, root));
      double gap = 0.0;
      for (std::uint64_t k = 0; k < params.n; ++k) {
        gap = std::max(gap, std::abs(path_len.value[k] - path_double.value[k]));
      }
      gaps[r] = gap / scale;
    }
    std::sort(gaps.begin(), gaps.end());
    double median = gaps[reps / 2];
    double q90 = gaps[static_cast<std::uint64_t>(0.9 * static_cast<double>(reps - 1))];
    report.rows.push_back({len, median, q90});
    if (!report.recommended && median < opts.tol) report.recommended = len;
  }
  return report;
}

}  // namespace srm::model
