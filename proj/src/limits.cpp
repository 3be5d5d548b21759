#include "srm/limits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srm/symmetric.hpp"

namespace srm::limits {

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

double log_n(std::uint64_t n) { return std::log(static_cast<double>(n)); }

}  // namespace

double normalization_for(Regime regime, double alpha, const BetaValue& beta, int p,
                         std::uint64_t n) {
  double nn = static_cast<double>(n);
  switch (regime) {
    case Regime::SuperCritical: {
      double bp = isect::beta_index(beta, p);
      return std::pow(nn, (1.0 - bp) / alpha);
    }
    case Regime::Critical: {
      if (n < 16)
        throw std::invalid_argument("normalization: critical scaling needs n >= 16");
      double ll = std::log(std::log(nn));
      return std::pow(nn * std::pow(ll, p - 1) / std::log(nn), 1.0 / alpha);
    }
    case Regime::SubCritical: {
      if (p >= 2 && n < 2)
        throw std::invalid_argument("normalization: needs n >= 2 when p >= 2");
      return std::pow(nn * std::pow(std::log(nn), p - 1), 1.0 / alpha);
    }
  }
  throw std::logic_error("normalization: unreachable");
}

double normalization(const ModelParams& params) {
  params.validate();
  return normalization_for(isect::regime_of(params.beta, params.p), params.alpha,
                           params.beta, params.p, params.n);
}

ConstantValue limit_constant(const renewal::Law& law, const renewal::Tables& tables,
                             const BetaValue& beta, int p) {
  ConstantValue out;
  double cf = law.tail_constant;
  switch (isect::regime_of(beta, p)) {
    case Regime::SuperCritical:
      out.value = std::pow(cf / (1.0 - beta.value), p);
      return out;
    case Regime::Critical: {
      double gg = std::tgamma(beta.value) * std::tgamma(1.0 - beta.value);
      out.value = 0.5 * std::pow(cf * gg, p) / (factorial(p) * factorial(p - 1));
      return out;
    }
    case Regime::SubCritical: {
      auto q = isect::terminating_prob(law, tables, p);
      double shape = isect::shape_constant(beta, p);
      double scale = shape / (2.0 * factorial(p) * factorial(p - 1));
      out.value = q.estimate * scale;
      out.bracket = isect::Bracket{q.lo * scale, q.hi * scale, q.estimate * scale};
      return out;
    }
  }
  throw std::logic_error("limit_constant: unreachable");
}

double frechet_max_cdf(double x, double leb, double constant, double alpha) {
  if (leb < 0.0) throw std::invalid_argument("frechet_max_cdf: negative measure");
  if (leb == 0.0) return 1.0;
  if (x <= 0.0) return 0.0;
  return std::exp(-constant * leb * std::pow(x, -alpha));
}

namespace {

void aggregation_walk(int index_cap, int p, int p_max, std::vector<std::uint32_t>& cur,
                      int next,
                      const std::function<void(std::span<const std::uint32_t>)>& fn,
                      std::uint64_t guard, std::uint64_t& seen) {
  int size = static_cast<int>(cur.size());
  if (size >= p) {
    if (++seen > guard)
      throw std::length_error("aggregation enumeration exceeds its guard");
    fn(cur);
  }
  if (size == p_max) return;
  for (int i = next; i <= index_cap; ++i) {
    cur.push_back(static_cast<std::uint32_t>(i));
    aggregation_walk(index_cap, p, p_max, cur, i + 1, fn, guard, seen);
    cur.pop_back();
  }
}

}  // namespace

void for_each_aggregation(int index_cap, int p, int p_prime,
                          const std::function<void(std::span<const std::uint32_t>)>& fn,
                          std::uint64_t guard) {
  if (p < 1 || p_prime < p) throw std::invalid_argument("aggregations: need 1 <= p <= p_prime");
  int p_max = std::min(p_prime, index_cap);
  std::vector<std::uint32_t> cur;
  cur.reserve(static_cast<std::size_t>(p_max));
  std::uint64_t seen = 0;
  aggregation_walk(index_cap, p, p_max, cur, 1, fn, guard, seen);
}

std::vector<std::vector<std::uint32_t>> enumerate_aggregations(int index_cap, int p,
                                                               int p_prime,
                                                               std::uint64_t guard) {
  std::vector<std::vector<std::uint32_t>> out;
  for_each_aggregation(
      index_cap, p, p_prime,
      [&out](std::span<const std::uint32_t> c) {
        out.emplace_back(c.begin(), c.end());
      },
      guard);
  return out;
}

ZDraw sample_limit_functional(double alpha, int p, int p_prime, int index_cap,
                              RandomStream& rng, double sensitivity_tol) {
  if (!(alpha > 0.0) || !(alpha < 2.0))
    throw std::invalid_argument("sample_limit_functional: alpha must lie in (0,2)");
  std::vector<double> weight(static_cast<std::size_t>(index_cap));
  double arrival = 0.0;
  for (int i = 0; i < index_cap; ++i) {
    arrival += rng.next_exponential();
    double magnitude = std::pow(arrival, -1.0 / alpha);
    weight[static_cast<std::size_t>(i)] = rng.next_sign() * magnitude;
  }

  ZDraw draw;
  double best = -HUGE_VAL;
  double best_half = -HUGE_VAL;
  int half_cap = index_cap / 2;
  std::vector<double> scratch;
  for_each_aggregation(index_cap, p, p_prime,
                       [&](std::span<const std::uint32_t> support) {
                         scratch.clear();
                         for (auto i : support) scratch.push_back(weight[i - 1]);
                         double v = elementary_symmetric(scratch, p);
                         best = std::max(best, v);
                         if (!support.empty() &&
                             support.back() <= static_cast<std::uint32_t>(half_cap))
                           best_half = std::max(best_half, v);
                       });
  draw.value = best;
  draw.value_half_cap = best_half;
  draw.cap_sensitive = std::abs(best - best_half) > sensitivity_tol;
  return draw;
}

LimitLaw LimitLaw::closed_form(double constant, double alpha) {
  LimitLaw l;
  l.constant_ = constant;
  l.alpha_ = alpha;
  return l;
}

LimitLaw LimitLaw::empirical(const renewal::Law& law, const BetaValue& beta, int p,
                             double alpha, std::uint64_t draws, std::uint64_t seed,
                             int index_cap) {
  if (isect::regime_of(beta, p) != Regime::SuperCritical)
    throw std::domain_error("LimitLaw::empirical: reserved for the super-critical law");
  LimitLaw l;
  l.alpha_ = alpha;
  l.constant_ = std::pow(law.tail_constant / (1.0 - beta.value), p);
  int pp = isect::p_prime(beta);
  double scale = std::pow(l.constant_, 1.0 / alpha);
  l.draws_.reserve(draws);
  for (std::uint64_t r = 0; r < draws; ++r) {
    auto stream = RandomStream::seed_stream(seed, r);
    l.draws_.push_back(scale *
                       sample_limit_functional(alpha, p, pp, index_cap, stream).value);
  }
  std::sort(l.draws_.begin(), l.draws_.end());
  return l;
}

double LimitLaw::cdf(double x) const {
  if (draws_.empty()) return frechet_max_cdf(x, 1.0, constant_, alpha_);
  auto it = std::upper_bound(draws_.begin(), draws_.end(), x);
  return static_cast<double>(it - draws_.begin()) / static_cast<double>(draws_.size());
}

RegimeReport make_regime_report(const renewal::Law& law, const renewal::Tables& tables,
                                const BetaValue& beta, int p, double alpha) {
  RegimeReport rep;
  rep.alpha = alpha;
  rep.beta = beta;
  rep.p = p;
  rep.regime = isect::regime_of(beta, p);
  rep.p_prime = isect::p_prime(beta);
  int top = std::max(p, rep.p_prime) + 1;
  for (int q = 1; q <= top; ++q) rep.beta_indices.push_back(isect::beta_index(beta, q));
  rep.constant = limit_constant(law, tables, beta, p);
  if (rep.regime == Regime::SubCritical) {
    rep.first_negative_index = isect::first_negative_index(beta, p);
    rep.terminating = isect::terminating_prob(law, tables, p);
    rep.shape = isect::shape_constant(beta, p);
    rep.extremal_index = rep.terminating->estimate * *rep.shape;
  } else if (rep.regime == Regime::Critical) {
    rep.extremal_index = 0.0;
  }
  return rep;
}

}  // namespace srm::limits
