#include "srm/renewal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srm::renewal {

namespace {

constexpr std::uint64_t kIncrementCap = std::uint64_t{1} << 62;

std::vector<double> pmf_prefix(const Law& law, std::uint64_t N) {
  std::vector<double> f(N + 1, 0.0);
  for (std::uint64_t k = 1; k <= N; ++k) f[k] = law.pmf(k);
  return f;
}

// Coefficients of 1 / (1 - F(x)) mod x^(N+1) by Newton doubling; each round
// squares the number of correct coefficients.  Convolutions run through
// real-to-complex FFTs.
std::vector<double> series_reciprocal_fft(const std::vector<double>& f, std::uint64_t N) {
  auto convolve = [](const std::vector<double>& a, const std::vector<double>& b,
                     std::size_t out_len) {
    std::size_t need = a.size() + b.size() - 1;
    std::size_t m = 1;
    while (m < need) m <<= 1;
    std::vector<double> fa(m, 0.0), fb(m, 0.0);
    std::copy(a.begin(), a.end(), fa.begin());
    std::copy(b.begin(), b.end(), fb.begin());
    std::vector<fftw_complex> ca(m / 2 + 1), cb(m / 2 + 1);
    fftw_plan pa = fftw_plan_dft_r2c_1d(static_cast<int>(m), fa.data(), ca.data(), FFTW_ESTIMATE);
    fftw_execute(pa);
    fftw_plan pb = fftw_plan_dft_r2c_1d(static_cast<int>(m), fb.data(), cb.data(), FFTW_ESTIMATE);
    fftw_execute(pb);
    for (std::size_t i = 0; i < ca.size(); ++i) {
      double re = ca[i][0] * cb[i][0] - ca[i][1] * cb[i][1];
      double im = ca[i][0] * cb[i][1] + ca[i][1] * cb[i][0];
      ca[i][0] = re;
      ca[i][1] = im;
    }
    std::vector<double> out(m);
    fftw_plan pc = fftw_plan_dft_c2r_1d(static_cast<int>(m), ca.data(), out.data(), FFTW_ESTIMATE);
    fftw_execute(pc);
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(pc);
    double scale = 1.0 / static_cast<double>(m);
    out.resize(out_len);
    for (double& v : out) v *= scale;
    return out;
  };

  // a = 1 - F has a(0) = 1, so the reciprocal exists as a formal series.
  std::vector<double> a(N + 1, 0.0);
  a[0] = 1.0;
  for (std::uint64_t k = 1; k <= N; ++k) a[k] = -f[k];

  std::vector<double> u{1.0};
  std::size_t known = 1;
  while (known < N + 1) {
    std::size_t next = std::min<std::size_t>(2 * known, N + 1);
    std::vector<double> a_head(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(next));
    std::vector<double> au = convolve(a_head, u, next);
    // u_next = u * (2 - a*u), truncated
    for (double& v : au) v = -v;
    au[0] += 2.0;
    u = convolve(u, au, next);
    known = next;
  }
  return u;
}

}  // namespace

Law default_law(double beta) {
  if (!(beta > 0.0) || !(beta < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
  Law law;
  law.beta = beta;
  law.tail_constant = 1.0;
  law.tail = [beta](std::uint64_t n) {
    return std::pow(static_cast<double>(n) + 1.0, -beta);
  };
  law.pmf = [beta](std::uint64_t n) {
    if (n == 0) return 0.0;
    // n^-beta - (n+1)^-beta, written to avoid cancellation at large n
    double nn = static_cast<double>(n);
    return -std::pow(nn, -beta) * std::expm1(-beta * std::log1p(1.0 / nn));
  };
  law.quantile = [beta](double u) {
    // min{n >= 1 : (n+1)^-beta < u}  <=>  n > u^(-1/beta) - 1
    double y = std::pow(u, -1.0 / beta);
    if (y >= static_cast<double>(kIncrementCap)) return kIncrementCap;
    auto n = std::max<std::uint64_t>(static_cast<std::uint64_t>(std::floor(y - 1.0)) + 1, 1);
    // repair one-ulp drift at exact grid boundaries; bounded, since past 2^53
    // the double grid cannot separate n from n+1 anyway
    for (int i = 0; i < 8 && std::pow(static_cast<double>(n) + 1.0, -beta) >= u; ++i) ++n;
    for (int i = 0; i < 8 && n > 1 && std::pow(static_cast<double>(n), -beta) < u; ++i) --n;
    return n;
  };
  return law;
}

std::uint64_t sample_increment(const Law& law, RandomStream& rng) {
  double u = rng.next_unit();
  if (law.quantile) return law.quantile(u);
  // Generic fallback: doubling bracket plus bisection on the survival function.
  std::uint64_t lo = 1, hi = 1;
  while (law.tail(hi) >= u) {
    lo = hi;
    if (hi >= kIncrementCap / 2) return kIncrementCap;
    hi *= 2;
  }
  // invariant: tail(lo) >= u > tail(hi), answer in (lo, hi]
  while (hi - lo > 1) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    (law.tail(mid) >= u ? lo : hi) = mid;
  }
  return law.tail(lo) < u ? lo : hi;
}

Tables renewal_mass(const Law& law, std::uint64_t N, const TableOptions& opts) {
  if (N > opts.recursion_cap && !opts.allow_fft)
    throw std::length_error("renewal_mass: N exceeds recursion cap; enable the FFT route");

  Tables t;
  auto f = pmf_prefix(law, N);
  if (N <= opts.recursion_cap) {
    t.u.assign(N + 1, 0.0);
    t.u[0] = 1.0;
    for (std::uint64_t n = 1; n <= N; ++n) {
      double s = 0.0;
      for (std::uint64_t k = 1; k <= n; ++k) s += f[k] * t.u[n - k];
      t.u[n] = s;
    }
  } else {
    t.u = series_reciprocal_fft(f, N);
    for (double& v : t.u) v = std::clamp(v, 0.0, 1.0);
  }

  t.w.assign(N + 1, 0.0);
  for (std::uint64_t k = 1; k <= N; ++k) t.w[k] = t.w[k - 1] + law.tail(k);
  return t;
}

void extend_weights(const Law& law, Tables& tables, std::uint64_t N) {
  if (tables.w.empty()) tables.w.assign(1, 0.0);
  std::uint64_t from = tables.w.size();
  if (N + 1 <= from) return;
  tables.w.resize(N + 1);
  for (std::uint64_t k = from; k <= N; ++k) tables.w[k] = tables.w[k - 1] + law.tail(k);
}

Path sample_conditioned_renewal(const Law& law, const Tables& tables,
                                std::uint64_t n, RandomStream& rng) {
  if (n == 0 || n > tables.w_horizon())
    throw std::out_of_range("sample_conditioned_renewal: weight table does not cover n");

  // First hit: P(V = k) proportional to tail(k-1), i.e. W_k = 1 + w[k-1]
  // crosses x at k = V.  w is strictly increasing, so binary search works.
  double x = rng.next_unit() * tables.conditioning_mass(n);
  double target = x - 1.0;
  auto begin = tables.w.begin();
  auto it = std::lower_bound(begin, begin + static_cast<std::ptrdiff_t>(n), target);
  std::uint64_t v = static_cast<std::uint64_t>(it - begin) + 1;

  Path path;
  path.hits.push_back(v);
  std::uint64_t pos = v;
  while (true) {
    std::uint64_t step = sample_increment(law, rng);
    if (step > n || pos > n - step) {  // overflow-safe pos + step > n
      path.overshoot = (step > kIncrementCap - pos) ? kIncrementCap : pos + step;
      break;
    }
    pos += step;
    path.hits.push_back(pos);
  }
  return path;
}

std::vector<std::uint64_t> sample_renewal_epochs(const Law& law, std::uint64_t horizon,
                                                 RandomStream& rng) {
  std::vector<std::uint64_t> epochs{0};
  std::uint64_t pos = 0;
  while (true) {
    std::uint64_t step = sample_increment(law, rng);
    if (step > horizon || pos > horizon - step) break;
    pos += step;
    epochs.push_back(pos);
  }
  return epochs;
}

WeightPair stationary_weight(const Law& law, const Tables& tables, std::uint64_t n) {
  double asym = law.tail_constant * std::pow(static_cast<double>(n), 1.0 - law.beta) /
                (1.0 - law.beta);
  return WeightPair{tables.stationary_mass(n), asym};
}

double renewal_mass_asymptotic(const Law& law, std::uint64_t n) {
  double gg = std::tgamma(law.beta) * std::tgamma(1.0 - law.beta);
  return std::pow(static_cast<double>(n), law.beta - 1.0) / (law.tail_constant * gg);
}

double stationary_identity_residual(const Law& law, const Tables& tables,
                                    std::uint64_t upto) {
  if (upto > tables.u_horizon())
    throw std::out_of_range("stationary_identity_residual: u table too short");
  std::vector<double> tail(upto + 1);
  for (std::uint64_t j = 0; j <= upto; ++j) tail[j] = law.tail(j);
  double worst = 0.0;
  for (std::uint64_t k = 0; k <= upto; ++k) {
    double s = 0.0;
    for (std::uint64_t j = 0; j <= k; ++j) s += tail[j] * tables.u[k - j];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

}  // namespace srm::renewal
