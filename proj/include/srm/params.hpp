#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace srm {

// Tail exponent in (0,1).  Carries an optional exact ratio so that boundary
// cases like beta = (p-1)/p can be detected without floating-point guesswork.
struct BetaValue {
  double value = 0.0;
  std::optional<std::pair<std::int64_t, std::int64_t>> ratio;

  static BetaValue from_double(double b);
  static BetaValue from_ratio(std::int64_t num, std::int64_t den);
  // Accepts "0.4" or "2/5".
  static BetaValue parse(const std::string& text);
};

enum class Regime { SuperCritical, Critical, SubCritical };

const char* regime_name(Regime r);

struct ModelParams {
  double alpha = 1.0;                    // stability index, in (0,2)
  BetaValue beta;                        // increment tail exponent
  int p = 1;                             // number of intersected renewal sets
  std::uint64_t n = 0;                   // time horizon
  std::optional<std::uint32_t> series_len;  // series truncation; defaulted per regime
  std::optional<double> product_cap;        // K, tuple-domain truncation
  std::uint64_t seed = 1;

  void validate() const;
};

inline BetaValue BetaValue::from_double(double b) {
  if (!(b > 0.0) || !(b < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
  return BetaValue{b, std::nullopt};
}

inline BetaValue BetaValue::from_ratio(std::int64_t num, std::int64_t den) {
  if (den <= 0 || num <= 0 || num >= den) throw std::invalid_argument("beta ratio must satisfy 0 < num < den");
  BetaValue b;
  b.value = static_cast<double>(num) / static_cast<double>(den);
  b.ratio = {num, den};
  return b;
}

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::SuperCritical: return "super-critical";
    case Regime::Critical: return "critical";
    case Regime::SubCritical: return "sub-critical";
  }
  return "?";
}

inline BetaValue BetaValue::parse(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("malformed beta: " + text);
    return from_double(v);
  }
  std::size_t used_n = 0, used_d = 0;
  std::int64_t num = std::stoll(text.substr(0, slash), &used_n);
  std::int64_t den = std::stoll(text.substr(slash + 1), &used_d);
  if (used_n != slash || used_d != text.size() - slash - 1)
    throw std::invalid_argument("malformed beta ratio: " + text);
  return from_ratio(num, den);
}

inline void ModelParams::validate() const {
  if (!(alpha > 0.0) || !(alpha < 2.0)) throw std::invalid_argument("alpha must lie in (0,2)");
  if (!(beta.value > 0.0) || !(beta.value < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
}

}  // namespace srm
