// Experiment driver: every subcommand resolves its configuration, runs the
// library, and emits one artifact (CSV with a commented header block, or a
// {meta, rows} JSON object).  Outputs are a pure function of (config, seed);
// timing goes to stderr so artifacts stay byte-stable across reruns and
// parallelism degrees.

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "srm/empirics.hpp"
#include "srm/intersection.hpp"
#include "srm/limits.hpp"
#include "srm/model.hpp"
#include "srm/parallel.hpp"
#include "srm/params.hpp"
#include "srm/random.hpp"
#include "srm/renewal.hpp"
#include "srm/tuples.hpp"
#include "srm/version.hpp"

namespace {

using json = nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json make_meta(const std::string& subcommand, json config) {
  json meta;
  meta["tool"] = "srm";
  meta["version"] = srm::kVersion;
  meta["rng"] = srm::RandomStream::kAlgorithm;
  meta["subcommand"] = subcommand;
  meta["config"] = std::move(config);
  return meta;
}

// CSV layout: '#' comment lines carrying the meta map (config as one compact
// JSON value so it can be parsed back), then the header row, then data rows.
std::string render_csv(const json& meta, const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const auto& [key, value] : meta.items()) {
    out += "# ";
    out += key;
    out += '=';
    if (value.is_string()) {
      out += value.get<std::string>();
    } else {
      out += value.dump();
    }
    out += '\n';
  }
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out += ',';
    out += header[c];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += row[c];
    }
    out += '\n';
  }
  return out;
}

std::string render_json(json meta, json rows) {
  json doc;
  doc["meta"] = std::move(meta);
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

void write_artifact(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

std::vector<std::uint64_t> parse_u64_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    std::string piece = text.substr(pos, comma - pos);
    std::size_t used = 0;
    unsigned long long v = std::stoull(piece, &used);
    if (used != piece.size() || v == 0)
      throw std::invalid_argument("malformed list entry: " + piece);
    out.push_back(v);
    pos = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    std::string piece = text.substr(pos, comma - pos);
    std::size_t used = 0;
    double v = std::stod(piece, &used);
    if (used != piece.size() || !(v > 0.0))
      throw std::invalid_argument("malformed list entry: " + piece);
    out.push_back(v);
    pos = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

// Flags shared by the model-driven subcommands.  threads and out are execution
// plumbing, not configuration, and stay out of the config echo on purpose:
// identical configs must yield identical bytes at any parallelism degree.
struct CommonFlags {
  std::string beta_text;
  double alpha = 1.0;
  int p = 1;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
  std::string format = "csv";

  int resolved_threads() const {
    return threads > 0 ? threads : srm::parallel::default_threads();
  }
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_format = true) {
  cmd->add_option("--beta", flags.beta_text, "tail exponent, decimal or ratio like 2/5")
      ->required();
  cmd->add_option("--p", flags.p, "intersection order")->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", flags.alpha, "stability index in (0,2)");
  cmd->add_option("--seed", flags.seed, "master seed");
  cmd->add_option("--threads", flags.threads,
                  "worker threads; 0 = SRM_THREADS or hardware");
  cmd->add_option("--out", flags.out, "artifact path (atomic write); default stdout");
  if (with_format) {
    cmd->add_option("--format", flags.format, "artifact format")
        ->check(CLI::IsMember({"csv", "json"}));
  }
}

json base_config(const CommonFlags& flags) {
  json config;
  config["beta"] = flags.beta_text;
  config["alpha"] = flags.alpha;
  config["p"] = flags.p;
  config["seed"] = flags.seed;
  return config;
}

srm::renewal::Tables make_tables(const srm::renewal::Law& law, std::uint64_t u_horizon,
                                 std::uint64_t w_horizon) {
  srm::renewal::TableOptions opts;
  opts.allow_fft = true;
  auto tables = srm::renewal::renewal_mass(law, u_horizon, opts);
  if (w_horizon > u_horizon) srm::renewal::extend_weights(law, tables, w_horizon);
  return tables;
}

std::string regime_string(srm::Regime regime) { return srm::regime_name(regime); }

// ---------------------------------------------------------------------------
// constants

int run_constants(const CommonFlags& flags, std::uint64_t u_horizon) {
  auto beta = srm::BetaValue::parse(flags.beta_text);
  auto regime = srm::isect::regime_of(beta, flags.p);
  auto law = srm::renewal::default_law(beta.value);
  std::uint64_t horizon =
      regime == srm::Regime::SubCritical ? u_horizon : std::uint64_t{4096};
  auto tables = make_tables(law, horizon, horizon);
  auto report = srm::limits::make_regime_report(law, tables, beta, flags.p, flags.alpha);

  json config = base_config(flags);
  config["u_horizon"] = u_horizon;
  json meta = make_meta("constants", std::move(config));
  meta["regime"] = regime_string(report.regime);
  meta["p_prime"] = report.p_prime;
  if (report.first_negative_index) {
    meta["first_negative_index"] = *report.first_negative_index;
  }
  meta["limit_constant"] = report.constant.value;
  if (report.constant.bracket) {
    meta["limit_constant_lo"] = report.constant.bracket->lo;
    meta["limit_constant_hi"] = report.constant.bracket->hi;
  }
  if (report.terminating) {
    meta["terminating_prob"] = report.terminating->estimate;
    meta["terminating_lo"] = report.terminating->lo;
    meta["terminating_hi"] = report.terminating->hi;
  }
  if (report.shape) meta["shape_constant"] = *report.shape;
  if (report.extremal_index) meta["extremal_index"] = *report.extremal_index;

  if (flags.format == "json") {
    json rows = json::array();
    for (std::size_t q = 0; q < report.beta_indices.size(); ++q) {
      json row;
      row["q"] = q + 1;
      row["beta_q"] = report.beta_indices[q];
      rows.push_back(std::move(row));
    }
    write_artifact(flags.out, render_json(std::move(meta), std::move(rows)));
  } else {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t q = 0; q < report.beta_indices.size(); ++q) {
      rows.push_back({std::to_string(q + 1), fmt17(report.beta_indices[q])});
    }
    write_artifact(flags.out, render_csv(meta, {"q", "beta_q"}, rows));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// simulate-path

int run_simulate_path(const CommonFlags& flags, std::uint64_t n,
                      std::uint64_t replicate, std::uint64_t series_len,
                      double product_cap, const std::string& values_out) {
  srm::ModelParams params;
  params.alpha = flags.alpha;
  params.beta = srm::BetaValue::parse(flags.beta_text);
  params.p = flags.p;
  params.n = n;
  params.seed = flags.seed;
  if (series_len > 0) params.series_len = static_cast<std::uint32_t>(series_len);
  if (product_cap > 0.0) params.product_cap = product_cap;
  params.validate();

  auto law = srm::renewal::default_law(params.beta.value);
  auto tables = make_tables(law, 64, n);
  auto root = srm::RandomStream::seed_stream(params.seed, replicate);
  auto env = srm::model::sample_environment(params, law, tables, root);
  auto real = params.product_cap
                  ? srm::model::evaluate_truncated_path(env, *params.product_cap)
                  : srm::model::evaluate_path(env);

  std::uint64_t nonzero = 0, argmax = 1;
  double max_abs = 0.0, max_signed = real.value.empty() ? 0.0 : real.value[0];
  for (std::uint64_t k = 1; k <= n; ++k) {
    double v = real.value[k - 1];
    if (v != 0.0) ++nonzero;
    if (std::abs(v) > max_abs) {
      max_abs = std::abs(v);
      argmax = k;
    }
    if (v > max_signed) max_signed = v;
  }

  json config = base_config(flags);
  config["n"] = n;
  config["replicate"] = replicate;
  if (params.series_len) config["series_len"] = *params.series_len;
  if (params.product_cap) config["product_cap"] = *params.product_cap;
  json meta = make_meta("simulate-path", std::move(config));
  meta["regime"] = regime_string(srm::isect::regime_of(params.beta, params.p));

  json rows;
  rows["series_len"] = env.series_len;
  rows["stationary_mass"] = env.stationary_mass;
  rows["conditioning_mass"] = env.conditioning_mass;
  rows["scale"] = real.scale;
  rows["gamma_first"] = env.gamma.empty() ? 0.0 : env.gamma.front();
  rows["gamma_last"] = env.gamma.empty() ? 0.0 : env.gamma.back();
  rows["tuples_evaluated"] = real.tuples_evaluated;
  rows["nonzero_sites"] = nonzero;
  rows["max_value"] = max_signed;
  rows["max_abs"] = max_abs;
  rows["argmax_abs"] = argmax;
  json hits = json::array();
  for (const auto& path : env.path) hits.push_back(path.hits.size());
  rows["series_hit_counts"] = std::move(hits);

  write_artifact(flags.out, render_json(meta, std::move(rows)));

  if (!values_out.empty()) {
    std::vector<std::vector<std::string>> vrows;
    vrows.reserve(n);
    for (std::uint64_t k = 1; k <= n; ++k) {
      vrows.push_back({std::to_string(k), fmt17(real.value[k - 1])});
    }
    write_artifact(values_out, render_csv(meta, {"k", "value"}, vrows));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// max-law

int run_max_law(const CommonFlags& flags, std::uint64_t n, std::uint64_t replicates,
                std::uint64_t series_len, std::uint64_t u_horizon) {
  srm::ModelParams params;
  params.alpha = flags.alpha;
  params.beta = srm::BetaValue::parse(flags.beta_text);
  params.p = flags.p;
  params.n = n;
  params.seed = flags.seed;
  if (series_len > 0) params.series_len = static_cast<std::uint32_t>(series_len);
  params.validate();
  if (replicates == 0) throw std::invalid_argument("replicates must be positive");

  auto regime = srm::isect::regime_of(params.beta, params.p);
  auto law = srm::renewal::default_law(params.beta.value);
  bool closed_form = regime != srm::Regime::SuperCritical;
  auto tables = make_tables(law, closed_form ? u_horizon : 64, n);
  double c_n = srm::limits::normalization(params);

  auto maxima = srm::parallel::replicate_map<double>(
      replicates, flags.resolved_threads(), [&](std::uint64_t r) {
        auto root = srm::RandomStream::seed_stream(params.seed, r);
        auto env = srm::model::sample_environment(params, law, tables, root);
        auto real = srm::model::evaluate_path(env);
        double m = real.value[0];
        for (double v : real.value) m = std::max(m, v);
        return m;
      });

  json config = base_config(flags);
  config["n"] = n;
  config["replicates"] = replicates;
  if (params.series_len) config["series_len"] = *params.series_len;
  config["u_horizon"] = u_horizon;
  json meta = make_meta("max-law", std::move(config));
  meta["regime"] = regime_string(regime);
  meta["c_n"] = c_n;
  if (closed_form) {
    auto constant = srm::limits::limit_constant(law, tables, params.beta, params.p);
    std::vector<double> normalized(maxima.size());
    for (std::size_t i = 0; i < maxima.size(); ++i) normalized[i] = maxima[i] / c_n;
    double ks = srm::empirics::ks_distance(normalized, [&](double x) {
      return srm::limits::frechet_max_cdf(x, 1.0, constant.value, params.alpha);
    });
    meta["limit_constant"] = constant.value;
    meta["ks"] = ks;
  }

  if (flags.format == "json") {
    json rows = json::array();
    for (std::size_t r = 0; r < maxima.size(); ++r) {
      json row;
      row["replicate"] = r;
      row["max"] = maxima[r];
      row["normalized"] = maxima[r] / c_n;
      rows.push_back(std::move(row));
    }
    write_artifact(flags.out, render_json(std::move(meta), std::move(rows)));
  } else {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t r = 0; r < maxima.size(); ++r) {
      rows.push_back({std::to_string(r), fmt17(maxima[r]), fmt17(maxima[r] / c_n)});
    }
    write_artifact(flags.out, render_csv(meta, {"replicate", "max", "normalized"}, rows));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// scaling-sweep

int run_scaling_sweep(const CommonFlags& flags, const std::string& grid_text,
                      std::uint64_t replicates, std::uint64_t u_horizon,
                      const std::string& ks_out) {
  auto grid = parse_u64_list(grid_text);
  srm::ModelParams base;
  base.alpha = flags.alpha;
  base.beta = srm::BetaValue::parse(flags.beta_text);
  base.p = flags.p;
  base.n = grid.front();
  base.seed = flags.seed;

  auto regime = srm::isect::regime_of(base.beta, base.p);
  auto law = srm::renewal::default_law(base.beta.value);

  srm::empirics::SweepOptions opts;
  opts.threads = flags.resolved_threads();
  bool want_ks = !ks_out.empty();
  if (want_ks) {
    if (regime == srm::Regime::SuperCritical) {
      throw std::invalid_argument(
          "--ks-out needs the closed-form limit law (sub-critical or critical)");
    }
    auto tables = make_tables(law, u_horizon, u_horizon);
    auto constant = srm::limits::limit_constant(law, tables, base.beta, base.p);
    double alpha = base.alpha;
    double c_value = constant.value;
    opts.limit_cdf = [c_value, alpha](double x) {
      return srm::limits::frechet_max_cdf(x, 1.0, c_value, alpha);
    };
  }

  auto sweep = srm::empirics::scaling_sweep(base, law, grid, replicates, opts);

  json config = base_config(flags);
  config["n_grid"] = grid_text;
  config["replicates"] = replicates;
  if (want_ks) config["u_horizon"] = u_horizon;
  json meta = make_meta("scaling-sweep", std::move(config));
  meta["regime"] = regime_string(sweep.regime);
  meta["slope"] = sweep.slope;

  if (flags.format == "json") {
    json rows = json::array();
    for (const auto& row : sweep.rows) {
      json r;
      r["n"] = row.n;
      r["replicates"] = row.replicates;
      r["median_max"] = row.median_max;
      r["c_n"] = row.c_n;
      r["normalized"] = row.normalized;
      if (row.ks) r["ks"] = *row.ks;
      rows.push_back(std::move(r));
    }
    write_artifact(flags.out, render_json(meta, std::move(rows)));
  } else {
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : sweep.rows) {
      rows.push_back({std::to_string(row.n), std::to_string(row.replicates),
                      fmt17(row.median_max), fmt17(row.c_n), fmt17(row.normalized)});
    }
    write_artifact(flags.out,
                   render_csv(meta, {"n", "replicates", "median_max", "c_n", "normalized"},
                              rows));
  }

  if (want_ks) {
    std::vector<std::vector<std::string>> ks_rows;
    for (const auto& row : sweep.rows) {
      if (row.ks) {
        ks_rows.push_back({std::to_string(row.n), fmt17(*row.ks),
                           std::to_string(row.replicates)});
      }
    }
    write_artifact(ks_out, render_csv(meta, {"n", "ks", "n_samples"}, ks_rows));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// extremal-index

int run_extremal_index(const CommonFlags& flags, const std::string& grid_text,
                       std::uint64_t replicates, double level,
                       std::uint64_t block_len, std::uint64_t u_horizon) {
  auto grid = parse_u64_list(grid_text);
  auto beta = srm::BetaValue::parse(flags.beta_text);
  auto regime = srm::isect::regime_of(beta, flags.p);
  auto law = srm::renewal::default_law(beta.value);
  if (replicates == 0) throw std::invalid_argument("replicates must be positive");
  if (!(level > 0.0) || !(level < 1.0))
    throw std::invalid_argument("quantile level must lie in (0,1)");

  bool sub = regime == srm::Regime::SubCritical;
  auto tables = make_tables(law, sub ? u_horizon : 64, grid.back());
  double theory = std::numeric_limits<double>::quiet_NaN();
  if (sub) {
    theory = srm::isect::terminating_prob(law, tables, flags.p).estimate *
             srm::isect::shape_constant(beta, flags.p);
  } else if (regime == srm::Regime::Critical) {
    theory = 0.0;
  }

  struct RepCount {
    std::uint64_t blocks_hit = 0;
    std::uint64_t exceedances = 0;
    double threshold = 0.0;
  };

  std::vector<std::vector<std::string>> rows;
  json jrows = json::array();
  for (std::uint64_t n : grid) {
    srm::ModelParams params;
    params.alpha = flags.alpha;
    params.beta = beta;
    params.p = flags.p;
    params.n = n;
    params.seed = flags.seed;
    params.validate();
    srm::empirics::BlockScheme scheme{
        block_len > 0 ? block_len : srm::empirics::default_block_len(regime, n, flags.p)};

    auto counts = srm::parallel::replicate_map<RepCount>(
        replicates, flags.resolved_threads(), [&](std::uint64_t r) {
          auto root = srm::RandomStream::seed_stream(params.seed, r);
          auto env = srm::model::sample_environment(params, law, tables, root);
          auto real = srm::model::evaluate_path(env);
          std::vector<double> abs_value(real.value.size());
          for (std::size_t i = 0; i < real.value.size(); ++i)
            abs_value[i] = std::abs(real.value[i]);
          RepCount rc;
          rc.threshold = srm::empirics::quantile(abs_value, level);
          auto ec = srm::empirics::exceedance_counts(abs_value, scheme, rc.threshold);
          rc.blocks_hit = ec.blocks_hit;
          rc.exceedances = ec.exceedances;
          return rc;
        });

    std::uint64_t blocks_hit = 0, exceedances = 0;
    double threshold_sum = 0.0;
    for (const auto& rc : counts) {
      blocks_hit += rc.blocks_hit;
      exceedances += rc.exceedances;
      threshold_sum += rc.threshold;
    }
    double u = threshold_sum / static_cast<double>(replicates);
    double theta_hat = exceedances == 0
                           ? std::numeric_limits<double>::quiet_NaN()
                           : static_cast<double>(blocks_hit) /
                                 static_cast<double>(exceedances);

    if (flags.format == "json") {
      json r;
      r["n"] = n;
      r["u"] = u;
      r["exceedances"] = exceedances;
      r["blocks_hit"] = blocks_hit;
      r["theta_hat"] = theta_hat;
      r["theta_theory"] = theory;
      r["block_len"] = scheme.block_len;
      jrows.push_back(std::move(r));
    } else {
      rows.push_back({std::to_string(n), fmt17(u), std::to_string(exceedances),
                      std::to_string(blocks_hit), fmt17(theta_hat), fmt17(theory)});
    }
  }

  json config = base_config(flags);
  config["n_grid"] = grid_text;
  config["replicates"] = replicates;
  config["quantile"] = level;
  if (block_len > 0) config["block_len"] = block_len;
  config["u_horizon"] = u_horizon;
  json meta = make_meta("extremal-index", std::move(config));
  meta["regime"] = regime_string(regime);

  if (flags.format == "json") {
    write_artifact(flags.out, render_json(std::move(meta), std::move(jrows)));
  } else {
    write_artifact(
        flags.out,
        render_csv(meta,
                   {"n", "u", "exceedances", "blocks_hit", "theta_hat", "theta_theory"},
                   rows));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// tail-process

int run_tail_process(const CommonFlags& flags, std::uint64_t n,
                     std::uint64_t replicates, int m, double level, double ratio_cut,
                     std::uint64_t reference_draws, std::uint64_t min_exceedances) {
  srm::ModelParams params;
  params.alpha = flags.alpha;
  params.beta = srm::BetaValue::parse(flags.beta_text);
  params.p = flags.p;
  params.n = n;
  params.seed = flags.seed;
  params.validate();

  auto law = srm::renewal::default_law(params.beta.value);
  auto tables = make_tables(law, 64, n);
  srm::empirics::TailCheckOptions opts;
  opts.quantile = level;
  opts.ratio_cut = ratio_cut;
  opts.reference_draws = reference_draws;
  opts.min_exceedances = min_exceedances;
  opts.threads = flags.resolved_threads();
  auto report =
      srm::empirics::conditional_tail_check(params, law, tables, m, replicates, opts);

  json config = base_config(flags);
  config["n"] = n;
  config["replicates"] = replicates;
  config["m"] = m;
  config["quantile"] = level;
  config["ratio_cut"] = ratio_cut;
  config["reference_draws"] = reference_draws;
  config["min_exceedances"] = min_exceedances;
  json meta = make_meta("tail-process", std::move(config));
  meta["regime"] = regime_string(srm::isect::regime_of(params.beta, params.p));
  meta["tv"] = report.tv;
  meta["exceedances"] = report.exceedances;

  auto pattern_of = [m](std::size_t atom) {
    std::string bits;
    for (int j = 1; j <= m; ++j) bits += ((atom >> j) & 1) ? '1' : '0';
    return bits;
  };

  if (flags.format == "json") {
    json rows = json::array();
    for (std::size_t atom = 0; atom < report.empirical.size(); ++atom) {
      json r;
      r["atom"] = atom;
      r["sign"] = (atom & 1) ? 1 : -1;
      r["support"] = pattern_of(atom);
      r["empirical"] = report.empirical[atom];
      r["reference"] = report.reference[atom];
      rows.push_back(std::move(r));
    }
    write_artifact(flags.out, render_json(std::move(meta), std::move(rows)));
  } else {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t atom = 0; atom < report.empirical.size(); ++atom) {
      rows.push_back({std::to_string(atom), (atom & 1) ? "1" : "-1", pattern_of(atom),
                      fmt17(report.empirical[atom]), fmt17(report.reference[atom])});
    }
    write_artifact(flags.out,
                   render_csv(meta, {"atom", "sign", "support", "empirical", "reference"},
                              rows));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// counts

int run_counts(int p, const std::string& radius_text, const std::string& out,
               const std::string& format) {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  auto radii = parse_double_list(radius_text);

  json config;
  config["p"] = p;
  config["radius_grid"] = radius_text;
  json meta = make_meta("counts", std::move(config));

  std::vector<std::vector<std::string>> rows;
  json jrows = json::array();
  for (double radius : radii) {
    srm::tuples::Domain domain{p, radius, UINT64_MAX};
    std::uint64_t exact = srm::tuples::count_tuples(domain);
    double asym = srm::tuples::count_asymptotic(radius, p);
    double ratio = asym > 0.0 ? static_cast<double>(exact) / asym
                              : std::numeric_limits<double>::quiet_NaN();
    if (format == "json") {
      json r;
      r["radius"] = radius;
      r["count"] = exact;
      r["asymptotic"] = asym;
      r["ratio"] = ratio;
      jrows.push_back(std::move(r));
    } else {
      rows.push_back(
          {fmt17(radius), std::to_string(exact), fmt17(asym), fmt17(ratio)});
    }
  }

  if (format == "json") {
    write_artifact(out, render_json(std::move(meta), std::move(jrows)));
  } else {
    write_artifact(out,
                   render_csv(meta, {"radius", "count", "asymptotic", "ratio"}, rows));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// diagnostics

int run_diagnostics(const CommonFlags& flags, std::uint64_t n, std::uint64_t trials,
                    std::uint64_t start_len, int doublings, double tol,
                    std::uint64_t block_len, std::uint64_t rho_trials,
                    std::uint64_t u_horizon) {
  srm::ModelParams params;
  params.alpha = flags.alpha;
  params.beta = srm::BetaValue::parse(flags.beta_text);
  params.p = flags.p;
  params.n = n;
  params.seed = flags.seed;
  params.validate();

  auto regime = srm::isect::regime_of(params.beta, params.p);
  auto law = srm::renewal::default_law(params.beta.value);
  srm::empirics::BlockScheme scheme{
      block_len > 0 ? block_len : srm::empirics::default_block_len(regime, n, params.p)};
  auto tables = make_tables(law, std::max(u_horizon, scheme.block_len), n);

  srm::model::TruncationOptions topts;
  topts.start_len = start_len;
  topts.doublings = doublings;
  topts.tol = tol;
  auto trunc = srm::model::truncation_diagnostic(params, law, tables, trials, topts);

  bool rho_defined =
      params.p == 1 || srm::isect::beta_index_sign(params.beta, params.p) <= 0;
  std::optional<srm::empirics::RhoEstimate> rho;
  if (rho_defined) {
    rho = srm::empirics::rho_block_mc(params, law, tables, scheme, rho_trials);
  }

  json config = base_config(flags);
  config["n"] = n;
  config["trials"] = trials;
  config["start_len"] = start_len;
  config["doublings"] = doublings;
  config["tol"] = tol;
  config["block_len"] = scheme.block_len;
  config["rho_trials"] = rho_trials;
  config["u_horizon"] = u_horizon;
  json meta = make_meta("diagnostics", std::move(config));
  meta["regime"] = regime_string(regime);
  if (trunc.recommended) meta["recommended_series_len"] = *trunc.recommended;
  if (rho) {
    meta["rho_estimate"] = rho->estimate;
    meta["rho_asymptotic"] = rho->asymptotic;
    meta["rho_std_error"] = rho->std_error;
  } else {
    meta["rho_note"] = "block-hit asymptotics undefined: beta_p > 0";
  }

  if (flags.format == "json") {
    json rows = json::array();
    for (const auto& row : trunc.rows) {
      json r;
      r["series_len"] = row.series_len;
      r["median_gap"] = row.median_gap;
      r["q90_gap"] = row.q90_gap;
      rows.push_back(std::move(r));
    }
    write_artifact(flags.out, render_json(std::move(meta), std::move(rows)));
  } else {
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : trunc.rows) {
      rows.push_back({std::to_string(row.series_len), fmt17(row.median_gap),
                      fmt17(row.q90_gap)});
    }
    write_artifact(flags.out,
                   render_csv(meta, {"series_len", "median_gap", "q90_gap"}, rows));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stable-regenerative process toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", srm::kVersion);

  CommonFlags constants_flags;
  std::uint64_t constants_horizon = 100000;
  auto* cmd_constants =
      app.add_subcommand("constants", "regime classification and limit constants");
  constants_flags.format = "json";
  add_common(cmd_constants, constants_flags);
  cmd_constants->add_option("--u-horizon", constants_horizon,
                            "series horizon for the terminating probability");

  CommonFlags sim_flags;
  std::uint64_t sim_n = 0, sim_replicate = 0, sim_series_len = 0;
  double sim_product_cap = 0.0;
  std::string sim_values_out;
  auto* cmd_sim = app.add_subcommand("simulate-path", "one realized window, summarized");
  add_common(cmd_sim, sim_flags, /*with_format=*/false);
  cmd_sim->add_option("--n", sim_n, "window length")->required();
  cmd_sim->add_option("--replicate", sim_replicate, "replicate index");
  cmd_sim->add_option("--series-len", sim_series_len, "series truncation override");
  cmd_sim->add_option("--product-cap", sim_product_cap,
                      "evaluate only tuples with product below K * r_n");
  cmd_sim->add_option("--values-out", sim_values_out, "also write per-site values CSV");

  CommonFlags max_flags;
  std::uint64_t max_n = 0, max_replicates = 200, max_series_len = 0,
                max_u_horizon = 50000;
  auto* cmd_max = app.add_subcommand("max-law", "window maxima across replicates");
  add_common(cmd_max, max_flags);
  cmd_max->add_option("--n", max_n, "window length")->required();
  cmd_max->add_option("--replicates", max_replicates, "independent windows");
  cmd_max->add_option("--series-len", max_series_len, "series truncation override");
  cmd_max->add_option("--u-horizon", max_u_horizon,
                      "series horizon for the limit constant");

  CommonFlags sweep_flags;
  std::string sweep_grid, sweep_ks_out;
  std::uint64_t sweep_replicates = 200, sweep_u_horizon = 50000;
  auto* cmd_sweep =
      app.add_subcommand("scaling-sweep", "median maxima across a dyadic horizon grid");
  add_common(cmd_sweep, sweep_flags);
  cmd_sweep->add_option("--n-grid", sweep_grid, "comma-separated dyadic horizons")
      ->required();
  cmd_sweep->add_option("--replicates", sweep_replicates, "windows per horizon");
  cmd_sweep->add_option("--ks-out", sweep_ks_out,
                        "also write per-horizon KS distances to this path");
  cmd_sweep->add_option("--u-horizon", sweep_u_horizon,
                        "series horizon for the limit constant");

  CommonFlags ext_flags;
  std::string ext_grid;
  std::uint64_t ext_replicates = 100, ext_block_len = 0, ext_u_horizon = 50000;
  double ext_level = 0.995;
  auto* cmd_ext =
      app.add_subcommand("extremal-index", "pooled block estimator against theory");
  add_common(cmd_ext, ext_flags);
  cmd_ext->add_option("--n-grid", ext_grid, "comma-separated window lengths")
      ->required();
  cmd_ext->add_option("--replicates", ext_replicates, "windows pooled per length");
  cmd_ext->add_option("--quantile", ext_level, "threshold level for |X|");
  cmd_ext->add_option("--block-len", ext_block_len, "block length override");
  cmd_ext->add_option("--u-horizon", ext_u_horizon,
                      "series horizon for the theory column");

  CommonFlags tail_flags;
  std::uint64_t tail_n = 0, tail_replicates = 100, tail_ref_draws = 200000,
                tail_min_exc = 2000;
  int tail_m = 3;
  double tail_level = 0.999, tail_ratio_cut = 0.5;
  auto* cmd_tail =
      app.add_subcommand("tail-process", "conditional sign and support patterns");
  add_common(cmd_tail, tail_flags);
  cmd_tail->add_option("--n", tail_n, "window length")->required();
  cmd_tail->add_option("--replicates", tail_replicates, "windows harvested");
  cmd_tail->add_option("--m", tail_m, "pattern depth");
  cmd_tail->add_option("--quantile", tail_level, "exceedance threshold level");
  cmd_tail->add_option("--ratio-cut", tail_ratio_cut,
                       "support cut relative to the exceedance magnitude");
  cmd_tail->add_option("--reference-draws", tail_ref_draws, "reference sampler draws");
  cmd_tail->add_option("--min-exceedances", tail_min_exc,
                       "required pooled exceedances");

  int counts_p = 2;
  std::string counts_grid = "1000,10000,100000,1000000";
  std::string counts_out, counts_format = "csv";
  auto* cmd_counts =
      app.add_subcommand("counts", "product-bounded tuple family sizes");
  cmd_counts->add_option("--p", counts_p, "tuple length")->check(CLI::PositiveNumber);
  cmd_counts->add_option("--radius-grid", counts_grid, "comma-separated product bounds");
  cmd_counts->add_option("--out", counts_out, "artifact path; default stdout");
  cmd_counts->add_option("--format", counts_format, "artifact format")
      ->check(CLI::IsMember({"csv", "json"}));

  CommonFlags diag_flags;
  std::uint64_t diag_n = 0, diag_trials = 20, diag_start_len = 0, diag_block_len = 0,
                diag_rho_trials = 2000, diag_u_horizon = 4096;
  int diag_doublings = 4;
  double diag_tol = 0.01;
  auto* cmd_diag = app.add_subcommand(
      "diagnostics", "series-cutoff doubling study and block-hit probe");
  add_common(cmd_diag, diag_flags);
  cmd_diag->add_option("--n", diag_n, "window length")->required();
  cmd_diag->add_option("--trials", diag_trials, "replicates per cutoff rung");
  cmd_diag->add_option("--start-len", diag_start_len, "first cutoff (0 = default/4)");
  cmd_diag->add_option("--doublings", diag_doublings, "rungs in the cutoff ladder");
  cmd_diag->add_option("--tol", diag_tol, "acceptable normalized gap");
  cmd_diag->add_option("--block-len", diag_block_len, "block length override");
  cmd_diag->add_option("--rho-trials", diag_rho_trials, "block-hit Monte Carlo trials");
  cmd_diag->add_option("--u-horizon", diag_u_horizon, "renewal mass table horizon");

  CLI11_PARSE(app, argc, argv);

  auto started = std::chrono::steady_clock::now();
  int status = 0;
  try {
    if (cmd_constants->parsed()) {
      status = run_constants(constants_flags, constants_horizon);
    } else if (cmd_sim->parsed()) {
      status = run_simulate_path(sim_flags, sim_n, sim_replicate, sim_series_len,
                                 sim_product_cap, sim_values_out);
    } else if (cmd_max->parsed()) {
      status = run_max_law(max_flags, max_n, max_replicates, max_series_len,
                           max_u_horizon);
    } else if (cmd_sweep->parsed()) {
      status = run_scaling_sweep(sweep_flags, sweep_grid, sweep_replicates,
                                 sweep_u_horizon, sweep_ks_out);
    } else if (cmd_ext->parsed()) {
      status = run_extremal_index(ext_flags, ext_grid, ext_replicates, ext_level,
                                  ext_block_len, ext_u_horizon);
    } else if (cmd_tail->parsed()) {
      status = run_tail_process(tail_flags, tail_n, tail_replicates, tail_m, tail_level,
                                tail_ratio_cut, tail_ref_draws, tail_min_exc);
    } else if (cmd_counts->parsed()) {
      status = run_counts(counts_p, counts_grid, counts_out, counts_format);
    } else if (cmd_diag->parsed()) {
      status = run_diagnostics(diag_flags, diag_n, diag_trials, diag_start_len,
                               diag_doublings, diag_tol, diag_block_len,
                               diag_rho_trials, diag_u_horizon);
    }
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  }
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::fprintf(stderr, "# wall_time_s=%.3f\n", seconds);
  return status;
}
