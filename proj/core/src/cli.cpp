#include "mramq/cli.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <future>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "mramq/errors.hpp"
#include "mramq/simulate.hpp"

namespace mramq::cli {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "p0",
      "p1",
      "pr",
      "mu0",
      "mu1",
      "sigma_ratio",
      "sigma0",
      "sigma1",
      "sigma_ratio_grid",
      "criteria",
      "ppv_n",
      "ppv_r",
      "ppv_eps",
      "levels",
      "seed",
      "samples",
      "shards",
      "boundaries",
      "a1_lo",
      "a1_hi",
      "a1_points",
      "fd_step",
      "lloyd_weights",
      "tol_a",
      "max_iter",
      "grid_points",
  };
  return keys;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& key,
                                    const std::string& raw) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = raw.find(',', pos);
    std::string part = trim(comma == std::string::npos
                                ? raw.substr(pos)
                                : raw.substr(pos, comma - pos));
    if (part.empty()) throw config_error(key, "empty list element");
    parts.push_back(part);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return parts;
}

double parse_double(const std::string& key, const std::string& raw) {
  const char* s = raw.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(s, &end);
  if (end == s || *end != '\0' || !std::isfinite(v)) {
    throw config_error(key, "not a finite number: '" + raw + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& raw) {
  if (raw.empty() || raw[0] == '-') {
    throw config_error(key, "not a non-negative integer: '" + raw + "'");
  }
  const char* s = raw.c_str();
  char* end = nullptr;
  errno = 0;
  unsigned long long v = std::strtoull(s, &end, 10);
  if (end == s || *end != '\0' || errno == ERANGE) {
    throw config_error(key, "not a non-negative integer: '" + raw + "'");
  }
  return v;
}

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_exp(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& text) {
  std::string tmp = path + ".tmp";
  std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
  if (!file) throw io_error("cannot open " + tmp + " for writing");
  file << text;
  file.flush();
  bool ok = static_cast<bool>(file);
  file.close();
  if (!ok) {
    std::remove(tmp.c_str());
    throw io_error("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw io_error("cannot rename " + tmp + " to " + path);
  }
}

// Reports either land in a file (atomically) or on the stream; never both.
void emit(const CommandOptions& opts, std::ostream& out,
          const std::string& text) {
  if (opts.out_path.empty()) {
    out << text;
    out.flush();
  } else {
    write_text_atomic(opts.out_path, text);
  }
}

int run_guarded(std::ostream& diag, const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const config_error& e) {
    diag << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const io_error& e) {
    diag << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    diag << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

Criterion parse_criterion(const std::string& name) {
  if (name == "capacity") return Criterion::capacity;
  if (name == "cutoff_rate") return Criterion::cutoff_rate;
  if (name == "ppv_blep") return Criterion::ppv_blep;
  if (name == "lloyd_max") return Criterion::lloyd_max;
  throw config_error("criteria", "unknown criterion: '" + name + "'");
}

std::vector<Criterion> criteria_from_config(const ConfigMap& cfg) {
  std::vector<std::string> names = cfg.get_string_list(
      "criteria", {"capacity", "cutoff_rate", "ppv_blep", "lloyd_max"});
  std::vector<Criterion> criteria;
  for (const std::string& name : names) criteria.push_back(parse_criterion(name));
  if (criteria.empty()) throw config_error("criteria", "empty criteria list");
  return criteria;
}

ChannelParams channel_from_config(const ConfigMap& cfg) {
  ChannelParams params;
  params.write_error_0 = cfg.require_double("p0");
  params.write_error_1 = cfg.get_double("p1", 2e-4);
  params.read_disturb = cfg.require_double("pr");
  params.mu0 = cfg.get_double("mu0", 1.0);
  params.mu1 = cfg.get_double("mu1", 2.0);
  double ratio = cfg.get_double("sigma_ratio", 0.12);
  params.sigma0 = cfg.get_double("sigma0", ratio * params.mu0);
  params.sigma1 = cfg.get_double("sigma1", ratio * params.mu1);
  try {
    params.validate();
  } catch (const std::domain_error& e) {
    throw config_error("channel", e.what());
  }
  return params;
}

FiniteBlocklengthQuery query_from_config(const ConfigMap& cfg) {
  FiniteBlocklengthQuery query;
  query.blocklength = cfg.get_u64("ppv_n", 128);
  query.rate = cfg.get_double("ppv_r", 110.0 / 128.0);
  query.epsilon = cfg.get_double("ppv_eps", 1e-4);
  try {
    query.validate();
  } catch (const std::domain_error& e) {
    throw config_error("ppv_n/ppv_r/ppv_eps", e.what());
  }
  return query;
}

OptimizerConfig optimizer_from_config(const ConfigMap& cfg,
                                      const ChannelParams& params) {
  OptimizerConfig ocfg = OptimizerConfig::defaults(params);
  ocfg.bracket_lo = cfg.get_double("a1_lo", ocfg.bracket_lo);
  ocfg.bracket_hi = cfg.get_double("a1_hi", ocfg.bracket_hi);
  ocfg.tol_a = cfg.get_double("tol_a", ocfg.tol_a);
  ocfg.fd_step = cfg.get_double("fd_step", ocfg.fd_step);
  ocfg.max_iter = static_cast<int>(cfg.get_u64("max_iter", ocfg.max_iter));
  ocfg.grid_points =
      static_cast<int>(cfg.get_u64("grid_points", ocfg.grid_points));
  try {
    ocfg.validate();
  } catch (const std::domain_error& e) {
    throw config_error("optimizer", e.what());
  }
  return ocfg;
}

std::uint64_t levels_from(const ConfigMap& cfg, const CommandOptions& opts) {
  std::uint64_t levels = opts.levels ? *opts.levels : cfg.get_u64("levels", 2);
  bool pow2 = levels >= 2 && (levels & (levels - 1)) == 0;
  if (!pow2 || levels > 4096) {
    throw config_error("levels", "must be a power of two in [2, 4096]");
  }
  return levels;
}

LloydWeighting weighting_from(const ConfigMap& cfg) {
  std::string name = cfg.get_string("lloyd_weights", "post_bac");
  if (name == "post_bac") return LloydWeighting::post_bac;
  if (name == "equiprobable") return LloydWeighting::equiprobable;
  throw config_error("lloyd_weights",
                     "expected post_bac or equiprobable, got '" + name + "'");
}

McConfig mc_from(const ConfigMap& cfg, const CommandOptions& opts) {
  McConfig mc;
  mc.seed = opts.seed ? *opts.seed : cfg.get_u64("seed", 1);
  mc.num_samples =
      opts.samples ? *opts.samples : cfg.get_u64("samples", 1000000);
  mc.shards = static_cast<unsigned>(cfg.get_u64("shards", 1));
  try {
    mc.validate();
  } catch (const std::domain_error& e) {
    throw config_error("samples/shards", e.what());
  }
  return mc;
}

Quantizer quantizer_from(const ConfigMap& cfg, const ChannelParams& params,
                         std::uint64_t levels) {
  std::vector<double> fallback;
  for (std::uint64_t j = 1; j < levels; ++j) {
    fallback.push_back(params.mu0 + (params.mu1 - params.mu0) *
                                        static_cast<double>(j) /
                                        static_cast<double>(levels));
  }
  std::vector<double> boundaries =
      cfg.get_double_list("boundaries", std::move(fallback));
  if (boundaries.size() + 1 != levels) {
    throw config_error("boundaries",
                       "expected " + std::to_string(levels - 1) +
                           " values for " + std::to_string(levels) +
                           " levels");
  }
  try {
    return Quantizer(std::move(boundaries));
  } catch (const std::invalid_argument& e) {
    throw config_error("boundaries", e.what());
  }
}

DesignResult run_designer(const ChannelParams& params, Criterion criterion,
                          std::uint64_t levels, const OptimizerConfig& ocfg,
                          const FiniteBlocklengthQuery& query,
                          LloydWeighting weighting) {
  if (levels == 2) {
    switch (criterion) {
      case Criterion::capacity:
        return design_capacity_max(params, ocfg);
      case Criterion::cutoff_rate:
        return design_cutoff_max(params, ocfg);
      case Criterion::ppv_blep:
        return design_ppv_min(params, query.blocklength, query.rate, ocfg);
      case Criterion::lloyd_max:
        return design_lloyd_max(params, ocfg, weighting);
    }
  }
  return design_multibit(params, levels, criterion, ocfg, query);
}

std::string join_boundaries(const Quantizer& quantizer,
                            const std::function<std::string(double)>& fmt) {
  std::string joined;
  for (double b : quantizer.boundaries()) {
    if (!joined.empty()) joined += ';';
    joined += fmt(b);
  }
  return joined;
}

}  // namespace

ConfigMap ConfigMap::from_string(const std::string& text) {
  ConfigMap cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error("line " + std::to_string(lineno),
                         "expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw config_error("line " + std::to_string(lineno), "missing key");
    }
    if (known_keys().count(key) == 0) throw config_error(key, "unknown key");
    if (!cfg.values_.emplace(key, value).second) {
      throw config_error(key, "duplicate key");
    }
  }
  return cfg;
}

ConfigMap ConfigMap::from_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw io_error("cannot open " + path);
  std::ostringstream buf;
  buf << file.rdbuf();
  return from_string(buf.str());
}

bool ConfigMap::has(const std::string& key) const {
  return values_.count(key) != 0;
}

double ConfigMap::require_double(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw config_error(key, "required key is missing");
  return parse_double(key, it->second);
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_double(key, it->second);
}

std::uint64_t ConfigMap::get_u64(const std::string& key,
                                 std::uint64_t fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_u64(key, it->second);
}

std::string ConfigMap::get_string(const std::string& key,
                                  const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::vector<double> ConfigMap::get_double_list(
    const std::string& key, std::vector<double> fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> values;
  for (const std::string& part : split_list(key, it->second)) {
    values.push_back(parse_double(key, part));
  }
  return values;
}

std::vector<std::string> ConfigMap::get_string_list(
    const std::string& key, std::vector<std::string> fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return split_list(key, it->second);
}

void SweepConfig::validate() const {
  if (sigma_ratio_grid.empty()) {
    throw config_error("sigma_ratio_grid", "empty grid");
  }
  double prev = 0.0;
  for (double r : sigma_ratio_grid) {
    if (!(r > 0.0 && r < 0.5)) {
      throw config_error("sigma_ratio_grid",
                         "ratio " + fmt12(r) + " outside (0, 0.5)");
    }
    if (r <= prev) {
      throw config_error("sigma_ratio_grid", "grid not strictly increasing");
    }
    prev = r;
  }
  if (criteria.empty()) throw config_error("criteria", "empty criteria list");
}

SweepConfig SweepConfig::from_config(const ConfigMap& cfg) {
  for (const char* key : {"sigma_ratio", "sigma0", "sigma1"}) {
    if (cfg.has(key)) {
      throw config_error(key, "conflicts with a sigma_ratio_grid sweep");
    }
  }
  SweepConfig sweep;
  sweep.sigma_ratio_grid = cfg.get_double_list(
      "sigma_ratio_grid", {0.08, 0.09, 0.10, 0.11, 0.12, 0.13, 0.14});
  sweep.base = ChannelParams{};
  sweep.base.write_error_0 = cfg.require_double("p0");
  sweep.base.write_error_1 = cfg.get_double("p1", 2e-4);
  sweep.base.read_disturb = cfg.require_double("pr");
  sweep.base.mu0 = cfg.get_double("mu0", 1.0);
  sweep.base.mu1 = cfg.get_double("mu1", 2.0);
  sweep.criteria = criteria_from_config(cfg);
  sweep.query = query_from_config(cfg);
  sweep.validate();
  // Sigma-independent parts of the channel must already be sound.
  ChannelParams probe = sweep.base;
  probe.sigma0 = sweep.sigma_ratio_grid.front() * probe.mu0;
  probe.sigma1 = sweep.sigma_ratio_grid.front() * probe.mu1;
  try {
    probe.validate();
  } catch (const std::domain_error& e) {
    throw config_error("channel", e.what());
  }
  return sweep;
}

int cmd_bounds(const CommandOptions& opts, std::ostream& out,
               std::ostream& diag) {
  return run_guarded(diag, [&] {
    ConfigMap cfg = ConfigMap::from_file(opts.config_path);
    SweepConfig sweep = SweepConfig::from_config(cfg);
    std::uint64_t levels = levels_from(cfg, opts);
    LloydWeighting weighting = weighting_from(cfg);
    if (levels > 2 && weighting != LloydWeighting::post_bac) {
      throw config_error("lloyd_weights",
                         "only post_bac is supported above 2 levels");
    }

    std::vector<std::future<std::string>> futures;
    futures.reserve(sweep.sigma_ratio_grid.size());
    for (double ratio : sweep.sigma_ratio_grid) {
      futures.push_back(std::async(std::launch::async, [&, ratio] {
        ChannelParams params = sweep.base;
        params.sigma0 = ratio * params.mu0;
        params.sigma1 = ratio * params.mu1;
        params.validate();
        OptimizerConfig ocfg = optimizer_from_config(cfg, params);
        std::string rows;
        for (Criterion criterion : sweep.criteria) {
          DesignResult result = run_designer(params, criterion, levels, ocfg,
                                             sweep.query, weighting);
          TransitionMatrix matrix = transition_matrix(params, result.quantizer);
          BoundsReport report = bounds_report(matrix, sweep.query);
          rows += fmt12(ratio);
          rows += ',';
          rows += criterion_name(criterion);
          rows += ',';
          rows += join_boundaries(result.quantizer, fmt12);
          rows += ',';
          rows += fmt12(report.capacity);
          rows += ',';
          rows += fmt12(report.cutoff_rate);
          rows += ',';
          rows += fmt12(report.dispersion);
          rows += ',';
          rows += fmt12(report.ppv_blep);
          rows += '\n';
        }
        return rows;
      }));
    }

    std::string text =
        "sigma_ratio,criterion,a1_kohm,capacity,cutoff_rate,dispersion,"
        "ppv_blep\n";
    for (auto& f : futures) text += f.get();
    emit(opts, out, text);
  });
}

int cmd_design(const CommandOptions& opts, std::ostream& out,
               std::ostream& diag) {
  return run_guarded(diag, [&] {
    ConfigMap cfg = ConfigMap::from_file(opts.config_path);
    ChannelParams params = channel_from_config(cfg);
    std::vector<Criterion> criteria = criteria_from_config(cfg);
    FiniteBlocklengthQuery query = query_from_config(cfg);
    std::uint64_t levels = levels_from(cfg, opts);
    LloydWeighting weighting = weighting_from(cfg);
    if (levels > 2 && weighting != LloydWeighting::post_bac) {
      throw config_error("lloyd_weights",
                         "only post_bac is supported above 2 levels");
    }
    OptimizerConfig ocfg = optimizer_from_config(cfg, params);

    std::string text;
    for (Criterion criterion : criteria) {
      DesignResult result =
          run_designer(params, criterion, levels, ocfg, query, weighting);
      const DesignDiagnostics& d = result.diagnostics;
      text += "criterion=";
      text += criterion_name(criterion);
      if (levels == 2) {
        text += " a1_kohm=" + fmt17(result.quantizer.boundaries().front());
      } else {
        text += " boundaries=" + join_boundaries(result.quantizer, fmt17);
      }
      text += " objective=" + fmt17(result.objective_value);
      text += " iterations=" + std::to_string(result.iterations);
      text += " residual=" + fmt_exp(d.residual);
      text += " bracket=[" + fmt12(d.bracket_lo) + "," + fmt12(d.bracket_hi) +
              "]";
      text += " grid_fallback=";
      text += d.grid_fallback ? '1' : '0';
      text += " rate_infeasible=";
      text += d.rate_infeasible ? '1' : '0';
      if (levels > 2) {
        text += " sweeps=" + std::to_string(d.sweep_objectives.size());
      }
      text += '\n';
    }
    emit(opts, out, text);
  });
}

int cmd_derivatives(const CommandOptions& opts, std::ostream& out,
                    std::ostream& diag) {
  return run_guarded(diag, [&] {
    ConfigMap cfg = ConfigMap::from_file(opts.config_path);
    ChannelParams params = channel_from_config(cfg);
    FiniteBlocklengthQuery query = query_from_config(cfg);
    double lo = cfg.get_double("a1_lo", params.mu0);
    double hi = cfg.get_double("a1_hi", params.mu1);
    std::uint64_t points = cfg.get_u64("a1_points", 201);
    if (!(lo < hi)) throw config_error("a1_lo", "a1_lo must be < a1_hi");
    if (points < 2) throw config_error("a1_points", "need at least 2 points");
    double h = cfg.get_double("fd_step",
                              OptimizerConfig::defaults(params).fd_step);
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw config_error("fd_step", "must be positive and finite");
    }

    auto surrogate = [&](double a1) {
      TransitionMatrix m = transition_matrix(params, Quantizer::one_bit(a1));
      return (capacity(m) - query.rate) /
             std::sqrt(std::max(dispersion(m), 1e-300));
    };

    std::string text = "a1_kohm,dcapacity_da1,dcutoff_da1,dppv_surrogate_da1\n";
    for (std::uint64_t i = 0; i < points; ++i) {
      double a1 = lo + (hi - lo) * static_cast<double>(i) /
                           static_cast<double>(points - 1);
      double dcap = capacity_derivative(params, a1);
      double dcut = cutoff_rate_derivative(params, a1);
      double dppv = (surrogate(a1 + h) - surrogate(a1 - h)) / (2.0 * h);
      text += fmt12(a1) + "," + fmt12(dcap) + "," + fmt12(dcut) + "," +
              fmt12(dppv) + "\n";
    }
    emit(opts, out, text);
  });
}

int cmd_validate(const CommandOptions& opts, std::ostream& out,
                 std::ostream& diag) {
  return run_guarded(diag, [&] {
    ConfigMap cfg = ConfigMap::from_file(opts.config_path);
    ChannelParams params = channel_from_config(cfg);
    std::uint64_t levels = levels_from(cfg, opts);
    Quantizer quantizer = quantizer_from(cfg, params, levels);
    McConfig mc = mc_from(cfg, opts);

    TransitionMatrix analytic = transition_matrix(params, quantizer);
    McReport report = estimate_matrix(params, quantizer, mc);
    ComparisonReport comparison = compare_with_analytic(analytic, report);

    std::string text;
    for (int x = 0; x < 2; ++x) {
      for (std::size_t j = 0; j < comparison.entries[x].size(); ++j) {
        const EntryCheck& entry = comparison.entries[x][j];
        text += "entry x=" + std::to_string(x) + " j=" + std::to_string(j) +
                ": analytic=" + fmt12(entry.analytic) +
                " empirical=" + fmt12(entry.empirical) +
                " z=" + fmt12(entry.z_score) +
                (entry.pass ? " PASS" : " FAIL") + "\n";
      }
    }
    text += "chi_square = " + fmt12(comparison.chi_square) +
            " dof=" + std::to_string(comparison.chi_square_dof) +
            " critical=" + fmt12(comparison.chi_square_critical) +
            (comparison.chi_square_pass ? " PASS" : " FAIL") + "\n";
    text += "raw_ber = " + fmt12(report.raw_ber) +
            " half_width=" + fmt12(report.raw_ber_half_width) + "\n";
    text += "overall = ";
    text += comparison.all_pass ? "PASS" : "FAIL";
    text += '\n';
    emit(opts, out, text);
  });
}

int cmd_export_samples(const CommandOptions& opts, std::ostream& out,
                       std::ostream& diag) {
  return run_guarded(diag, [&] {
    if (opts.out_path.empty()) {
      throw config_error("--out", "required for export-samples");
    }
    ConfigMap cfg = ConfigMap::from_file(opts.config_path);
    ChannelParams params = channel_from_config(cfg);
    std::uint64_t levels = levels_from(cfg, opts);
    Quantizer quantizer = quantizer_from(cfg, params, levels);
    McConfig mc = mc_from(cfg, opts);

    export_samples(params, quantizer, mc, opts.out_path);
    out << "wrote " << mc.num_samples << " samples to " << opts.out_path
        << '\n';
    out.flush();
  });
}

}  // namespace mramq::cli
