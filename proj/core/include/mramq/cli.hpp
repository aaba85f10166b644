#ifndef MRAMQ_CLI_HPP
#define MRAMQ_CLI_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mramq/bounds.hpp"
#include "mramq/channel.hpp"
#include "mramq/design.hpp"

namespace mramq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitIo = 4;

// Flat key = value configuration text: one key per line, '#' starts a
// comment, blank lines ignored. Keys outside the documented schema,
// duplicate keys, and lines without '=' all raise config_error with the
// offending key (or line number) as the name.
class ConfigMap {
 public:
  static ConfigMap from_file(const std::string& path);
  static ConfigMap from_string(const std::string& text);

  bool has(const std::string& key) const;

  double require_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  // Lists are comma separated inside one value.
  std::vector<double> get_double_list(const std::string& key,
                                      std::vector<double> fallback) const;
  std::vector<std::string> get_string_list(
      const std::string& key, std::vector<std::string> fallback) const;

 private:
  std::map<std::string, std::string> values_;
};

// One sigma-ratio sweep: the grid scales both sigmas (sigma_i = ratio *
// mu_i), the remaining channel fields stay fixed.
struct SweepConfig {
  std::vector<double> sigma_ratio_grid;
  ChannelParams base;  // sigmas overwritten per grid point
  std::vector<Criterion> criteria;
  FiniteBlocklengthQuery query;

  // Grid strictly increasing, every ratio in (0, 0.5). Throws config_error.
  void validate() const;

  static SweepConfig from_config(const ConfigMap& cfg);
};

// Values taken from the command line; the optionals override their config
// keys when set.
struct CommandOptions {
  std::string config_path;
  std::string out_path;  // empty: write the report to the stream instead
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  std::optional<std::uint64_t> levels;
};

// Each command parses its config, runs, and writes one report: to out_path
// through a temp file when given (nothing is left behind on failure), to the
// `out` stream otherwise. Diagnostics go to `diag`. The return value is the
// process exit code: kExitUsage for config problems, kExitNumeric when the
// math gives up, kExitIo for file-system failures.

// CSV sigma_ratio,criterion,a1_kohm,capacity,cutoff_rate,dispersion,ppv_blep
// with one row per (grid point, criterion), rows in grid order. Grid points
// run in parallel.
int cmd_bounds(const CommandOptions& opts, std::ostream& out,
               std::ostream& diag);

// One line per criterion with the designed boundaries and diagnostics.
int cmd_design(const CommandOptions& opts, std::ostream& out,
               std::ostream& diag);

// CSV a1_kohm,dcapacity_da1,dcutoff_da1,dppv_surrogate_da1 over the
// [a1_lo, a1_hi] grid; the first two are closed form, the third a central
// difference of the normalized rate margin (Cq - R)/sqrt(Vq).
int cmd_derivatives(const CommandOptions& opts, std::ostream& out,
                    std::ostream& diag);

// Monte Carlo run against the analytic matrix: one PASS/FAIL line per
// matrix entry, a chi-square line, the raw MAP bit error rate, and an
// overall verdict. A statistical FAIL still exits 0; the verdict lives in
// the report.
int cmd_validate(const CommandOptions& opts, std::ostream& out,
                 std::ostream& diag);

// Writes the raw draws as CSV to out_path (required) and prints a one-line
// summary.
int cmd_export_samples(const CommandOptions& opts, std::ostream& out,
                       std::ostream& diag);

}  // namespace mramq::cli

#endif  // MRAMQ_CLI_HPP
