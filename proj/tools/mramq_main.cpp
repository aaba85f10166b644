#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mramq/cli.hpp"

namespace {

void add_common_options(CLI::App* sub, mramq::cli::CommandOptions* opts,
                        bool out_required) {
  sub->add_option("--config", opts->config_path,
                  "flat key = value configuration file")
      ->required();
  CLI::Option* out = sub->add_option(
      "--out", opts->out_path,
      "write the report to this file (atomically) instead of stdout");
  if (out_required) out->required();
  sub->add_option("--seed", opts->seed, "override the seed key");
  sub->add_option("--samples", opts->samples, "override the samples key");
  sub->add_option("--levels", opts->levels,
                  "override the levels key (power of two)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Bounds, quantizer design, and Monte Carlo validation for the "
      "quantized MRAM read channel"};
  app.require_subcommand(1);

  mramq::cli::CommandOptions opts;
  CLI::App* bounds = app.add_subcommand(
      "bounds", "sweep sigma_ratio_grid and emit a bounds CSV");
  CLI::App* design = app.add_subcommand(
      "design", "design quantizers for one parameter set");
  CLI::App* derivatives = app.add_subcommand(
      "derivatives", "emit the objective derivative curves as CSV");
  CLI::App* validate = app.add_subcommand(
      "validate", "compare Monte Carlo frequencies against the analytic "
                  "matrix");
  CLI::App* export_samples = app.add_subcommand(
      "export-samples", "write raw channel draws as CSV");
  add_common_options(bounds, &opts, false);
  add_common_options(design, &opts, false);
  add_common_options(derivatives, &opts, false);
  add_common_options(validate, &opts, false);
  add_common_options(export_samples, &opts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? mramq::cli::kExitOk : mramq::cli::kExitUsage;
  }

  if (bounds->parsed()) {
    return mramq::cli::cmd_bounds(opts, std::cout, std::cerr);
  }
  if (design->parsed()) {
    return mramq::cli::cmd_design(opts, std::cout, std::cerr);
  }
  if (derivatives->parsed()) {
    return mramq::cli::cmd_derivatives(opts, std::cout, std::cerr);
  }
  if (validate->parsed()) {
    return mramq::cli::cmd_validate(opts, std::cout, std::cerr);
  }
  if (export_samples->parsed()) {
    return mramq::cli::cmd_export_samples(opts, std::cout, std::cerr);
  }
  std::cerr << "no subcommand selected\n";
  return mramq::cli::kExitUsage;
}
