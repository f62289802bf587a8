#include "illposed/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void add_spec_flags(CLI::App* cmd, illposed::RunSpec& spec, std::string& methods_csv) {
  cmd->add_option("--problem", spec.problem, "shaw | wing | heat | phillips | deriv2");
  cmd->add_option("--n", spec.n, "problem size");
  cmd->add_option("--eps", spec.eps, "relative noise level in (0,1)");
  cmd->add_option("--seed", spec.seed, "noise RNG seed");
  cmd->add_option("--kmax", spec.kmax, "maximum iteration count");
  cmd->add_option("--methods", methods_csv, "comma list from tsvd,lsqr,hybrid");
  cmd->add_option("--out", spec.out, "output directory");
  cmd->add_flag("--force", spec.force, "overwrite existing outputs");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Krylov/TSVD regularization workbench for discrete ill-posed problems"};
  app.require_subcommand(1);

  illposed::RunSpec spec;
  std::string methods_csv;
  std::string specs_file;
  std::string report_dir = ".";
  int workers = 0;

  CLI::App* generate = app.add_subcommand("generate", "generate a noisy problem instance");
  add_spec_flags(generate, spec, methods_csv);
  CLI::App* solve = app.add_subcommand("solve", "run the requested solver paths");
  add_spec_flags(solve, spec, methods_csv);
  CLI::App* diagnose = app.add_subcommand("diagnose", "emit the rank/angle diagnostics table");
  add_spec_flags(diagnose, spec, methods_csv);

  CLI::App* sweep = app.add_subcommand("sweep", "run a batch of spec files and merge a summary");
  sweep->add_option("--specs", specs_file, "file listing RunSpec paths, one per line")->required();
  sweep->add_option("--out", spec.out, "directory for summary.csv");
  sweep->add_option("--workers", workers, "worker pool size (0 = hardware)");

  CLI::App* report = app.add_subcommand("report", "print manifest and summary of a run directory");
  report->add_option("--out", report_dir, "run or sweep directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return illposed::kExitUsage;
  }

  try {
    if (!methods_csv.empty()) spec.methods = illposed::split_methods(methods_csv);
    if (generate->parsed()) return illposed::run_generate(spec);
    if (solve->parsed()) return illposed::run_solve(spec);
    if (diagnose->parsed()) return illposed::run_diagnose(spec);
    if (sweep->parsed()) return illposed::run_sweep(specs_file, spec.out, workers);
    if (report->parsed()) return illposed::run_report(report_dir);
  } catch (const illposed::UsageError& ex) {
    std::cerr << "usage error: " << ex.what() << '\n';
    return illposed::kExitUsage;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return illposed::kExitNumerical;
  }
  return illposed::kExitUsage;
}
