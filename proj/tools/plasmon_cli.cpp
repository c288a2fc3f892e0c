// plasmon: run SPP interface scenarios from a config file and emit CSV/JSON.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "plasmon/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"SPP interface scattering: sweeps, 50:50 optimization, radiation patterns, HOM coincidence"};
  std::string config_path, out_path, format;
  int modes = 0;
  bool no_timestamp = false;
  unsigned workers = 0;
  app.add_option("--config", config_path, "run configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "output file (default: stdout or output.path)");
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--modes", modes, "radiation modes per side and polarization (default 200)")->check(CLI::PositiveNumber);
  app.add_flag("--no-timestamp", no_timestamp, "omit the timestamp header line");
  app.add_option("--workers", workers, "worker threads (default: hardware concurrency)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return plasmon::kExitParse;
  }

  plasmon::RunConfig rc;
  try {
    rc = plasmon::build_run_config(plasmon::load_config_file(config_path));
  } catch (const plasmon::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return plasmon::kExitParse;
  }
  if (!out_path.empty()) rc.out_path = out_path;
  if (!format.empty()) rc.format = format == "json" ? plasmon::OutputFormat::json : plasmon::OutputFormat::csv;
  if (modes > 0) rc.n_modes = modes;
  if (no_timestamp) rc.timestamp = false;
  if (workers > 0) rc.workers = workers;

  plasmon::RunOutcome outcome;
  try {
    outcome = plasmon::run(rc);
  } catch (const plasmon::ValidationError& e) {
    std::cerr << "validation: " << e.what() << '\n';
    return plasmon::kExitValidation;
  } catch (const plasmon::TirError& e) {
    std::cerr << "validation: " << e.what() << '\n';
    return plasmon::kExitValidation;
  } catch (const plasmon::InvalidSpecError& e) {
    std::cerr << "validation: " << e.what() << '\n';
    return plasmon::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return plasmon::kExitValidation;
  }
  for (const auto& m : outcome.messages) std::cerr << m << '\n';

  std::ofstream file;
  if (!rc.out_path.empty()) {
    file.open(rc.out_path);
    if (!file) {
      std::cerr << "cannot write '" << rc.out_path << "'\n";
      return plasmon::kExitValidation;
    }
  }
  std::ostream& os = rc.out_path.empty() ? std::cout : file;
  if (rc.format == plasmon::OutputFormat::json)
    plasmon::write_json(os, outcome.table);
  else
    plasmon::write_csv(os, outcome.table, rc.timestamp);

  if (rc.scenario == plasmon::Scenario::check) {
    for (const auto& row : outcome.table.rows)
      std::cerr << (std::get<bool>(row[1]) ? "PASS  " : "FAIL  ") << std::get<std::string>(row[0]) << '\n';
  }
  return outcome.status;
}
