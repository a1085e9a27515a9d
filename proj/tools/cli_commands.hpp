#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tocs/coherent.hpp"
#include "tocs/csv.hpp"
#include "tocs/susy.hpp"

namespace tocs::cli {

enum ExitCode { kOk = 0, kValidateFailed = 1, kConfigError = 2, kNumericalFailure = 3 };

enum class Command { Density, Uncertainty, Entropy, Validate, ExportModel };
enum class Model { Trunc, SusyQ4 };

struct RunConfig {
  Command command = Command::Validate;
  Family family = Family::LMinus;
  Model model = Model::Trunc;
  double z_min = 0.1, z_max = 2.0;
  int z_steps = 3;
  std::vector<double> z_values;  // overrides the z_min..z_max grid when set
  int basis_size = 64;  // smallest coherent-state truncation; raised when the tail needs it
  double theta = 1.5707963267948966, phi = 0.0;
  double x_max = 12.0;
  int x_steps = 2400;
  std::string output_path;  // empty = standard output
  std::string discrepancy_path;  // validate only: closed-form vs quadrature report
  std::string seed_config;
  std::optional<std::vector<SeedSolution>> seeds;  // parsed from seed_config

  // throws ConfigError
  void validate() const;
  std::vector<double> z_grid() const;
  std::vector<double> x_grid() const;
  // everything that shapes the output, output path excluded
  std::string canonical() const;
};

Command parse_command(const std::string& s);
Family parse_family(const std::string& s);
Model parse_model(const std::string& s);
const char* command_name(Command c);
const char* model_name(Model m);

// "epsilon nu" per line, '#' comments, nu may be inf / -inf
std::vector<SeedSolution> parse_seed_config(const std::string& text);
std::vector<SeedSolution> read_seed_config(const std::string& path);

// builds a config from command-line arguments (argv[0] excluded); throws ConfigError
RunConfig parse_args(const std::vector<std::string>& args);

CsvTable density_table(const RunConfig& cfg);
CsvTable uncertainty_table(const RunConfig& cfg);
CsvTable entropy_table(const RunConfig& cfg);
CsvTable export_model_table(const RunConfig& cfg);
// returns the report and whether every check passed
CsvTable validate_table(const RunConfig& cfg, bool* passed);

std::string comment_line(const RunConfig& cfg);

// runs a parsed config, writes the CSV, returns the exit code
int run(const RunConfig& cfg, std::ostream& err);
// parse + run with the documented exit codes
int run_cli(const std::vector<std::string>& args, std::ostream& err);

}  // namespace tocs::cli
