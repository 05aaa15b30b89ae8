#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bwkb/coefficient.hpp"
#include "bwkb/dispersion.hpp"
#include "bwkb/error.hpp"
#include "bwkb/high_contrast.hpp"

namespace bwkb {

inline constexpr int kSchemaVersion = 1;
const char* tool_version();

enum class ExitCode { pass = 0, usage = 1, numerical = 2, validation = 3 };

struct CheckResult {
  std::string suite;
  std::string name;
  double value = 0.0;
  double lower = 0.0;  // used by the "in" comparator
  double tolerance = 0.0;
  std::string comparator = "<=";  // "<=", ">=", "in"
  bool gating = true;             // non-gating checks are reported without a verdict effect
  bool pass = false;
  std::string detail;
};

// Numeric series exported next to a report (one CSV per table).
struct DataTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  std::vector<DataTable> tables;
  bool passed() const;
};

CheckResult check_le(std::string suite, std::string name, double value, double tolerance, std::string detail = {});
CheckResult check_ge(std::string suite, std::string name, double value, double bound, std::string detail = {});
CheckResult check_in(std::string suite, std::string name, double value, double lo, double hi, std::string detail = {});

std::vector<std::string> suite_names();
SuiteReport run_suite(const std::string& name);

struct ExperimentResult {
  ExitCode code = ExitCode::pass;
  std::string output_dir;
  std::vector<std::string> files;
  std::string summary;
};

ExitCode exit_code_for(ErrorCode code);

// {"kind": "high_contrast", "h", "a2"} | {"kind": "two_phase", "h", "a1", "a2"}
// | {"kind": "cell", "coefficient": {...}} | {"kind": "cell", "coefficient_file": path}
struct MediumSpec {
  std::string kind;
  HighContrastMedium hc;
  double a1 = 0.0;
  CellCoefficient coeff;
  nlohmann::json description;
};
MediumSpec parse_medium(const nlohmann::json& medium);
std::shared_ptr<const DispersionBranch> make_branch(const MediumSpec& medium, int n, int points);

// Parses a config file; JSON syntax errors carry line and column.
nlohmann::json load_config(const std::string& path);
nlohmann::json parse_config(const std::string& text);
// Throws Error(schema) naming the offending field.
void validate_config(const nlohmann::json& config);
std::string config_hash(const nlohmann::json& config);

// Runs one command end to end; outputs appear in output_dir only on success.
ExperimentResult run_experiment(const nlohmann::json& config);
ExperimentResult emit_plot_data(const std::string& artifact_dir, const std::string& output_dir = {});
// plotdata command: {"artifacts": [...], "figures": [...], "output_dir": ...}
ExperimentResult emit_plot_data_config(const nlohmann::json& config);

}  // namespace bwkb
