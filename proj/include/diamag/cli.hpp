#pragma once

// Config-driven front end: scenario files, dataset/report/cache writers and
// the four subcommands. Commands return process exit statuses.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "diamag/causality.hpp"
#include "diamag/polariton.hpp"

namespace diamag::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitUsage = 2;

/// Carries a "file:line: message" diagnostic.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numbers, pi, sqrt(), + - * / and parentheses. Throws std::invalid_argument.
double evaluate_expression(std::string_view text);

enum class Mode { phenomenological, box, vacuum };

struct GridSpec {
  double omega_min = 0.0;
  double omega_max = 5.0;
  int n_points = 1001;
  bool log_spacing = false;
};

struct BoxSpec {
  double lx = 0.0, ly = 0.0, lz = 0.0;
  double mass = 0.0;
  double charge = 1.0;
  std::optional<double> density;
  double gamma = 0.0;
  int n_max = 6;
};

struct PolaritonSpec {
  double k_min = 0.1;
  double k_max = 100.0;
  int n_k = 40;
  bool log_spacing = true;
  std::optional<double> gamma_scale;
};

struct Tolerances {
  double reflection = 1e-14;
  double consistency = 1e-12;
  double sum_rule = 1e-12;
  double mu_infinity = 1e-5;
  double static_identity = 1e-2;
  double kk_roundtrip = 2e-2;
  double time_domain = 1e-3;
  double trk_diagonal = 0.05;
  double optical_sum_rule = 1e-2;

  void scale(double factor);
};

struct ScenarioConfig {
  std::string source = "<config>";
  std::string name = "scenario";
  Mode mode = Mode::phenomenological;
  DampingForm damping = DampingForm::main_text;
  std::vector<TransitionStrengths> transitions;
  std::optional<BoxSpec> box;
  GridSpec grid;
  PolaritonSpec polariton;
  Tolerances tolerances;
  std::optional<std::string> output_dir;
};

ScenarioConfig parse_config(std::string_view text, const std::string& source);
ScenarioConfig load_config(const std::filesystem::path& path);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  double tolerance_scale = 1.0;
  std::optional<int> n_max;
  std::optional<double> gamma_scale;
};

Eigen::ArrayXd frequency_grid(const GridSpec& grid);
std::vector<double> wavevector_grid(const PolaritonSpec& spec);

/// Writes via a temporary file in the same directory, then renames.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// Moment cache

BoxGeometry box_geometry(const BoxSpec& spec);
/// FNV-1a 64 of the geometry, basis size, linewidth and format version, as hex.
std::string cache_hash(const BoxSpec& spec);
std::string format_cache(const BoxSpec& spec, const std::vector<Transition>& transitions);

struct MomentCache {
  std::string hash;
  std::vector<Transition> transitions;
};

/// nullopt if the file is missing; throws ConfigError if it is malformed.
std::optional<MomentCache> read_cache(const std::filesystem::path& path);

/// Box transitions, loaded from `cache_path` when its hash matches.
std::vector<Transition> box_transitions(const BoxSpec& spec, const std::filesystem::path& cache_path,
                                        std::ostream& log);

MediumModel build_model(const ScenarioConfig& config, const std::vector<Transition>& box_basis);

// Datasets

std::string format_dataset(const MediumModel& model, const Eigen::ArrayXd& grid);

struct DatasetRow {
  double omega;
  Complex eps, mu, epsmu;
};

std::vector<DatasetRow> read_dataset(const std::filesystem::path& path);

// Verification

enum class Status { pass, fail, info };

struct CheckResult {
  Status status = Status::info;
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

std::vector<CheckResult> run_checks(const ScenarioConfig& config, const MediumModel& model,
                                    const std::vector<Transition>& box_basis);
std::string format_report(const ScenarioConfig& config, const std::vector<CheckResult>& checks);

// Commands

int cmd_respond(const ScenarioConfig& config, const RunOptions& options, std::ostream& out,
                std::ostream& err);
int cmd_verify(const ScenarioConfig& config, const RunOptions& options, std::ostream& out,
               std::ostream& err);
int cmd_box(const ScenarioConfig& config, const RunOptions& options, std::ostream& out,
            std::ostream& err);
int cmd_polariton(const ScenarioConfig& config, const RunOptions& options, std::ostream& out,
                  std::ostream& err);

/// Loads the config and dispatches; maps ConfigError and bad input to exit 2.
int run_command(std::string_view command, const std::filesystem::path& config_path,
                const RunOptions& options, std::ostream& out, std::ostream& err);

}  // namespace diamag::cli
