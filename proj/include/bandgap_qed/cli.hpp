#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bandgap_qed/numerics.hpp"

namespace bgq::cli {

/// Everything a run needs. Lattice lengths are absolute with c = 1; emitter
/// detunings are in units of beta (negative: transition inside the gap) and
/// times in units of 1/beta.
struct ExperimentConfig {
  std::string command = "decay";  // bands gaps dos kernel decay spectrum figure
  std::string figure = "pop-isotropic";

  double n = 3.0;
  double a = 0.25;
  std::optional<double> b;  // unset: b = 2 n a
  int bands = 4;
  int k_points = 256;
  double omega_max = 2.0;  // gaps: upper frequency in units of 2 pi c / L

  double beta = 1.0;
  std::vector<double> deltas{-10.0, -3.5, -1.0, 0.0, 1.0, 10.0};
  std::string method = "analytic";  // analytic volterra talbot asymptotic all
  double tmax = 10.0;
  double dt = 1e-3;
  int output_stride = 10;  // write every n-th Volterra step

  std::string kernel_source = "closed_form";  // closed_form quadrature
  std::string cutoff_shape = "exponential";   // exponential sharp
  double cutoff = 1e4;                        // above the band edge, units of beta
  double tau_min = 0.1;
  double tau_max = 10.0;
  int tau_points = 100;

  std::string dos_kind = "band_edge";  // band_edge free_space
  double dos_omega_g = 1.0;
  double dos_omega_max = 5.0;
  int dos_points = 500;

  double dk_min = -5.0;
  double dk_max = 20.0;
  int dk_points = 501;
  double spectrum_tmax = 200.0;

  std::string out = ".";
  bool svg = false;
  ToleranceConfig tol{};
  double volterra_tol = 1e-4;
  double talbot_tol = 1e-8;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Applies one key=value setting. Throws ConfigError for unknown keys or
/// malformed values.
void set_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// One key=value line per field; parse_config reads it back exactly.
std::string serialize(const ExperimentConfig& cfg);
/// Flat key=value text; '#' starts a comment, blank lines are skipped.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});

/// Thrown by parse_args for --help; carries the usage text.
struct HelpRequested {
  std::string text;
};

/// Command line to config: file settings from --config first, flags on top.
ExperimentConfig parse_args(int argc, const char* const* argv);

/// Executes the command; returns the process exit status (0, 2 or 3).
int run(const ExperimentConfig& cfg, std::ostream& diag);

/// Full entry point: parse, run, map errors to exit codes.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& diag);

// Output helpers shared by the commands.

/// 12 significant digits.
std::string format_number(double v);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
};

/// Standalone SVG line plot; the data is embedded as comments.
std::string render_svg(const PlotSpec& plot, const std::vector<Series>& series);

class CsvWriter {
 public:
  CsvWriter(const std::string& config_line, const std::vector<std::string>& header);
  void comment(const std::string& text);
  void row(const std::vector<std::string>& cells);
  const std::string& text() const noexcept { return text_; }

 private:
  std::string text_;
  std::size_t columns_;
};

/// Writes the whole string at once; throws ConfigError if the path is unwritable.
void write_file(const std::string& path, const std::string& content);

}  // namespace bgq::cli
