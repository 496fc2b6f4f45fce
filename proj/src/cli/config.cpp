#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "CLI11.hpp"
#include "bandgap_qed/cli.hpp"
#include "bandgap_qed/errors.hpp"

namespace bgq::cli {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size() || !std::isfinite(v)) {
    throw ConfigError("'" + key + "' expects a number, got '" + value + "'");
  }
  return v;
}

int to_int(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v != std::floor(v) || std::abs(v) > 2e9) throw ConfigError("'" + key + "' expects an integer");
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("'" + key + "' expects true or false");
}

std::string one_of(const std::string& key, const std::string& value, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (value == a) return value;
  }
  throw ConfigError("'" + key + "' does not accept '" + value + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) throw ConfigError("'" + key + "' needs at least one value");
  return out;
}

// Round-trip exact.
std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  tol.validate();
  const auto need = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  need(n >= 1.0, "n must be >= 1");
  need(a > 0.0, "a must be positive");
  need(!b || *b >= 0.0, "b must be nonnegative");
  need(bands >= 1 && k_points >= 8, "need bands >= 1 and k_points >= 8");
  need(omega_max > 0.0, "omega_max must be positive");
  need(beta > 0.0, "beta must be positive");
  need(tmax > 0.0 && dt > 0.0 && tmax / dt <= 1e7, "need tmax > 0, dt > 0, tmax/dt <= 1e7");
  need(output_stride >= 1, "stride must be >= 1");
  need(cutoff > 0.0 && tau_min > 0.0 && tau_max > tau_min && tau_points >= 2, "invalid kernel grid");
  need(dos_omega_max > 0.0 && dos_points >= 2, "invalid DOS grid");
  need(dk_max > dk_min && dk_points >= 2, "invalid detuning grid");
  need(spectrum_tmax >= 100.0, "spectrum_tmax must be >= 100");
  need(volterra_tol > 0.0 && talbot_tol > 0.0, "tolerances must be positive");
  need(!deltas.empty(), "need at least one detuning");
  for (double d : deltas) need(std::isfinite(d), "detunings must be finite");
  const auto member = [](const std::string& v, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed) {
      if (v == a) return true;
    }
    return false;
  };
  need(member(command, {"bands", "gaps", "dos", "kernel", "decay", "spectrum", "figure"}), "unknown command");
  need(member(figure, {"pop-isotropic"}), "unknown figure");
  need(member(method, {"analytic", "volterra", "talbot", "asymptotic", "all"}), "unknown method");
  need(member(kernel_source, {"closed_form", "quadrature"}), "unknown kernel_source");
  need(member(cutoff_shape, {"exponential", "sharp"}), "unknown cutoff_shape");
  need(member(dos_kind, {"band_edge", "free_space"}), "unknown dos_kind");
}

void set_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
  static const std::map<std::string, std::function<void(ExperimentConfig&, const std::string&, const std::string&)>>
      setters = {
          {"command", [](auto& c, auto& k, auto& v) {
             c.command = one_of(k, v, {"bands", "gaps", "dos", "kernel", "decay", "spectrum", "figure"});
           }},
          {"figure", [](auto& c, auto& k, auto& v) { c.figure = one_of(k, v, {"pop-isotropic"}); }},
          {"n", [](auto& c, auto& k, auto& v) { c.n = to_double(k, v); }},
          {"a", [](auto& c, auto& k, auto& v) { c.a = to_double(k, v); }},
          {"b", [](auto& c, auto& k, auto& v) {
             if (v == "auto") {
               c.b.reset();
             } else {
               c.b = to_double(k, v);
             }
           }},
          {"bands", [](auto& c, auto& k, auto& v) { c.bands = to_int(k, v); }},
          {"k_points", [](auto& c, auto& k, auto& v) { c.k_points = to_int(k, v); }},
          {"omega_max", [](auto& c, auto& k, auto& v) { c.omega_max = to_double(k, v); }},
          {"beta", [](auto& c, auto& k, auto& v) { c.beta = to_double(k, v); }},
          {"delta", [](auto& c, auto& k, auto& v) { c.deltas = to_list(k, v); }},
          {"method", [](auto& c, auto& k, auto& v) {
             c.method = one_of(k, v, {"analytic", "volterra", "talbot", "asymptotic", "all"});
           }},
          {"tmax", [](auto& c, auto& k, auto& v) { c.tmax = to_double(k, v); }},
          {"dt", [](auto& c, auto& k, auto& v) { c.dt = to_double(k, v); }},
          {"stride", [](auto& c, auto& k, auto& v) { c.output_stride = to_int(k, v); }},
          {"kernel_source", [](auto& c, auto& k, auto& v) {
             c.kernel_source = one_of(k, v, {"closed_form", "quadrature"});
           }},
          {"cutoff_shape", [](auto& c, auto& k, auto& v) {
             c.cutoff_shape = one_of(k, v, {"exponential", "sharp"});
           }},
          {"cutoff", [](auto& c, auto& k, auto& v) { c.cutoff = to_double(k, v); }},
          {"tau_min", [](auto& c, auto& k, auto& v) { c.tau_min = to_double(k, v); }},
          {"tau_max", [](auto& c, auto& k, auto& v) { c.tau_max = to_double(k, v); }},
          {"tau_points", [](auto& c, auto& k, auto& v) { c.tau_points = to_int(k, v); }},
          {"dos_kind", [](auto& c, auto& k, auto& v) { c.dos_kind = one_of(k, v, {"band_edge", "free_space"}); }},
          {"dos_omega_g", [](auto& c, auto& k, auto& v) { c.dos_omega_g = to_double(k, v); }},
          {"dos_omega_max", [](auto& c, auto& k, auto& v) { c.dos_omega_max = to_double(k, v); }},
          {"dos_points", [](auto& c, auto& k, auto& v) { c.dos_points = to_int(k, v); }},
          {"dk_min", [](auto& c, auto& k, auto& v) { c.dk_min = to_double(k, v); }},
          {"dk_max", [](auto& c, auto& k, auto& v) { c.dk_max = to_double(k, v); }},
          {"dk_points", [](auto& c, auto& k, auto& v) { c.dk_points = to_int(k, v); }},
          {"spectrum_tmax", [](auto& c, auto& k, auto& v) { c.spectrum_tmax = to_double(k, v); }},
          {"out", [](auto& c, auto&, auto& v) { c.out = v; }},
          {"svg", [](auto& c, auto& k, auto& v) { c.svg = to_bool(k, v); }},
          {"tol.root_tol", [](auto& c, auto& k, auto& v) { c.tol.root_tol = to_double(k, v); }},
          {"tol.quad_tol", [](auto& c, auto& k, auto& v) { c.tol.quad_tol = to_double(k, v); }},
          {"tol.erf_tol", [](auto& c, auto& k, auto& v) { c.tol.erf_tol = to_double(k, v); }},
          {"tol.max_iter", [](auto& c, auto& k, auto& v) { c.tol.max_iter = to_int(k, v); }},
          {"tol.volterra_tol", [](auto& c, auto& k, auto& v) { c.volterra_tol = to_double(k, v); }},
          {"tol.talbot_tol", [](auto& c, auto& k, auto& v) { c.talbot_tol = to_double(k, v); }},
      };
  const auto it = setters.find(key);
  if (it == setters.end()) throw ConfigError("unknown setting '" + key + "'");
  it->second(c, key, value);
}

std::string serialize(const ExperimentConfig& c) {
  std::string deltas;
  for (std::size_t i = 0; i < c.deltas.size(); ++i) deltas += (i ? "," : "") + exact(c.deltas[i]);
  const std::vector<std::pair<std::string, std::string>> kv = {
      {"command", c.command},
      {"figure", c.figure},
      {"n", exact(c.n)},
      {"a", exact(c.a)},
      {"b", c.b ? exact(*c.b) : "auto"},
      {"bands", std::to_string(c.bands)},
      {"k_points", std::to_string(c.k_points)},
      {"omega_max", exact(c.omega_max)},
      {"beta", exact(c.beta)},
      {"delta", deltas},
      {"method", c.method},
      {"tmax", exact(c.tmax)},
      {"dt", exact(c.dt)},
      {"stride", std::to_string(c.output_stride)},
      {"kernel_source", c.kernel_source},
      {"cutoff_shape", c.cutoff_shape},
      {"cutoff", exact(c.cutoff)},
      {"tau_min", exact(c.tau_min)},
      {"tau_max", exact(c.tau_max)},
      {"tau_points", std::to_string(c.tau_points)},
      {"dos_kind", c.dos_kind},
      {"dos_omega_g", exact(c.dos_omega_g)},
      {"dos_omega_max", exact(c.dos_omega_max)},
      {"dos_points", std::to_string(c.dos_points)},
      {"dk_min", exact(c.dk_min)},
      {"dk_max", exact(c.dk_max)},
      {"dk_points", std::to_string(c.dk_points)},
      {"spectrum_tmax", exact(c.spectrum_tmax)},
      {"out", c.out},
      {"svg", c.svg ? "true" : "false"},
      {"tol.root_tol", exact(c.tol.root_tol)},
      {"tol.quad_tol", exact(c.tol.quad_tol)},
      {"tol.erf_tol", exact(c.tol.erf_tol)},
      {"tol.max_iter", std::to_string(c.tol.max_iter)},
      {"tol.volterra_tol", exact(c.volterra_tol)},
      {"tol.talbot_tol", exact(c.talbot_tol)},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::stringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected key=value");
    }
    set_key(base, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
  return base;
}

ExperimentConfig parse_args(int argc, const char* const* argv) {
  CLI::App app{"Photonic band-gap band structures and band-edge spontaneous emission"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::vector<std::pair<std::string, std::string>> overrides;
  std::string config_path;
  const auto value_flag = [&](const std::string& flag, const std::string& key, const std::string& help) {
    app.add_option_function<std::string>(
        flag, [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); }, help);
  };
  value_flag("--n", "n", "scatterer refractive index");
  value_flag("--a", "a", "scatterer half-width");
  value_flag("--b", "b", "spacer width, or 'auto' for b = 2na");
  value_flag("--bands", "bands", "number of bands");
  value_flag("--k-points", "k_points", "k samples on [0, pi/L]");
  value_flag("--omega-max", "omega_max", "gap search limit in units of 2 pi c / L");
  value_flag("--beta", "beta", "coupling frequency beta");
  value_flag("--method", "method", "analytic|volterra|talbot|asymptotic|all");
  value_flag("--tmax", "tmax", "final time in units of 1/beta");
  value_flag("--dt", "dt", "Volterra step in units of 1/beta");
  value_flag("--stride", "stride", "write every n-th time step");
  value_flag("--kernel-source", "kernel_source", "closed_form|quadrature");
  value_flag("--cutoff-shape", "cutoff_shape", "exponential|sharp");
  value_flag("--cutoff", "cutoff", "cutoff above the band edge in units of beta");
  value_flag("--tau-min", "tau_min", "first kernel delay");
  value_flag("--tau-max", "tau_max", "last kernel delay");
  value_flag("--tau-points", "tau_points", "kernel samples");
  value_flag("--dos-kind", "dos_kind", "band_edge|free_space");
  value_flag("--omega-g", "dos_omega_g", "band edge frequency for the DOS");
  value_flag("--dos-omega-max", "dos_omega_max", "DOS grid end");
  value_flag("--dos-points", "dos_points", "DOS samples");
  value_flag("--dk-min", "dk_min", "spectrum detuning grid start (units of beta)");
  value_flag("--dk-max", "dk_max", "spectrum detuning grid end");
  value_flag("--dk-points", "dk_points", "spectrum detuning samples");
  value_flag("--spectrum-tmax", "spectrum_tmax", "trace length for the spectrum");
  value_flag("--out", "out", "output directory");
  app.add_option_function<std::vector<std::string>>(
      "--delta",
      [&overrides](const std::vector<std::string>& v) {
        std::string joined;
        for (std::size_t i = 0; i < v.size(); ++i) joined += (i ? "," : "") + v[i];
        overrides.emplace_back("delta", joined);
      },
      "detunings in units of beta (comma separated)")
      ->delimiter(',');
  app.add_option_function<std::vector<std::string>>(
      "--tol",
      [&overrides](const std::vector<std::string>& v) {
        for (const std::string& item : v) {
          const auto eq = item.find('=');
          if (eq == std::string::npos) throw ConfigError("--tol expects KEY=VAL, got '" + item + "'");
          overrides.emplace_back("tol." + item.substr(0, eq), item.substr(eq + 1));
        }
      },
      "tolerance override KEY=VAL (root_tol, quad_tol, erf_tol, max_iter, volterra_tol, talbot_tol)");
  app.add_flag_callback("--svg", [&overrides] { overrides.emplace_back("svg", "true"); }, "also write SVG plots");
  app.add_option("--config", config_path, "key=value configuration file");

  std::string figure_name = "pop-isotropic";
  for (const char* name : {"bands", "gaps", "dos", "kernel", "decay", "spectrum"}) {
    app.add_subcommand(name)->fallthrough();
  }
  CLI::App* figure = app.add_subcommand("figure", "reproduce a figure")->fallthrough();
  figure->add_option("name", figure_name, "figure name (pop-isotropic)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  ExperimentConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    cfg = parse_config(buf.str());
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (cfg.command == "figure") set_key(cfg, "figure", figure_name);
  for (const auto& [k, v] : overrides) set_key(cfg, k, v);
  cfg.validate();
  return cfg;
}

}  // namespace bgq::cli
