#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <thread>

#include "bandgap_qed/bandedge.hpp"
#include "bandgap_qed/cli.hpp"
#include "bandgap_qed/dynamics.hpp"
#include "bandgap_qed/errors.hpp"
#include "bandgap_qed/lattice1d.hpp"

namespace bgq::cli {
namespace {

using bandedge::EmitterSpec;
namespace dyn = bgq::dynamics;

std::string config_line(const ExperimentConfig& cfg) {
  std::string s = serialize(cfg);
  std::replace(s.begin(), s.end(), '\n', ';');
  if (!s.empty() && s.back() == ';') s.pop_back();
  return "config: " + s;
}

std::string path_in(const ExperimentConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out) / name).string();
}

void prepare_out_dir(const ExperimentConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec) throw ConfigError("cannot create output directory '" + cfg.out + "': " + ec.message());
}

unsigned thread_budget(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BANDGAP_QED_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Runs job(i) for every index; results are stored by index so output order
// never depends on scheduling. The first failure is rethrown after the join.
template <class Job>
void parallel_for(std::size_t count, Job job) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::mutex failure_lock;
  const auto worker = [&] {
    for (std::size_t i = next++; i < count && !failed; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_lock);
        if (!failure) failure = std::current_exception();
        failed = true;
      }
    }
  };
  const unsigned threads = thread_budget(count);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

lattice::LatticeSpec lattice_of(const ExperimentConfig& cfg) {
  return lattice::LatticeSpec(cfg.n, cfg.a, cfg.b ? *cfg.b : 2.0 * cfg.n * cfg.a);
}

lattice::DispersionConfig dispersion_of(const ExperimentConfig& cfg) {
  lattice::DispersionConfig d;
  d.tol = cfg.tol;
  return d;
}

EmitterSpec emitter_of(const ExperimentConfig& cfg, double delta) {
  return EmitterSpec::from_coupling(cfg.beta, delta * cfg.beta);
}

std::string delta_label(double d) { return format_number(d); }

void write_svg_if(const ExperimentConfig& cfg, const std::string& name, const PlotSpec& plot,
                  const std::vector<Series>& series) {
  if (cfg.svg) write_file(path_in(cfg, name), render_svg(plot, series));
}

void run_bands(const ExperimentConfig& cfg) {
  const lattice::LatticeSpec spec = lattice_of(cfg);
  const lattice::BandStructure bs = lattice::compute_band_structure(spec, cfg.bands, cfg.k_points, dispersion_of(cfg));
  const double L = spec.L();
  CsvWriter csv(config_line(cfg), {"k_over_piL", "band_index", "omega_L_over_2pic"});
  std::vector<Series> series;
  for (std::size_t m = 0; m < bs.bands.size(); ++m) {
    Series s{"band " + std::to_string(m), {}, {}};
    for (std::size_t i = 0; i < bs.k.size(); ++i) {
      const double kx = bs.k[i] * L / kPi, w = bs.bands[m][i] * L / (2.0 * kPi);
      csv.row({format_number(kx), std::to_string(m), format_number(w)});
      s.x.push_back(kx);
      s.y.push_back(w);
    }
    series.push_back(std::move(s));
  }
  write_file(path_in(cfg, "bands.csv"), csv.text());
  write_svg_if(cfg, "bands.svg", {"Band structure", "k L / pi", "omega L / 2 pi c"}, series);
}

void run_gaps(const ExperimentConfig& cfg) {
  const lattice::LatticeSpec spec = lattice_of(cfg);
  const double unit = 2.0 * kPi / spec.L();
  const auto gaps = lattice::find_gaps(spec, cfg.omega_max * unit, dispersion_of(cfg));
  CsvWriter csv(config_line(cfg), {"gap_index", "omega_low", "omega_high", "midgap", "gap_midgap_ratio"});
  csv.comment("frequencies in units of 2 pi c / L");
  for (std::size_t g = 0; g < gaps.size(); ++g) {
    csv.row({std::to_string(g), format_number(gaps[g].omega_low / unit), format_number(gaps[g].omega_high / unit),
             format_number(gaps[g].midgap / unit), format_number(gaps[g].gap_midgap_ratio)});
  }
  write_file(path_in(cfg, "gaps.csv"), csv.text());
}

void run_dos(const ExperimentConfig& cfg) {
  const EmitterSpec em = emitter_of(cfg, cfg.deltas.front());
  const bandedge::DosModel model = cfg.dos_kind == "free_space"
                                       ? bandedge::DosModel::free_space(1.0)
                                       : bandedge::DosModel::isotropic_band_edge(cfg.dos_omega_g * cfg.beta, em);
  CsvWriter csv(config_line(cfg), {"omega", "rho"});
  csv.comment("omega in units of beta");
  Series s{cfg.dos_kind, {}, {}};
  for (int i = 0; i < cfg.dos_points; ++i) {
    const double w = cfg.dos_omega_max * i / (cfg.dos_points - 1);
    const double rho = bandedge::dos_eval(model, w * cfg.beta);
    csv.row({format_number(w), format_number(rho)});
    s.x.push_back(w);
    s.y.push_back(rho);
  }
  write_file(path_in(cfg, "dos.csv"), csv.text());
  write_svg_if(cfg, "dos.svg", {"Density of states", "omega / beta", "rho"}, {s});
}

void run_kernel(const ExperimentConfig& cfg) {
  std::vector<std::string> texts(cfg.deltas.size());
  std::vector<std::vector<Series>> plots(cfg.deltas.size());
  parallel_for(cfg.deltas.size(), [&](std::size_t j) {
    const EmitterSpec em = emitter_of(cfg, cfg.deltas[j]);
    const auto model = bandedge::DosModel::isotropic_band_edge(0.0, em);
    bandedge::KernelQuadratureOptions opts;
    opts.shape = cfg.cutoff_shape == "sharp" ? bandedge::CutoffShape::Sharp : bandedge::CutoffShape::Exponential;
    opts.tolerance = cfg.tol.quad_tol;
    CsvWriter csv(config_line(cfg), {"tau", "re_K", "im_K"});
    csv.comment("tau in units of 1/beta; K in units of beta^2; source " + cfg.kernel_source);
    Series re{"Re K", {}, {}}, im{"Im K", {}, {}};
    for (int i = 0; i < cfg.tau_points; ++i) {
      const double tau = cfg.tau_min + (cfg.tau_max - cfg.tau_min) * i / (cfg.tau_points - 1);
      const double t = tau / cfg.beta;
      const cplx k = cfg.kernel_source == "quadrature"
                         ? bandedge::kernel_from_dos(model, em, t, cfg.cutoff * cfg.beta, opts)
                         : bandedge::kernel_band_edge(em, t);
      const cplx kh = k / (cfg.beta * cfg.beta);
      csv.row({format_number(tau), format_number(kh.real()), format_number(kh.imag())});
      re.x.push_back(tau);
      re.y.push_back(kh.real());
      im.x.push_back(tau);
      im.y.push_back(kh.imag());
    }
    texts[j] = csv.text();
    plots[j] = {re, im};
  });
  for (std::size_t j = 0; j < cfg.deltas.size(); ++j) {
    const std::string stem = "kernel_delta_" + delta_label(cfg.deltas[j]);
    write_file(path_in(cfg, stem + ".csv"), texts[j]);
    write_svg_if(cfg, stem + ".svg", {"Memory kernel", "beta tau", "K / beta^2"}, plots[j]);
  }
}

std::vector<std::string> methods_of(const ExperimentConfig& cfg) {
  if (cfg.method == "all") return {"analytic", "volterra", "talbot"};
  return {cfg.method};
}

// Output grid n * dt (units 1/beta) for n = 0, stride, 2 stride, ... and the final step.
std::vector<std::size_t> output_steps(const ExperimentConfig& cfg) {
  const std::size_t steps = static_cast<std::size_t>(std::ceil(cfg.tmax / cfg.dt - 1e-9));
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n <= steps; n += static_cast<std::size_t>(cfg.output_stride)) out.push_back(n);
  if (out.back() != steps) out.push_back(steps);
  return out;
}

dyn::DecayTrace solve_decay(const ExperimentConfig& cfg, const EmitterSpec& em, const std::string& method) {
  const std::vector<std::size_t> steps = output_steps(cfg);
  std::vector<double> times;
  for (std::size_t n : steps) times.push_back(static_cast<double>(n) * cfg.dt / cfg.beta);
  if (method == "analytic") return dyn::a2_analytic(em, times);
  if (method == "talbot") {
    dyn::TalbotOptions opts;
    opts.tolerance = cfg.talbot_tol;
    return dyn::a2_talbot(em, times, opts);
  }
  if (method == "asymptotic") {
    std::vector<double> late;
    for (double t : times) {
      if (t * cfg.beta >= 10.0) late.push_back(t);
    }
    if (late.empty()) throw NumericalError(ErrorCode::TooEarly, "no output time reaches beta t >= 10");
    return dyn::a2_asymptotic(em, late);
  }
  dyn::VolterraOptions opts;
  opts.tolerance = cfg.volterra_tol;
  const dyn::DecayTrace full = dyn::volterra_solve(em, cfg.tmax / cfg.beta, cfg.dt / cfg.beta, opts);
  std::vector<cplx> amp;
  for (std::size_t n : steps) amp.push_back(full.amplitude()[n]);
  dyn::DecayTrace sub(dyn::Method::Volterra, em.beta(), times, std::move(amp));
  sub.error_estimate = full.error_estimate;
  return sub;
}

double sup_difference(const dyn::DecayTrace& a, const dyn::DecayTrace& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    worst = std::max(worst, std::abs(a.amplitude()[i] - b.amplitude()[i]));
  }
  return worst;
}

void run_decay(const ExperimentConfig& cfg) {
  const std::vector<std::string> methods = methods_of(cfg);
  std::vector<std::vector<dyn::DecayTrace>> results(cfg.deltas.size());
  parallel_for(cfg.deltas.size(), [&](std::size_t j) {
    const EmitterSpec em = emitter_of(cfg, cfg.deltas[j]);
    for (const std::string& m : methods) results[j].push_back(solve_decay(cfg, em, m));
  });

  for (std::size_t j = 0; j < cfg.deltas.size(); ++j) {
    CsvWriter csv(config_line(cfg), {"beta_t", "re_a2", "im_a2", "population", "method"});
    csv.comment("delta_over_beta=" + format_number(cfg.deltas[j]));
    if (results[j].size() > 1) {
      double worst = 0.0;
      for (std::size_t p = 0; p < results[j].size(); ++p) {
        for (std::size_t q = p + 1; q < results[j].size(); ++q) {
          worst = std::max(worst, sup_difference(results[j][p], results[j][q]));
        }
      }
      csv.comment("max_pairwise_amplitude_difference=" + format_number(worst));
    }
    std::vector<Series> series;
    for (const dyn::DecayTrace& tr : results[j]) {
      const std::string tag(dyn::to_string(tr.method()));
      if (tr.error_estimate) csv.comment(tag + "_error_estimate=" + format_number(*tr.error_estimate));
      Series s{tag, {}, {}};
      for (std::size_t i = 0; i < tr.size(); ++i) {
        const cplx a = tr.amplitude()[i];
        csv.row({format_number(tr.beta_t(i)), format_number(a.real()), format_number(a.imag()),
                 format_number(tr.population(i)), tag});
        s.x.push_back(tr.beta_t(i));
        s.y.push_back(tr.population(i));
      }
      series.push_back(std::move(s));
    }
    const std::string stem = "decay_delta_" + delta_label(cfg.deltas[j]);
    write_file(path_in(cfg, stem + ".csv"), csv.text());
    write_svg_if(cfg, stem + ".svg", {"Excited-state population", "beta t", "population"}, series);
  }
}

// Fine steps near t = 0 where the amplitude varies fastest, coarser after.
std::vector<double> spectrum_grid(double beta, double tmax) {
  std::vector<double> t;
  for (int i = 0; i <= 1000; ++i) t.push_back(i * 1e-3 / beta);
  const int coarse = static_cast<int>(std::ceil((tmax - 1.0) / 1e-2));
  for (int i = 1; i <= coarse; ++i) t.push_back((1.0 + i * 1e-2) / beta);
  return t;
}

void run_spectrum(const ExperimentConfig& cfg) {
  std::vector<std::string> texts(cfg.deltas.size());
  std::vector<Series> plots(cfg.deltas.size());
  parallel_for(cfg.deltas.size(), [&](std::size_t j) {
    const EmitterSpec em = emitter_of(cfg, cfg.deltas[j]);
    const dyn::DecayTrace trace = dyn::a2_analytic(em, spectrum_grid(cfg.beta, cfg.spectrum_tmax));
    std::vector<double> grid(cfg.dk_points);
    for (int i = 0; i < cfg.dk_points; ++i) grid[i] = cfg.dk_min + (cfg.dk_max - cfg.dk_min) * i / (cfg.dk_points - 1);
    const dyn::SpectrumTrace sp = dyn::emission_spectrum(trace, em, grid);
    const double weight = dyn::spectral_weight(trace, em);
    CsvWriter csv(config_line(cfg), {"delta_k_over_beta", "density"});
    csv.comment("bound_weight=" + format_number(sp.bound_weight));
    csv.comment("spectral_weight=" + format_number(weight));
    Series s{"delta " + format_number(cfg.deltas[j]), {}, {}};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      csv.row({format_number(grid[i]), format_number(sp.density[i])});
      s.x.push_back(grid[i]);
      s.y.push_back(sp.density[i]);
    }
    texts[j] = csv.text();
    plots[j] = std::move(s);
  });
  for (std::size_t j = 0; j < cfg.deltas.size(); ++j) {
    const std::string stem = "spectrum_delta_" + delta_label(cfg.deltas[j]);
    write_file(path_in(cfg, stem + ".csv"), texts[j]);
    write_svg_if(cfg, stem + ".svg", {"Emission spectrum", "delta_k / beta", "density"}, {plots[j]});
  }
}

std::string figure_column(double delta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "P_delta_%.1f", delta);
  return buf;
}

void run_figure(const ExperimentConfig& cfg) {
  // The comparison against the Volterra solve is a hard check on every run.
  constexpr double kAgreement = 1e-2;
  const std::vector<std::size_t> steps = output_steps(cfg);
  std::vector<dyn::DecayTrace> traces;
  std::vector<double> mismatch(cfg.deltas.size());
  traces.reserve(cfg.deltas.size());
  for (std::size_t j = 0; j < cfg.deltas.size(); ++j) {
    traces.emplace_back(dyn::Method::Analytic, cfg.beta, std::vector<double>{}, std::vector<cplx>{});
  }
  parallel_for(cfg.deltas.size(), [&](std::size_t j) {
    const EmitterSpec em = emitter_of(cfg, cfg.deltas[j]);
    traces[j] = solve_decay(cfg, em, "analytic");
    mismatch[j] = sup_difference(traces[j], solve_decay(cfg, em, "volterra"));
  });
  for (std::size_t j = 0; j < cfg.deltas.size(); ++j) {
    if (!(mismatch[j] <= kAgreement)) {
      throw NumericalError(ErrorCode::OracleMismatch, "closed form and Volterra solve differ by " +
                                                          format_number(mismatch[j]) + " at delta = " +
                                                          format_number(cfg.deltas[j]));
    }
  }

  std::vector<std::string> header{"beta_t"};
  for (double d : cfg.deltas) header.push_back(figure_column(d));
  CsvWriter csv(config_line(cfg), header);
  for (std::size_t j = 0; j < cfg.deltas.size(); ++j) {
    csv.comment(figure_column(cfg.deltas[j]) + " volterra_sup_difference=" + format_number(mismatch[j]));
  }
  std::vector<Series> series;
  for (std::size_t j = 0; j < cfg.deltas.size(); ++j) {
    series.push_back({"delta = " + format_number(cfg.deltas[j]) + " beta", {}, {}});
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::vector<std::string> row{format_number(traces.front().beta_t(i))};
    for (std::size_t j = 0; j < traces.size(); ++j) {
      row.push_back(format_number(traces[j].population(i)));
      series[j].x.push_back(traces[j].beta_t(i));
      series[j].y.push_back(traces[j].population(i));
    }
    csv.row(row);
  }
  write_file(path_in(cfg, "pop_isotropic.csv"), csv.text());
  // The figure is always drawn; --svg only matters for the other commands.
  write_file(path_in(cfg, "pop_isotropic.svg"),
             render_svg({"Excited-state population near an isotropic band edge", "beta t", "population"}, series));
}

}  // namespace

int run(const ExperimentConfig& cfg, std::ostream& diag) {
  try {
    cfg.validate();
    prepare_out_dir(cfg);
    if (cfg.command == "bands") {
      run_bands(cfg);
    } else if (cfg.command == "gaps") {
      run_gaps(cfg);
    } else if (cfg.command == "dos") {
      run_dos(cfg);
    } else if (cfg.command == "kernel") {
      run_kernel(cfg);
    } else if (cfg.command == "decay") {
      run_decay(cfg);
    } else if (cfg.command == "spectrum") {
      run_spectrum(cfg);
    } else if (cfg.command == "figure") {
      run_figure(cfg);
    } else {
      throw ConfigError("unknown command '" + cfg.command + "'");
    }
    return 0;
  } catch (const ConfigError& e) {
    diag << "bandgap-qed: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    diag << "bandgap-qed: " << cfg.command << " failed: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    diag << "bandgap-qed: " << cfg.command << " failed: " << e.what() << '\n';
    return 3;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& diag) {
  ExperimentConfig cfg;
  try {
    cfg = parse_args(argc, argv);
  } catch (const HelpRequested& h) {
    out << h.text;
    return 0;
  } catch (const ConfigError& e) {
    diag << "bandgap-qed: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    diag << "bandgap-qed: configuration error: " << e.what() << '\n';
    return 2;
  }
  return run(cfg, diag);
}

}  // namespace bgq::cli
