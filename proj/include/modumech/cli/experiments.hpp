#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "modumech/circuit.hpp"
#include "modumech/cli/config.hpp"
#include "modumech/control.hpp"
#include "modumech/dynamics.hpp"
#include "modumech/fock.hpp"
#include "modumech/modulation.hpp"

namespace modumech::cli {

using nlohmann::json;

// --- run configuration ---------------------------------------------------------

struct RunConfig {
  std::string experiment;
  std::map<std::string, std::string> params;  // fully resolved key -> value
  long long seed = 1;
  std::string output_dir = ".";
  std::string format = "csv";  // tables: csv | json (reports are always json)
};

struct Diagnostic {
  std::string severity;  // "warning" | "info"
  std::string message;
};

struct RunResult {
  std::vector<std::string> outputs;       // files written (relative to output_dir)
  std::vector<Diagnostic> diagnostics;
};

// --- experiment schemas ----------------------------------------------------------

struct FieldSpec {
  const char* key;
  const char* default_value;  // nullptr: required
};

inline const std::map<std::string, std::vector<FieldSpec>>& experiment_schemas() {
  static const std::map<std::string, std::vector<FieldSpec>> schemas = {
      {"propagate",
       {{"dim_a", "3"},
        {"dim_b", "30"},
        {"omega_rate", "0"},
        {"Omega_rate", "1"},
        {"g_rate", "0.1"},
        {"t_final", "12.566370614359172"},
        {"samples", "20"},
        {"lc_state", "superposition"},
        {"alpha", "1.0"},
        {"compare_numeric", "true"},
        {"tail_tol", "1e-8"}}},
      {"compare-rwa",
       {{"dim_a", "3"},
        {"dim_b", "30"},
        {"g_max_rate", "1.0"},
        {"eta", "1.0"},
        {"delta_rate", "1.0"},
        {"nu_rate", "100.0"},
        {"omega_rate", "0"},
        {"t_final", "1.5707963267948966"},
        {"samples", "8"},
        {"lc_state", "superposition"},
        {"alpha", "1.0"},
        {"amp_tol", "1e-7"},
        {"tail_tol", "1e-6"}}},
      {"cat-prep",
       {{"g_rate", "1.0"},
        {"r", "0.5"},
        {"g_over_nu", "0.01"},
        {"eta", "1.0"},
        {"alpha", "1.0"},
        {"dim_a", "9"},
        {"dim_b", "42"},
        {"omega_rate", "0"},
        {"amp_tol", "1e-5"},
        {"tail_tol", "1e-2"}}},
      {"optimize",
       {{"dim_a", "3"},
        {"dim_b", "30"},
        {"segments", "10"},
        {"tau", "1.0"},
        {"g_max_rate", "3.141592653589793"},
        {"Omega_max_rate", "31.41592653589793"},
        {"restarts", "20"},
        {"max_iters", "3000"},
        {"input_alpha", "0.8"},
        {"threads", "0"}}},
      {"scan-tau",
       {{"dim_a", "3"},
        {"dim_b", "30"},
        {"tau_list", "0.8,0.9,0.95,0.99,1.0"},
        {"n_list", "10,15"},
        {"g_max_rate", "3.141592653589793"},
        {"Omega_max_rate", "31.41592653589793"},
        {"restarts", "20"},
        {"max_iters", "3000"},
        {"input_alpha", "0.8"},
        {"threads", "0"}}},
      {"photon-pressure",
       {{"g_rate", "1.0"},
        {"n_photons", "1"},
        {"gamma_rate", "0.1"},
        {"eta", "1.0"},
        {"t_final", "20.0"},
        {"samples", "50"}}},
      {"circuit-design",
       {{"I0_amp", nullptr},
        {"C_farad", nullptr},
        {"d_meter", nullptr},
        {"mass_kg", nullptr},
        {"Omega_rad_per_s", nullptr},
        {"Q", "0"},
        {"L_henry", "0"},
        {"eta", "0.5"},
        {"n_photons", "10"},
        {"nu_rad_per_s", "0"},
        {"waveform_samples", "64"}}},
  };
  return schemas;
}

inline std::vector<std::string> experiment_names() {
  std::vector<std::string> names;
  for (const auto& [name, fields] : experiment_schemas()) names.push_back(name);
  return names;
}

// Defaults -> config file section -> --set overrides; unknown keys rejected.
inline RunConfig resolve_config(const std::string& experiment, const ConfigFile& file,
                                const std::vector<std::pair<std::string, std::string>>& overrides) {
  const auto& schemas = experiment_schemas();
  auto schema_it = schemas.find(experiment);
  if (schema_it == schemas.end())
    throw config_error("unknown experiment '" + experiment + "'");
  const auto& schema = schema_it->second;

  RunConfig rc;
  rc.experiment = experiment;
  for (const FieldSpec& f : schema)
    if (f.default_value) rc.params[f.key] = f.default_value;

  auto known = [&](const std::string& key) {
    for (const FieldSpec& f : schema)
      if (key == f.key) return true;
    return false;
  };

  auto sec = file.sections.find(experiment);
  if (sec != file.sections.end()) {
    for (const auto& [key, value] : sec->second) {
      if (!known(key))
        throw config_error("unknown key '" + experiment + "." + key + "'");
      rc.params[key] = value;
    }
  }

  // optional [run] section: seed, format, output_dir
  auto run_sec = file.sections.find("run");
  if (run_sec != file.sections.end()) {
    for (const auto& [key, value] : run_sec->second) {
      if (key == "seed")
        rc.seed = std::strtoll(value.c_str(), nullptr, 10);
      else if (key == "format")
        rc.format = value;
      else if (key == "output_dir")
        rc.output_dir = value;
      else
        throw config_error("unknown key 'run." + key + "'");
    }
  }

  for (const auto& [key, value] : overrides) {
    if (!known(key))
      throw config_error("unknown override key '" + experiment + "." + key + "'");
    rc.params[key] = value;
  }

  for (const FieldSpec& f : schema)
    if (!rc.params.count(f.key))
      throw config_error("missing required key '" + experiment + "." + std::string(f.key) + "'");

  if (rc.format != "csv" && rc.format != "json")
    throw config_error("format must be 'csv' or 'json', got '" + rc.format + "'");
  return rc;
}

// --- deterministic output helpers -----------------------------------------------

inline std::string format_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline double round_g12(double v) { return std::strtod(format_g12(v).c_str(), nullptr); }

struct ResultTable {
  std::string name;                        // file stem
  std::vector<std::string> columns;        // "name [unit]"
  std::vector<std::vector<double>> rows;
};

inline std::string write_table(const ResultTable& table, const std::string& dir,
                               const std::string& format) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string file = table.name + (format == "csv" ? ".csv" : ".json");
  const fs::path path = fs::path(dir) / file;
  std::ofstream out(path);
  if (!out) throw error("cannot write " + path.string());
  if (format == "csv") {
    for (size_t c = 0; c < table.columns.size(); ++c)
      out << (c ? "," : "") << table.columns[c];
    out << "\n";
    for (const auto& row : table.rows) {
      for (size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_g12(row[c]);
      out << "\n";
    }
  } else {
    json j;
    j["columns"] = table.columns;
    j["rows"] = json::array();
    for (const auto& row : table.rows) {
      json r = json::array();
      for (double v : row) r.push_back(round_g12(v));
      j["rows"].push_back(r);
    }
    out << j.dump(2) << "\n";
  }
  return file;
}

inline std::string write_report(const json& report, const std::string& stem,
                                const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string file = stem + ".json";
  std::ofstream out(fs::path(dir) / file);
  if (!out) throw error("cannot write report " + file);
  out << report.dump(2) << "\n";
  return file;
}

inline void write_manifest(const RunConfig& rc, const RunResult& result,
                           const std::string& dir) {
  json m;
  m["tool"] = "modumech";
  m["version"] = version;
  m["experiment"] = rc.experiment;
  m["seed"] = rc.seed;
  m["format"] = rc.format;
  m["parameters"] = rc.params;
  m["constants"] = {{"hbar_J_s", circuit::hbar},
                    {"flux_quantum_Wb", circuit::flux_quantum},
                    {"pi", pi},
                    {"default_tail_tolerance", default_tail_tolerance}};
  m["outputs"] = result.outputs;
  json diags = json::array();
  for (const auto& d : result.diagnostics) diags.push_back({{d.severity, d.message}});
  m["diagnostics"] = diags;
  std::ofstream out(std::filesystem::path(dir) / "manifest.json");
  if (!out) throw error("cannot write manifest.json");
  out << m.dump(2) << "\n";
}

// --- shared state construction ---------------------------------------------------

namespace detail {

inline Eigen::VectorXcd lc_input_state(const std::string& kind, double alpha, int dim,
                                       double tail_tol) {
  if (kind == "vacuum") return vacuum(dim);
  if (kind == "superposition") return uniform_control_input(dim);
  if (kind == "coherent") return coherent_state(alpha, dim, tail_tol);
  throw config_error("lc_state must be vacuum|superposition|coherent, got '" + kind + "'");
}

}  // namespace detail

// --- experiment runners ------------------------------------------------------------

inline RunResult run_propagate(const RunConfig& rc) {
  ParamReader p{rc.experiment, &rc.params};
  const FockSpace space(int(p.positive_int("dim_a")), int(p.positive_int("dim_b")));
  const SystemParams sys{.omega = p.get_double("omega_rate"),
                         .Omega = p.positive("Omega_rate"),
                         .g = p.nonnegative("g_rate")};
  const double t_final = p.positive("t_final");
  const int samples = int(p.positive_int("samples"));
  const double tail_tol = p.positive("tail_tol");
  const bool compare = p.get_bool("compare_numeric");

  const StateVector psi0 = product_state(
      detail::lc_input_state(p.get_string("lc_state"), p.get_double("alpha"), space.dim_a,
                             tail_tol),
      vacuum(space.dim_b), space);

  const auto [x_op, p_op] = quadratures(space.dim_b);
  ResultTable table;
  table.name = "propagate";
  table.columns = {"t [1/rate]",    "na_mean [1]", "nb_mean [1]",
                   "x_mean [1]",    "p_mean [1]",  "entropy [nat]",
                   "norm_dev [1]",  "tail_b [1]"};
  if (compare) table.columns.push_back("fidelity_vs_numeric [1]");

  for (int k = 1; k <= samples; ++k) {
    const double t = t_final * k / samples;
    const StateVector psi = apply(analytic_propagator(sys, t, space), psi0);
    const double tail_b_now = tail_populations(psi).tail_b;
    if (tail_b_now > tail_tol)
      throw truncation_error("propagate: mechanics tail guard violated", tail_b_now);
    const Eigen::VectorXd pa = mode_populations(psi, Mode::A);
    const Eigen::VectorXd pb = mode_populations(psi, Mode::B);
    double na = 0, nb = 0;
    for (int i = 0; i < pa.size(); ++i) na += i * pa(i);
    for (int i = 0; i < pb.size(); ++i) nb += i * pb(i);
    const Eigen::MatrixXcd rho_b = reduced_density_b(psi);
    std::vector<double> row = {t,
                               na,
                               nb,
                               std::real((rho_b * x_op).trace()),
                               std::real((rho_b * p_op).trace()),
                               entanglement_entropy(psi),
                               std::abs(psi.norm() - 1.0),
                               tail_populations(psi).tail_b};
    if (compare) {
      const StateVector ref = apply(numeric_propagator(Schedule::constant(sys), t, space), psi0);
      row.push_back(fidelity(psi, ref));
    }
    table.rows.push_back(std::move(row));
  }

  RunResult res;
  res.outputs.push_back(write_table(table, rc.output_dir, rc.format));
  return res;
}

inline RunResult run_compare_rwa(const RunConfig& rc) {
  ParamReader p{rc.experiment, &rc.params};
  const FockSpace space(int(p.positive_int("dim_a")), int(p.positive_int("dim_b")));
  const double g_max = p.nonnegative("g_max_rate");
  const double eta = p.get_double("eta");
  const double delta = p.get_double("delta_rate");
  const double nu = p.positive("nu_rate");
  const double Omega = nu + delta;
  const ModulationParams mp{g_max, eta, nu, delta};
  mp.validate();
  const SystemParams base{.omega = p.get_double("omega_rate"), .Omega = Omega};

  const StateVector psi0 = product_state(
      detail::lc_input_state(p.get_string("lc_state"), p.get_double("alpha"), space.dim_a,
                             1e-6),
      vacuum(space.dim_b), space);

  PropagationOptions opts;
  opts.amp_tol = p.positive("amp_tol");
  opts.tail_tol = p.positive("tail_tol");

  const double t_final = p.positive("t_final");
  const int samples = int(p.positive_int("samples"));
  ResultTable table;
  table.name = "compare_rwa";
  table.columns = {"t [1/rate]", "rwa_error [1]", "validity_ratio [1]"};
  const double ratio = (nu > 0) ? eta * g_max / nu : 0.0;
  for (int k = 1; k <= samples; ++k) {
    const double t = t_final * k / samples;
    table.rows.push_back({t, rwa_error(mp, base, psi0, t, opts), ratio});
  }

  RunResult res;
  res.outputs.push_back(write_table(table, rc.output_dir, rc.format));
  return res;
}

inline RunResult run_cat_prep(const RunConfig& rc) {
  ParamReader p{rc.experiment, &rc.params};
  const double g = p.positive("g_rate");
  const double r = p.positive("r");
  const double g_over_nu = p.positive("g_over_nu");
  const double eta = p.get_double("eta");
  const double alpha = p.positive("alpha");
  const double omega = p.get_double("omega_rate");
  const FockSpace space(int(p.positive_int("dim_a")), int(p.positive_int("dim_b")));

  const CatSchedule cs = cat_schedule(g, r);
  const double nu = g / g_over_nu;
  const double Omega = nu + cs.delta;
  const ModulationParams mp{g, eta, nu, cs.delta};
  mp.validate();

  PropagationOptions opts;
  opts.amp_tol = p.positive("amp_tol");
  opts.tail_tol = p.positive("tail_tol");

  const StateVector psi0 = product_state(coherent_state(alpha, space.dim_a, opts.tail_tol),
                                         vacuum(space.dim_b), space);
  const Schedule sched = modulated_schedule(mp, Omega, cs.tau, omega);
  const StateVector fin = propagate_state(sched, psi0, cs.tau, opts);

  const double theta = -omega * cs.tau;  // LC rotation predicted by the effective model
  const Eigen::MatrixXcd rho = reduced_density_a(fin);
  const double fid = fidelity_with_pure(
      rho, cat_state(alpha * std::polar(1.0, theta), space.dim_a, opts.tail_tol));
  const TailReport tails = tail_populations(fin);

  json report;
  report["g_rate"] = g;
  report["r"] = r;
  report["delta_rate"] = cs.delta;
  report["nu_rate"] = nu;
  report["Omega_rate"] = Omega;
  report["tau"] = cs.tau;
  report["chi_rate"] = cs.chi;
  report["chi_tau"] = cs.chi_tau;
  report["is_cat_time"] = cs.is_cat_time;
  report["alpha"] = alpha;
  report["theta_predicted"] = theta;
  report["fidelity"] = round_g12(fid);
  report["entropy_final"] = round_g12(entanglement_entropy(fin));
  report["tail_a_final"] = round_g12(tails.tail_a);
  report["tail_b_final"] = round_g12(tails.tail_b);

  RunResult res;
  res.outputs.push_back(write_report(report, "cat_prep", rc.output_dir));
  if (tails.tail_b > 1e-3)
    res.diagnostics.push_back(
        {"warning", "mechanics tail population " + format_g12(tails.tail_b) +
                        "; increase dim_b for a converged fidelity"});
  return res;
}

inline OptimizeConfig optimizer_config(const ParamReader& p, long long seed) {
  OptimizeConfig cfg;
  cfg.space = FockSpace(int(p.positive_int("dim_a")), int(p.positive_int("dim_b")));
  cfg.g_max = p.positive("g_max_rate");
  cfg.Omega_max = p.positive("Omega_max_rate");
  cfg.restarts = int(p.positive_int("restarts"));
  cfg.max_iters = int(p.positive_int("max_iters"));
  cfg.input_alpha = p.nonnegative("input_alpha");
  cfg.threads = int(p.get_int("threads"));
  cfg.seed = static_cast<unsigned long long>(seed);
  return cfg;
}

inline RunResult run_optimize(const RunConfig& rc) {
  ParamReader p{rc.experiment, &rc.params};
  OptimizeConfig cfg = optimizer_config(p, rc.seed);
  cfg.segments = int(p.positive_int("segments"));
  cfg.tau = p.positive("tau");
  const OptimizationResult r = optimize(cfg);

  ResultTable summary;
  summary.name = "optimize_summary";
  summary.columns = {"tau [1/rate]",  "segments [1]", "epsilon [1]",
                     "fidelity [1]",  "iterations [1]", "restarts [1]",
                     "converged [1]", "seed [1]"};
  summary.rows.push_back({cfg.tau, double(cfg.segments), r.epsilon, r.fidelity,
                          double(r.iterations), double(r.restarts_used),
                          double(r.converged), double(r.seed)});

  ResultTable sched;
  sched.name = "optimize_schedule";
  sched.columns = {"segment [1]", "g [rate]", "Omega [rate]"};
  for (int k = 0; k < cfg.segments; ++k)
    sched.rows.push_back({double(k), r.schedule.g_values[size_t(k)],
                          r.schedule.Omega_values[size_t(k)]});

  RunResult res;
  res.outputs.push_back(write_table(summary, rc.output_dir, rc.format));
  res.outputs.push_back(write_table(sched, rc.output_dir, rc.format));
  if (!r.converged)
    res.diagnostics.push_back({"warning", "optimizer returned best-found without convergence"});
  return res;
}

inline RunResult run_scan_tau(const RunConfig& rc) {
  ParamReader p{rc.experiment, &rc.params};
  OptimizeConfig cfg = optimizer_config(p, rc.seed);
  const std::vector<double> taus = p.get_double_list("tau_list");
  std::vector<int> n_list;
  for (double n : p.get_double_list("n_list")) n_list.push_back(int(n));

  ResultTable table;
  table.name = "scan_tau";
  table.columns = {"tau [1/rate]", "segments [1]", "epsilon [1]", "iterations [1]",
                   "monotonic_ok [1]"};
  for (const TauScanRow& row : tau_scan(cfg, taus, n_list))
    table.rows.push_back({row.tau, double(row.segments), row.epsilon,
                          double(row.iterations), double(row.monotonic_ok)});

  RunResult res;
  res.outputs.push_back(write_table(table, rc.output_dir, rc.format));
  return res;
}

inline RunResult run_photon_pressure(const RunConfig& rc) {
  ParamReader p{rc.experiment, &rc.params};
  const double g = p.positive("g_rate");
  const int n = int(p.positive_int("n_photons"));
  const double gamma = p.nonnegative("gamma_rate");
  const double eta = p.get_double("eta");
  const double t_final = p.positive("t_final");
  const int samples = int(p.positive_int("samples"));

  ResultTable table;
  table.name = "photon_pressure";
  table.columns = {"t [1/rate]",   "beta_re [1]", "beta_im [1]",
                   "phonons [1]",  "delta_s [1]", "momentum_drift [1]"};
  for (int k = 1; k <= samples; ++k) {
    const double t = t_final * k / samples;
    const DisplacementReport d = damped_mean_evolution(g, n, gamma, t);
    table.rows.push_back({t, std::real(d.beta), std::imag(d.beta), d.phonons, d.delta_s,
                          momentum_drift(g, n, t)});
  }

  RunResult res;
  res.outputs.push_back(write_table(table, rc.output_dir, rc.format));

  if (gamma > 0) {
    const DisplacementReport ss = damped_steady_state(g, n, gamma);
    ResultTable steady;
    steady.name = "photon_pressure_steady";
    steady.columns = {"gamma [rate]", "delta_s_ss [1]", "phonons_ss [1]",
                      "max_displacement [1]", "max_displacement_reduced [1]"};
    steady.rows.push_back({gamma, ss.delta_s, ss.phonons, max_displacement(g, n, gamma),
                           max_displacement_reduced(g, eta, n, gamma)});
    res.outputs.push_back(write_table(steady, rc.output_dir, rc.format));
  }
  return res;
}

inline RunResult run_circuit_design(const RunConfig& rc) {
  ParamReader p{rc.experiment, &rc.params};
  circuit::CircuitParams cp;
  cp.I0 = p.positive("I0_amp");
  cp.C = p.positive("C_farad");
  cp.d = p.positive("d_meter");
  cp.mass = p.positive("mass_kg");
  cp.Omega_si = p.positive("Omega_rad_per_s");
  cp.Q = p.nonnegative("Q");
  cp.L = p.nonnegative("L_henry");
  const double eta = p.get_double("eta");
  const int n = int(p.positive_int("n_photons"));
  double nu = p.nonnegative("nu_rad_per_s");
  if (nu == 0) nu = cp.Omega_si;

  const circuit::DerivedCircuit dc = circuit::derive(cp);
  json report;
  report["derived"] = {{"omega_max_rad_per_s", round_g12(dc.omega_max)},
                       {"x_zp_m", round_g12(dc.x_zp)},
                       {"g_max_rad_per_s", round_g12(dc.g_max)},
                       {"L_J_henry", round_g12(dc.L_J)}};
  if (cp.L > 0) {
    const circuit::LcRates lr = circuit::lc_basic(cp.L, cp.C, cp.d, cp.mass, cp.Omega_si);
    report["fixed_inductor"] = {{"omega_rad_per_s", round_g12(lr.omega)},
                                {"g_rad_per_s", round_g12(lr.g)}};
  }

  const circuit::EnhancementReport er =
      circuit::enhancement_estimates(dc.g_max, cp.Omega_si, eta, n, cp.Q);
  json enh;
  enh["chi_modulated_rad_per_s"] = round_g12(er.chi_modulated);
  enh["chi_static_rad_per_s"] = round_g12(er.chi_static);
  enh["enhancement_ratio"] = round_g12(er.enhancement_ratio);
  enh["time_inverse_g_s"] = round_g12(er.time_inverse_g_s);
  enh["phonons_at_inverse_g"] = round_g12(er.phonons_at_inverse_g);
  if (er.steady_state_available) {
    auto branch_json = [](const circuit::SteadyStateBranch& b) {
      return json{{"gamma_rad_per_s", round_g12(b.gamma)},
                  {"delta_s", round_g12(b.delta_s)},
                  {"phonons_mean_ode", round_g12(b.phonons_mean_ode)},
                  {"phonons_quadratic", round_g12(b.phonons_quadratic)},
                  {"amplitude_linear", round_g12(b.amplitude_linear)}};
    };
    enh["steady_state"] = {{"gamma_convention_omega_over_q", branch_json(er.gamma_q)},
                           {"gamma_convention_omega_over_2q", branch_json(er.gamma_2q)}};
    enh["steady_state_convention_ambiguous"] = er.steady_state_convention_ambiguous;
    enh["steady_state_note"] =
        "the two damping conventions and the two displacement formulas give "
        "inconsistent phonon numbers; all are reported, none endorsed";
  }
  report["enhancement"] = enh;

  const circuit::AdiabaticityReport stat = circuit::adiabaticity_report_static(nu, cp, 0.0);
  const circuit::AdiabaticityReport full = circuit::adiabaticity_report(nu, cp);
  auto adiab_json = [](const circuit::AdiabaticityReport& a) {
    return json{{"ratio_nu_omega_max", round_g12(a.ratio_nu_omega_max)},
                {"ratio_nu_omega_min", round_g12(a.ratio_nu_omega_min)},
                {"omega_min_rad_per_s", round_g12(a.omega_min)},
                {"max_dphi_dt_per_s", round_g12(a.max_dphi_dt)},
                {"floored", a.floored},
                {"ok", a.ok}};
  };
  report["adiabaticity_static_phi0"] = adiab_json(stat);
  report["adiabaticity_full_waveform"] = adiab_json(full);

  RunResult res;
  res.outputs.push_back(write_report(report, "circuit_design", rc.output_dir));

  const int wf_samples = int(p.positive_int("waveform_samples"));
  ResultTable wf;
  wf.name = "circuit_waveform";
  wf.columns = {"t [s]", "phi [phi0]", "g [rad/s]"};
  const double period = 2.0 * pi / nu;
  for (int k = 0; k <= wf_samples; ++k) {
    const double t = period * k / wf_samples;
    const double phi = circuit::flux_waveform(nu, t);
    wf.rows.push_back({t, phi, circuit::flux_coupling(phi, dc)});
  }
  res.outputs.push_back(write_table(wf, rc.output_dir, rc.format));

  if (!full.ok)
    res.diagnostics.push_back(
        {"warning",
         "flux waveform crosses the omega = 0 turning point; the sweep is not adiabatic there"});
  return res;
}

// --- validation (schema + physics preflight, no execution) ----------------------

inline std::vector<Diagnostic> validate_config(const RunConfig& rc) {
  std::vector<Diagnostic> diags;
  ParamReader p{rc.experiment, &rc.params};

  auto warn = [&](const std::string& msg) { diags.push_back({"warning", msg}); };

  if (rc.experiment == "propagate") {
    const FockSpace space(int(p.positive_int("dim_a")), int(p.positive_int("dim_b")));
    const double g = p.nonnegative("g_rate"), W = p.positive("Omega_rate");
    // worst-case conditional displacement over a half period
    const double beta_max = 2.0 * (g / W) * (space.dim_a - 1);
    if (beta_max * beta_max + 6.0 * beta_max + 4.0 > space.dim_b)
      warn("estimated mechanical displacement needs ~" +
           format_g12(beta_max * beta_max + 6.0 * beta_max + 4.0) +
           " levels; dim_b = " + std::to_string(space.dim_b));
    (void)p.positive("t_final");
  } else if (rc.experiment == "compare-rwa") {
    const double ratio = p.get_double("eta") * p.nonnegative("g_max_rate") / p.positive("nu_rate");
    if (ratio > 0.1)
      warn("RWA validity ratio large: g/nu = " + format_g12(ratio));
    (void)p.positive("amp_tol");
  } else if (rc.experiment == "cat-prep") {
    const double ratio = p.positive("g_over_nu");
    if (ratio > 0.1) warn("RWA validity ratio large: g/nu = " + format_g12(ratio));
    const double alpha = p.positive("alpha");
    const int dim_b = int(p.positive_int("dim_b"));
    // block n is displaced to |beta| ~ n/(2 r); require Poisson support inside
    const double n_sig = alpha * alpha + 4.0 * alpha + 2.0;
    const double beta_max = n_sig / (2.0 * p.positive("r"));
    if (beta_max * beta_max + 6.0 * beta_max > dim_b)
      warn("mechanics truncation likely insufficient: significant LC blocks displace to ~" +
           format_g12(beta_max * beta_max) + " phonons; dim_b = " + std::to_string(dim_b));
  } else if (rc.experiment == "optimize" || rc.experiment == "scan-tau") {
    (void)optimizer_config(p, rc.seed);
    if (rc.experiment == "optimize") (void)p.positive("tau");
  } else if (rc.experiment == "photon-pressure") {
    (void)p.positive("g_rate");
    (void)p.nonnegative("gamma_rate");
  } else if (rc.experiment == "circuit-design") {
    circuit::CircuitParams cp;
    cp.I0 = p.positive("I0_amp");
    cp.C = p.positive("C_farad");
    cp.d = p.positive("d_meter");
    cp.mass = p.positive("mass_kg");
    cp.Omega_si = p.positive("Omega_rad_per_s");
    double nu = p.nonnegative("nu_rad_per_s");
    if (nu == 0) nu = cp.Omega_si;
    const circuit::AdiabaticityReport full = circuit::adiabaticity_report(nu, cp);
    if (!full.ok)
      warn("flux waveform is not adiabatic at the omega = 0 turning point (nu/omega_min = " +
           format_g12(full.ratio_nu_omega_min) + ")");
  }
  return diags;
}

inline RunResult run_experiment(const RunConfig& rc) {
  RunResult res;
  if (rc.experiment == "propagate")
    res = run_propagate(rc);
  else if (rc.experiment == "compare-rwa")
    res = run_compare_rwa(rc);
  else if (rc.experiment == "cat-prep")
    res = run_cat_prep(rc);
  else if (rc.experiment == "optimize")
    res = run_optimize(rc);
  else if (rc.experiment == "scan-tau")
    res = run_scan_tau(rc);
  else if (rc.experiment == "photon-pressure")
    res = run_photon_pressure(rc);
  else if (rc.experiment == "circuit-design")
    res = run_circuit_design(rc);
  else
    throw config_error("unknown experiment '" + rc.experiment + "'");
  write_manifest(rc, res, rc.output_dir);
  return res;
}

}  // namespace modumech::cli
