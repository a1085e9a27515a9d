#include "cli_commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "tocs/entangle.hpp"
#include "tocs/observables.hpp"
#include "tocs/validate.hpp"

namespace tocs::cli {

namespace {

bool is_susy(Family f) { return f == Family::SusyIso || f == Family::SusyNew; }

std::string upper(std::string s) {
  for (char& c : s) c = char(std::toupper(static_cast<unsigned char>(c)));
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

SusyModel model_for(const RunConfig& cfg) {
  if (cfg.model != Model::SusyQ4) throw ConfigError("SUSY families need --model SUSY_Q4");
  return q4_example_model();
}

std::vector<std::string> row_of(std::initializer_list<double> v) {
  std::vector<std::string> out;
  for (double d : v) out.push_back(format_double(d));
  return out;
}

// P(x) = |Σ c_n φ_n(x)|²
double density_at(const HalfLineBasis& basis, const Vec<cplx>& c, double x) {
  const Eigen::VectorXd phi = basis.jets(x, int(c.size()), 0).col(0);
  cplx s = 0.0;
  for (int n = 0; n < c.size(); ++n) s += c(n) * phi(n);
  return std::norm(s);
}

CoherentState iso_state(const SusyModel& model, double r, int min_trunc) {
  return susy_cs(model, Subspace::Iso, r,
                 required_truncation(Family::SusyIso, iso_ladder_spec(), 2.0, r, std::max(min_trunc, 8)));
}

CoherentState trunc_state(Family family, double r, int min_trunc) {
  const LadderSpec spec = trunc_oscillator_spec();
  return build_cs(family, spec, r, 2.0, required_truncation(family, spec, 2.0, r, std::max(min_trunc, 8)));
}

}  // namespace

Command parse_command(const std::string& s) {
  const std::string u = upper(s);
  if (u == "DENSITY") return Command::Density;
  if (u == "UNCERTAINTY") return Command::Uncertainty;
  if (u == "ENTROPY") return Command::Entropy;
  if (u == "VALIDATE") return Command::Validate;
  if (u == "EXPORT_MODEL") return Command::ExportModel;
  throw ConfigError("unknown command '" + s + "'");
}

Family parse_family(const std::string& s) {
  const std::string u = upper(s);
  if (u == "L_MINUS" || u == "LMINUS") return Family::LMinus;
  if (u == "DISPLACEMENT") return Family::Displacement;
  if (u == "LIN_L_MINUS" || u == "LIN_LMINUS") return Family::LinLMinus;
  if (u == "LIN_DISPLACEMENT") return Family::LinDisplacement;
  if (u == "SUSY_ISO" || u == "ISO") return Family::SusyIso;
  if (u == "SUSY_NEW" || u == "NEW") return Family::SusyNew;
  throw ConfigError("unknown family '" + s + "'");
}

Model parse_model(const std::string& s) {
  const std::string u = upper(s);
  if (u == "TRUNC") return Model::Trunc;
  if (u == "SUSY_Q4") return Model::SusyQ4;
  throw ConfigError("unknown model '" + s + "'");
}

const char* command_name(Command c) {
  switch (c) {
    case Command::Density: return "density";
    case Command::Uncertainty: return "uncertainty";
    case Command::Entropy: return "entropy";
    case Command::Validate: return "validate";
    case Command::ExportModel: return "export-model";
  }
  return "?";
}

const char* model_name(Model m) { return m == Model::Trunc ? "TRUNC" : "SUSY_Q4"; }

void RunConfig::validate() const {
  if (z_values.empty() && z_steps < 2) throw ConfigError("z_steps must be at least 2");
  if (z_values.empty() && !(z_min >= 0.0 && z_max >= z_min)) throw ConfigError("need 0 <= zmin <= zmax");
  for (double z : z_values)
    if (!(z >= 0.0) || !std::isfinite(z)) throw ConfigError("|z| values must be finite and nonnegative");
  if (basis_size < 8) throw ConfigError("basis size must be at least 8");
  if (!std::isfinite(theta) || !std::isfinite(phi)) throw ConfigError("theta and phi must be finite");
  if (!(x_max > 1e-3) || x_steps < 2) throw ConfigError("need xmax > 1e-3 and at least 2 x points");
  const bool needs_family = command == Command::Density || command == Command::Uncertainty || command == Command::Entropy;
  if (needs_family && is_susy(family) != (model == Model::SusyQ4))
    throw ConfigError(std::string("family ") + family_name(family) + " does not belong to model " + model_name(model));
  if (command == Command::ExportModel && model != Model::SusyQ4) throw ConfigError("export-model needs --model SUSY_Q4");
  if (!discrepancy_path.empty() && command != Command::Validate)
    throw ConfigError("--discrepancy-out applies to validate only");
  if (needs_family && seeds) throw ConfigError("--seed-config applies to validate and export-model only");
}

std::vector<double> RunConfig::z_grid() const {
  if (!z_values.empty()) return z_values;
  std::vector<double> out(z_steps);
  for (int i = 0; i < z_steps; ++i) out[i] = z_min + (z_max - z_min) * i / (z_steps - 1);
  return out;
}

std::vector<double> RunConfig::x_grid() const {
  const double x0 = 1e-3;
  std::vector<double> out(x_steps);
  for (int i = 0; i < x_steps; ++i) out[i] = x0 + (x_max - x0) * i / (x_steps - 1);
  return out;
}

std::string RunConfig::canonical() const {
  std::ostringstream os;
  os << "command=" << command_name(command) << ";family=" << family_name(family) << ";model=" << model_name(model)
     << ";basis=" << basis_size << ";theta=" << format_double(theta) << ";phi=" << format_double(phi)
     << ";xmax=" << format_double(x_max) << ";xsteps=" << x_steps << ";z=";
  for (double z : z_grid()) os << format_double(z) << ",";
  if (seeds) {
    os << ";seeds=";
    for (const auto& s : *seeds) os << format_double(s.epsilon) << ":" << format_double(s.nu) << ",";
  }
  return os.str();
}

std::vector<SeedSolution> parse_seed_config(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<SeedSolution> out;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto p = line.find('#'); p != std::string::npos) line.erase(p);
    std::istringstream ls(line);
    std::string e, n, extra;
    if (!(ls >> e)) continue;
    if (!(ls >> n) || (ls >> extra)) throw ConfigError("seed config line " + std::to_string(lineno) + ": expected 'epsilon nu'");
    try {
      size_t used_e = 0, used_n = 0;
      const double eps = std::stod(e, &used_e);
      const double nu = std::stod(n, &used_n);
      if (used_e != e.size() || used_n != n.size() || !std::isfinite(eps) || std::isnan(nu)) throw std::invalid_argument("");
      out.push_back(seed_solution(eps, nu));
    } catch (const GammaPole& g) {
      throw ConfigError("seed config line " + std::to_string(lineno) + ": " + g.what());
    } catch (const std::exception&) {
      throw ConfigError("seed config line " + std::to_string(lineno) + ": not a number pair");
    }
  }
  if (out.empty()) throw ConfigError("seed config holds no seeds");
  for (size_t i = 1; i < out.size(); ++i)
    if (!(out[i - 1].epsilon < out[i].epsilon)) throw ConfigError("seed energies must increase strictly");
  return out;
}

std::vector<SeedSolution> read_seed_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read seed config '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_seed_config(ss.str());
}

RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"Coherent states of the truncated oscillator and its SUSY partners"};
  std::string command, family = "L_MINUS", model = "TRUNC";
  app.add_option("--command", command, "density | uncertainty | entropy | validate | export-model")->required();
  app.add_option("--family", family, "L_MINUS | DISPLACEMENT | LIN_L_MINUS | LIN_DISPLACEMENT | SUSY_ISO | SUSY_NEW");
  app.add_option("--model", model, "TRUNC | SUSY_Q4");
  app.add_option("--zmin", cfg.z_min);
  app.add_option("--zmax", cfg.z_max);
  app.add_option("--steps", cfg.z_steps);
  app.add_option("--z", cfg.z_values, "explicit |z| list, overrides zmin/zmax/steps")->delimiter(',');
  app.add_option("--basis", cfg.basis_size);
  app.add_option("--theta", cfg.theta);
  app.add_option("--phi", cfg.phi);
  app.add_option("--xmax", cfg.x_max);
  app.add_option("--xsteps", cfg.x_steps);
  app.add_option("--out", cfg.output_path);
  app.add_option("--seed-config", cfg.seed_config);
  app.add_option("--discrepancy-out", cfg.discrepancy_path, "validate: write the matrix-element discrepancy report here");
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    throw;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
  cfg.command = parse_command(command);
  cfg.family = parse_family(family);
  cfg.model = parse_model(model);
  if (cfg.model == Model::SusyQ4 && app.count("--family") == 0) cfg.family = Family::SusyIso;
  if (!cfg.seed_config.empty()) cfg.seeds = read_seed_config(cfg.seed_config);
  cfg.validate();
  return cfg;
}

CsvTable density_table(const RunConfig& cfg) {
  CsvTable t;
  t.header = {"z_abs", "x", "P"};
  const std::vector<double> xs = cfg.x_grid();
  for (double r : cfg.z_grid()) {
    std::cerr << "density |z| = " << r << "\n";
    Vec<cplx> c;
    std::unique_ptr<HalfLineBasis> basis;
    if (cfg.family == Family::SusyIso || cfg.family == Family::SusyNew) {
      const SusyModel m = model_for(cfg);
      if (cfg.family == Family::SusyIso) {
        c = iso_state(m, r, cfg.basis_size).vector.amplitudes;
        basis = std::make_unique<SusyIsoBasis>(m);
      } else {
        c = susy_cs(m, Subspace::New, r).vector.amplitudes;
        basis = std::make_unique<SusyNewBasis>(m);
      }
    } else {
      c = trunc_state(cfg.family, r, cfg.basis_size).vector.amplitudes;
      basis = std::make_unique<TruncBasis>();
    }
    for (double x : xs) t.add(row_of({r, x, density_at(*basis, c, x)}));
  }
  return t;
}

CsvTable uncertainty_table(const RunConfig& cfg) {
  CsvTable t;
  t.header = {"z_abs", "sigma_x", "sigma_p", "product"};
  const std::vector<double> zs = cfg.z_grid();
  std::vector<UncertaintyRecord> recs;
  if (cfg.family == Family::SusyIso) {
    if (cfg.basis_size < 30) throw ConfigError("uncertainty sums need basis >= 30");
    const SusyModel m = model_for(cfg);
    recs = uncertainty_scan([&](double r, int min_t) { return iso_state(m, r, min_t); }, SusyIsoBasis(m), zs,
                            cfg.basis_size);
  } else if (cfg.family == Family::SusyNew) {
    const SusyModel m = model_for(cfg);
    const ObservableTables tables = build_tables(SusyNewBasis(m), m.kappa);
    for (double r : zs) recs.push_back(uncertainty(tables, susy_cs(m, Subspace::New, r), m.kappa));
  } else {
    if (cfg.basis_size < 30) throw ConfigError("uncertainty sums need basis >= 30");
    recs = uncertainty_scan(cfg.family, trunc_oscillator_spec(), zs, cfg.basis_size, 2.0);
  }
  for (const auto& r : recs) t.add(row_of({r.z_modulus, r.sigma_x, r.sigma_p, r.product}));
  return t;
}

CsvTable entropy_table(const RunConfig& cfg) {
  CsvTable t;
  t.header = {"z_abs", "theta", "phi", "S", "S_converged", "cutoff"};
  EntropyOptions opt;
  if (is_susy(cfg.family)) opt.model = model_for(cfg);
  std::cerr << "entropy scan, " << cfg.z_grid().size() << " points\n";
  for (const auto& r : entropy_scan(cfg.family, cfg.z_grid(), {cfg.theta, cfg.phi}, opt))
    t.add({format_double(r.z_modulus), format_double(cfg.theta), format_double(cfg.phi), format_double(r.entropy),
           format_bool(r.converged), std::to_string(r.cutoff)});
  return t;
}

CsvTable export_model_table(const RunConfig& cfg) {
  CsvTable t;
  t.header = {"x", "V"};
  const SusyModel m = cfg.seeds ? model_from_seeds(*cfg.seeds) : q4_example_model();
  if (m.explicit_intertwiner)
    for (const char* h : {"phi_E0", "phi_E1", "phi_0", "phi_1", "phi_2", "phi_3", "phi_4", "phi_5"}) t.header.push_back(h);
  const std::vector<double> xs = cfg.x_grid();
  const Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(xs.data(), Eigen::Index(xs.size()));
  const Eigen::VectorXd v = m.explicit_intertwiner ? g.unaryExpr(m.potential) : wronskian_potential(m.seeds, g);
  for (size_t i = 0; i < xs.size(); ++i) {
    std::vector<std::string> row = {format_double(xs[i]), format_double(v(i))};
    if (m.explicit_intertwiner) {
      const Eigen::MatrixXd nj = new_jets(m, 2, xs[i], 0), ij = iso_jets(m, 6, xs[i], 0);
      for (int j = 0; j < 2; ++j) row.push_back(format_double(nj(j, 0)));
      for (int n = 0; n < 6; ++n) row.push_back(format_double(ij(n, 0)));
    }
    t.add(std::move(row));
  }
  return t;
}

CsvTable validate_table(const RunConfig& cfg, bool* passed) {
  ValidateOptions opt;
  opt.basis = cfg.basis_size;
  opt.seeds = cfg.seeds;
  const auto results = run_validation(opt);
  CsvTable t;
  t.header = {"module", "check", "status", "value", "tolerance", "detail"};
  for (const auto& r : results) {
    t.add({r.module, r.name, status_name(r.status), format_double(r.value), format_double(r.tolerance), r.detail});
    if (r.status != CheckStatus::Pass)
      std::cerr << status_name(r.status) << " " << r.module << "/" << r.name << " value " << r.value << " "
                << r.detail << "\n";
  }
  if (passed) *passed = all_passed(results);
  return t;
}

std::string comment_line(const RunConfig& cfg) {
  return "tocs " TOCS_VERSION " " + std::string(command_name(cfg.command)) +
         " config=" + hex64(fnv1a(cfg.canonical())) + " basis=" + std::to_string(cfg.basis_size);
}

int run(const RunConfig& cfg, std::ostream& err) {
  std::ofstream file;
  if (!cfg.output_path.empty()) {
    file.open(cfg.output_path, std::ios::binary | std::ios::trunc);
    if (!file) {
      err << "config error: cannot write '" << cfg.output_path << "'\n";
      return kConfigError;
    }
  }
  std::ostream& out = cfg.output_path.empty() ? std::cout : file;
  try {
    bool passed = true;
    CsvTable t;
    switch (cfg.command) {
      case Command::Density: t = density_table(cfg); break;
      case Command::Uncertainty: t = uncertainty_table(cfg); break;
      case Command::Entropy: t = entropy_table(cfg); break;
      case Command::ExportModel: t = export_model_table(cfg); break;
      case Command::Validate: t = validate_table(cfg, &passed); break;
    }
    write_csv(out, comment_line(cfg), t);
    out.flush();
    if (!out) {
      err << "config error: write to '" << cfg.output_path << "' failed\n";
      return kConfigError;
    }
    if (!cfg.discrepancy_path.empty()) {
      std::ofstream rep(cfg.discrepancy_path, std::ios::binary | std::ios::trunc);
      const ObservableTables tables = build_tables(TruncBasis(), 40);
      write_csv(rep, comment_line(cfg), discrepancy_table(closed_form_discrepancies(tables, 8, 1e-8)));
      rep.flush();
      if (!rep) {
        err << "config error: cannot write '" << cfg.discrepancy_path << "'\n";
        return kConfigError;
      }
    }
    if (!passed) {
      err << "validation failed\n";
      return kValidateFailed;
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NotNormalizable& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const UnsupportedModel& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const CLI::CallForHelp&) {
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  return run(cfg, err);
}

}  // namespace tocs::cli
