#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qrev/asymptotics.hpp"
#include "qrev/experiment.hpp"
#include "qrev/gaussian.hpp"
#include "qrev/moving_frame.hpp"
#include "qrev/reverse_one_mode.hpp"
#include "qrev/state_spec.hpp"
#include "qrev/table.hpp"
#include "qrev/verify.hpp"

namespace {

constexpr const char* kInfeasible = "infeasible";
constexpr const char* kDivergent = "divergent";

struct GlobalConfig {
  double gamma = 1.0;
  std::string out_dir = "out";
  std::string format = "csv";
  std::vector<std::string> tol_overrides;

  qrev::TableFormat table_format() const {
    return format == "json" ? qrev::TableFormat::json : qrev::TableFormat::csv;
  }
};

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

void ensure_out_dir(const GlobalConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + config.out_dir + "'");
  const auto probe = std::filesystem::path(config.out_dir) / ".qrev-write-probe";
  std::ofstream test(probe);
  if (!test) throw std::runtime_error("output directory '" + config.out_dir + "' is not writable");
  test.close();
  std::filesystem::remove(probe, ec);
}

int cmd_phase_diagram(const GlobalConfig& config, double r_min, double r_max, int r_points,
                      double nu_min, double nu_max, int nu_points) {
  if (r_points < 2 || nu_points < 2) throw std::runtime_error("grid resolutions must be >= 2");
  ensure_out_dir(config);
  const double g = config.gamma;
  const auto rs = linspace(r_min, r_max, r_points);
  const auto nus = linspace(nu_min, nu_max, nu_points);

  qrev::Table bayes{{"r", "nu", "bayes_cp_min_eig"}, {}};
  qrev::Table zmin{{"r", "nu", "z_min"}, {}};
  for (double r : rs) {
    for (double nu : nus) {
      const qrev::SqueezedThermalParams params{nu, r};
      bayes.add_row({r, nu, qrev::cp_min_eig(qrev::bayes_generator(params, g))});
      try {
        zmin.add_row({r, nu, qrev::z_min_exact(params, g).z_min});
      } catch (const qrev::divergence_error&) {
        zmin.add_row({r, nu, std::string(kDivergent)});
      }
    }
  }

  qrev::Table boundary{{"r", "nu"}, {}};
  for (double r : linspace(r_min, r_max, 4 * r_points)) {
    const double nu = std::cosh(2.0 * r);
    if (nu >= nu_min && nu <= nu_max) boundary.add_row({r, nu});
  }

  qrev::Table overlay{{"label", "s_db", "a_db", "v_minus", "v_plus", "r", "nu", "x",
                       "in_forced_sector"},
                      {}};
  for (const qrev::ExperimentPoint& p : qrev::experiment_overlay())
    overlay.add_row({p.label, p.s_db, p.a_db, p.v_minus(), p.v_plus(), p.r(), p.nu(), p.x(),
                     p.x() > 1.0 ? 1.0 : 0.0});

  qrev::write_table(bayes, config.out_dir, "bayes_cp_grid", config.table_format());
  qrev::write_table(zmin, config.out_dir, "zmin_grid", config.table_format());
  qrev::write_table(boundary, config.out_dir, "boundary", config.table_format());
  qrev::write_table(overlay, config.out_dir, "experiment_overlay", config.table_format());
  std::cout << "phase-diagram: wrote bayes_cp_grid, zmin_grid, boundary, experiment_overlay ("
            << qrev::experiment_overlay_version() << ") to " << config.out_dir << "\n";
  return 0;
}

int cmd_compare(const GlobalConfig& config, double nu, double r_min, double r_max, int r_points) {
  if (nu <= 1.0) throw std::runtime_error("compare: --nu must be > 1");
  if (r_points < 2) throw std::runtime_error("grid resolutions must be >= 2");
  ensure_out_dir(config);
  const double g = config.gamma;

  qrev::Table table{{"r", "x", "z_exact", "bayes_feasible", "z_bayes", "iso_feasible",
                     "z_isotropic", "z_petz", "petz_gap"},
                    {}};
  for (double r : linspace(r_min, r_max, r_points)) {
    const qrev::SqueezedThermalParams params{nu, r};
    const qrev::ProtocolComparison cmp = qrev::compare_protocols(params, g);
    std::vector<qrev::Cell> row{r, params.x(), cmp.z_exact};
    row.push_back(cmp.bayes_feasible ? 1.0 : 0.0);
    if (cmp.bayes_feasible)
      row.push_back(cmp.z_bayes);
    else
      row.push_back(std::string(kInfeasible));
    row.push_back(cmp.iso_feasible ? 1.0 : 0.0);
    if (cmp.iso_feasible)
      row.push_back(cmp.z_iso);
    else
      row.push_back(std::string(kInfeasible));
    row.push_back(cmp.z_petz);
    row.push_back(cmp.petz_gap);
    table.add_row(std::move(row));
  }
  qrev::write_table(table, config.out_dir, "protocol_comparison", config.table_format());
  std::cout << "compare: wrote protocol_comparison for nu = " << nu << " to " << config.out_dir
            << "\n";
  return 0;
}

int cmd_pure_endpoint(const GlobalConfig& config, std::vector<double> r_list) {
  for (double r : r_list)
    if (r <= 0.0) throw std::runtime_error("pure-endpoint: all --r values must be > 0");
  ensure_out_dir(config);
  const double g = config.gamma;

  qrev::Table table{{"r", "t", "z_min", "t_z_min", "ref_2_over_t"}, {}};
  const std::vector<double> grid = qrev::default_endpoint_grid(g);
  for (double r : r_list) {
    const qrev::EndpointAsymptotics curve = qrev::pure_endpoint_curve(r, g, grid);
    for (std::size_t i = 0; i < curve.t.size(); ++i)
      table.add_row({r, curve.t[i], curve.z[i], curve.t_z[i], 2.0 / curve.t[i]});
  }
  qrev::write_table(table, config.out_dir, "pure_endpoint", config.table_format());
  std::cout << "pure-endpoint: wrote pure_endpoint for " << r_list.size() << " squeezing value(s) to "
            << config.out_dir << "\n";
  return 0;
}

int cmd_multimode(const GlobalConfig& config, const std::string& spec_path, double t_min,
                  double t_max, int t_points) {
  ensure_out_dir(config);
  const double g = config.gamma;
  const qrev::StateSpec spec = qrev::load_state_spec(spec_path);
  const qrev::MatrixXd gamma0 = spec.covariance();
  const int n = spec.n_modes();

  if (t_points <= 0)
    t_points = std::max(2, static_cast<int>(std::llround((t_max - t_min) * g / 0.005)) + 1);
  if (t_points < 2) throw std::runtime_error("multimode: --t-points must be >= 2");
  if (t_min <= 0.0 || t_max <= t_min) throw std::runtime_error("multimode: bad time range");

  const std::vector<double> times = linspace(t_min / g, t_max / g, t_points);
  const qrev::MovingFrame frame = qrev::build_moving_frame(gamma0, g, times);
  for (const std::string& w : frame.warnings) std::cerr << "warning: " << w << "\n";

  std::vector<std::string> columns{"t"};
  for (int k = 1; k <= n; ++k) columns.push_back("nu_" + std::to_string(k));
  for (int k = 1; k <= n; ++k) columns.push_back("x_star_" + std::to_string(k));
  for (int k = 1; k <= n; ++k) columns.push_back("cost_" + std::to_string(k));
  columns.insert(columns.end(), {"total", "cp_min_eig", "matching_residual"});
  qrev::Table table{columns, {}};

  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<qrev::Cell> row{times[i]};
    for (int k = 0; k < n; ++k) row.push_back(frame.nu[i][k]);
    for (int k = 0; k < n; ++k) row.push_back(frame.x_star[i][k]);
    try {
      const qrev::MultimodeOptimum opt = qrev::multimode_optimum(frame, static_cast<int>(i));
      for (int k = 0; k < n; ++k) row.push_back(opt.mode_cost[k]);
      row.push_back(opt.total);
      row.push_back(opt.cp_margin);
      row.push_back(opt.matching_residual);
    } catch (const qrev::divergence_error&) {
      for (int k = 0; k < n + 3; ++k) row.push_back(std::string(kDivergent));
    }
    table.add_row(std::move(row));
  }
  qrev::write_table(table, config.out_dir, "multimode_trace", config.table_format());
  std::cout << "multimode: wrote multimode_trace (" << n << " mode(s), " << times.size()
            << " instants) to " << config.out_dir << "\n";
  return 0;
}

int cmd_verify(const GlobalConfig& config, const std::string& subset, bool quick) {
  ensure_out_dir(config);
  qrev::VerifyOptions options;
  options.gamma = config.gamma;
  options.subset = subset;
  options.quick = quick;
  for (const std::string& token : config.tol_overrides) {
    const auto eq = token.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--tol-override expects name=value, got '" + token + "'");
    qrev::apply_threshold_override(options.thresholds, token.substr(0, eq),
                                   std::stod(token.substr(eq + 1)));
  }

  const std::vector<qrev::CheckResult> results = qrev::run_verification(options);
  const std::string report = qrev::verification_report_json(options, results);
  const auto path = std::filesystem::path(config.out_dir) / "verify_report.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << report;
  out.close();

  std::string first_failure;
  for (const qrev::CheckResult& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.details << "\n";
    if (!r.pass && first_failure.empty()) first_failure = r.name;
  }
  std::cout << "report: " << path.string() << "\n";
  if (!first_failure.empty()) {
    std::cerr << "verification failed, first failing check: " << first_failure << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact Gaussian pure-loss reversibility toolkit"};
  app.require_subcommand(1);

  GlobalConfig config;
  app.add_option("--gamma", config.gamma, "Loss rate (all rates are reported in these units)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", config.out_dir, "Output directory for datasets and reports");
  app.add_option("--format", config.format, "Dataset format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--tol-override", config.tol_overrides,
                 "Verification tolerance override, name=value (repeatable)");

  auto* phase = app.add_subcommand("phase-diagram", "Emit CP-margin and Z_min grids over (r, nu)");
  double r_min = 0.0, r_max = 2.0, nu_min = 1.0, nu_max = 12.0;
  int r_points = 101, nu_points = 111;
  phase->add_option("--r-min", r_min);
  phase->add_option("--r-max", r_max);
  phase->add_option("--r-points", r_points);
  phase->add_option("--nu-min", nu_min);
  phase->add_option("--nu-max", nu_max);
  phase->add_option("--nu-points", nu_points);

  auto* compare = app.add_subcommand("compare", "Protocol cost comparison at fixed nu");
  double cmp_nu = 3.0, cmp_r_min = 0.0, cmp_r_max = 2.0;
  int cmp_r_points = 201;
  compare->add_option("--nu", cmp_nu, "Thermal symplectic eigenvalue (> 1)")->required();
  compare->add_option("--r-min", cmp_r_min);
  compare->add_option("--r-max", cmp_r_max);
  compare->add_option("--r-points", cmp_r_points);

  auto* endpoint = app.add_subcommand("pure-endpoint", "Pure-endpoint cost divergence datasets");
  std::vector<double> r_list{0.5, 1.0, 1.5};
  endpoint->add_option("--r", r_list, "Squeezing values (> 0)");

  auto* multimode = app.add_subcommand("multimode", "Multimode reverse-protocol trace");
  std::string spec_path;
  double t_min = 0.05, t_max = 2.0;
  int t_points = 0;
  multimode->add_option("--spec", spec_path, "State-spec file")->required();
  multimode->add_option("--t-min", t_min, "Start time, units of 1/gamma");
  multimode->add_option("--t-max", t_max, "End time, units of 1/gamma");
  multimode->add_option("--t-points", t_points, "Grid size (default: step 0.005/gamma)");

  auto* verify = app.add_subcommand("verify", "Run the verification suite");
  std::string subset = "all";
  bool quick = false;
  verify->add_option("--subset", subset, "all | one-mode | oracle | multimode | asymptotics");
  verify->add_flag("--quick", quick, "Reduced grid sizes (smoke run)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (phase->parsed())
      return cmd_phase_diagram(config, r_min, r_max, r_points, nu_min, nu_max, nu_points);
    if (compare->parsed())
      return cmd_compare(config, cmp_nu, cmp_r_min, cmp_r_max, cmp_r_points);
    if (endpoint->parsed()) return cmd_pure_endpoint(config, r_list);
    if (multimode->parsed())
      return cmd_multimode(config, spec_path, t_min, t_max, t_points);
    if (verify->parsed()) return cmd_verify(config, subset, quick);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
