// Command-line front end: validation, conservation laws, equilibria, ODE/PDE
// simulation, entropy-dissipation suites and the named experiments. All CSV
// output is deterministic for a fixed configuration and seed.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "crn/crn.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitIntegration = 4;
constexpr int kExitViolation = 5;

struct CliFailure {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CliFailure{kExitIo, path + ": cannot open file"};
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

crn::Network load_network(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return crn::parse_network(text);
  } catch (const crn::ParseError& e) {
    throw CliFailure{kExitValidation, path + ":" + e.what()};
  }
}

crn::Vector parse_values(const std::string& csv) {
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
  crn::Vector v(static_cast<Eigen::Index>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

std::vector<int> parse_ints(const std::string& csv) {
  std::vector<int> vals;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(std::stoi(item));
  return vals;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    crn::write_file(out_path, content);
}

std::string equilibrium_row(const crn::ConservationBasis& basis, const crn::Vector& M,
                            const crn::EquilibriumPoint& eq) {
  std::string row;
  for (Eigen::Index i = 0; i < eq.c.size(); ++i) row += crn::g17(eq.c[i]) + ",";
  row += std::string(crn::to_string(eq.kind)) + ",";
  row += eq.boundary ? "boundary" : "interior";
  const double res = eq.residuals.size() ? eq.residuals.cwiseAbs().maxCoeff() : 0.0;
  const double mres = basis.m() > 0 ? (basis.Q * eq.c - M).cwiseAbs().maxCoeff() : 0.0;
  row += "," + crn::g17(res) + "," + crn::g17(mres);
  return row + "\n";
}

std::string inequality_rows_csv(const crn::InequalityReport& rep) {
  std::string out = "sample_id,ratio,case\n";
  for (const auto& row : rep.rows) {
    const char* label = row.case_label == 'I'   ? "I"
                        : row.case_label == 'J' ? "II"
                        : row.case_label == 'K' ? "III"
                                                : "-";
    out += std::to_string(row.sample_id) + "," + crn::g17(row.ratio) + "," + label + "\n";
  }
  return out;
}

crn::Grid1D sinusoidal_grid(int cells, const crn::Vector& base, const crn::Vector& amp, int mode) {
  return crn::make_grid(
      cells,
      [&](double x, int i) {
        const double wave = std::sin(2.0 * M_PI * mode * x);
        return std::max(0.0, base[i] + (amp.size() > i ? amp[i] * wave : 0.0));
      },
      static_cast<int>(base.size()));
}

void write_snapshots(const std::string& trace_path, const crn::Grid1D& grid,
                     const crn::PdeTrace& trace) {
  if (trace.snapshots.empty()) return;
  const auto dir = std::filesystem::path(trace_path.empty() ? "." : trace_path).parent_path();
  for (size_t k = 0; k < trace.snapshots.size(); ++k) {
    const auto path = dir / ("snapshot_t" + std::to_string(k) + ".csv");
    crn::write_file(path.string(), crn::snapshot_csv(grid, trace.snapshots[k].second));
  }
}

int run(int argc, char** argv) {
  CLI::App app{"mass-action reaction network toolkit"};
  app.require_subcommand(1);

  // --- validate ---------------------------------------------------------
  auto* validate =
      app.add_subcommand("validate", "check a .crn file against the well-formedness rules");
  std::string validate_path;
  validate->add_option("network", validate_path, "network file")->required();
  validate->callback([&] {
    const std::string text = read_file(validate_path);
    try {
      crn::parse_network(text);
    } catch (const crn::ParseError& e) {
      throw CliFailure{kExitValidation, validate_path + ":" + e.what()};
    }
    std::cout << validate_path << ": ok\n";
  });

  // --- conserved --------------------------------------------------------
  auto* conserved = app.add_subcommand("conserved", "print the conservation-law basis");
  std::string conserved_path;
  conserved->add_option("network", conserved_path, "network file")->required();
  conserved->callback([&] {
    const auto net = load_network(conserved_path);
    const auto basis = crn::conservation_basis(net);
    std::cout << "m," << basis.m() << "\n";
    for (const auto& row : basis.rows) {
      std::string line;
      for (const auto& x : row) {
        if (!line.empty()) line += ",";
        line += std::to_string(x.numerator());
        if (x.denominator() != 1) line += "/" + std::to_string(x.denominator());
      }
      std::cout << line << "\n";
    }
  });

  // --- equilibrium ------------------------------------------------------
  auto* equilibrium =
      app.add_subcommand("equilibrium", "positive and boundary equilibria for a mass vector");
  std::string eq_path, eq_mass;
  equilibrium->add_option("network", eq_path)->required();
  equilibrium->add_option("--mass", eq_mass, "mass vector, comma separated")->required();
  equilibrium->callback([&] {
    const auto net = load_network(eq_path);
    const auto basis = crn::conservation_basis(net);
    const crn::Vector M = parse_values(eq_mass);
    std::string out;
    for (Eigen::Index i = 0; i < net.species_count(); ++i)
      out += "c_" + std::to_string(i + 1) + ",";
    out += "kind,location,max_complex_residual,mass_residual\n";
    const auto eq = crn::solve_positive_equilibrium(net, basis, M);
    out += equilibrium_row(basis, M, eq);
    for (const auto& b : crn::boundary_equilibria(net, basis, M)) out += equilibrium_row(basis, M, b);
    std::cout << out;
  });

  // --- ode ----------------------------------------------------------------
  auto* ode = app.add_subcommand("ode", "integrate the mass-action ODE with entropy diagnostics");
  std::string ode_path, ode_c0, ode_out;
  double ode_tend = 20.0, ode_abs = 1e-10, ode_rel = 1e-8, ode_maxdt = 1.0;
  ode->add_option("network", ode_path)->required();
  ode->add_option("--c0", ode_c0, "initial state, comma separated")->required();
  ode->add_option("--t-end", ode_tend);
  ode->add_option("--abs-tol", ode_abs);
  ode->add_option("--rel-tol", ode_rel);
  ode->add_option("--max-dt", ode_maxdt);
  ode->add_option("--out", ode_out, "trace CSV path (stdout when omitted)");
  ode->callback([&] {
    const auto net = load_network(ode_path);
    crn::OdeOpts opts;
    opts.abs_tol = ode_abs;
    opts.rel_tol = ode_rel;
    opts.max_dt = ode_maxdt;
    crn::OdeTrace trace;
    try {
      trace = crn::integrate_ode(net, parse_values(ode_c0), ode_tend, opts);
    } catch (const crn::NonConvergence&) {
      throw;
    } catch (const crn::Error& e) {
      throw CliFailure{kExitIntegration, std::string("integration failed: ") + e.what()};
    }
    emit(ode_out, crn::ode_trace_csv(trace));
    std::ostream& os = ode_out.empty() ? std::cerr : std::cout;
    os << "final:";
    for (Eigen::Index i = 0; i < trace.states.back().size(); ++i)
      os << " " << crn::g17(trace.states.back()[i]);
    os << "\n";
    os << "final_complex_residual: "
       << crn::g17(crn::complex_balance_residual(net, trace.states.back()).cwiseAbs().maxCoeff())
       << "\n";
    os << "max_mass_residual: "
       << crn::g17(*std::max_element(trace.mass_residual.begin(), trace.mass_residual.end()))
       << "\n";
    long increases = 0;
    for (size_t k = 0; k + 1 < trace.size(); ++k)
      if (trace.E[k + 1] > trace.E[k] + 1e-8) ++increases;
    os << "entropy_increases: " << increases << "\n";
    os << "ktilde_ok: " << (crn::check_Ktilde(trace, trace.c_inf) ? "yes" : "no") << "\n";
    try {
      const auto fit = crn::fit_decay_rate(trace, 0.25 * ode_tend);
      os << "fit: lambda=" << crn::g17(fit.lambda) << " r2=" << crn::g17(fit.r_squared)
         << " samples=" << fit.samples << "\n";
    } catch (const crn::DomainError&) {
      os << "fit: unavailable (entropy underflow or short window)\n";
    }
  });

  // --- pde ----------------------------------------------------------------
  auto* pde = app.add_subcommand("pde", "integrate the 1-D reaction-diffusion system");
  std::string pde_path, pde_c0, pde_amp, pde_out, pde_snapshots;
  int pde_cells = 128, pde_mode = 1;
  double pde_tend = 10.0, pde_dtcap = 0.05;
  pde->add_option("network", pde_path)->required();
  pde->add_option("--c0", pde_c0, "base concentrations, comma separated")->required();
  pde->add_option("--amp", pde_amp, "sinusoidal perturbation amplitudes");
  pde->add_option("--mode", pde_mode, "perturbation wavenumber");
  pde->add_option("--cells", pde_cells);
  pde->add_option("--t-end", pde_tend);
  pde->add_option("--dt-cap", pde_dtcap);
  pde->add_option("--snapshots", pde_snapshots, "comma separated snapshot times");
  pde->add_option("--out", pde_out, "trace CSV path (stdout when omitted)");
  pde->callback([&] {
    const auto net = load_network(pde_path);
    const crn::Vector base = parse_values(pde_c0);
    crn::Vector amp = crn::Vector::Zero(base.size());
    if (!pde_amp.empty()) amp = parse_values(pde_amp);
    const auto grid0 = sinusoidal_grid(pde_cells, base, amp, pde_mode);
    crn::PdeOpts opts;
    opts.dt_cap = pde_dtcap;
    if (!pde_snapshots.empty()) {
      const crn::Vector ts = parse_values(pde_snapshots);
      opts.snapshot_times.assign(ts.data(), ts.data() + ts.size());
    }
    crn::PdeTrace trace;
    try {
      trace = crn::integrate_pde(net, grid0, pde_tend, opts);
    } catch (const crn::Error& e) {
      throw CliFailure{kExitIntegration, std::string("integration failed: ") + e.what()};
    }
    emit(pde_out, crn::pde_trace_csv(trace));
    write_snapshots(pde_out, grid0, trace);
    std::ostream& os = pde_out.empty() ? std::cerr : std::cout;
    os << "max_mass_residual: "
       << crn::g17(*std::max_element(trace.mass_residual.begin(), trace.mass_residual.end()))
       << "\n";
    long increases = 0;
    for (size_t k = 0; k + 1 < trace.size(); ++k)
      if (trace.E[k + 1] > trace.E[k] + 1e-8) ++increases;
    os << "entropy_increases: " << increases << "\n";
  });

  // --- eed ----------------------------------------------------------------
  auto* eed = app.add_subcommand("eed", "entropy-dissipation estimates and inequality suites");
  eed->require_subcommand(1);

  auto* quad = eed->add_subcommand("quadratic", "near-equilibrium quadratic form Lambda");
  std::string quad_path, quad_mass;
  quad->add_option("network", quad_path)->required();
  quad->add_option("--mass", quad_mass, "mass vector (may be empty for m = 0)");
  quad->callback([&] {
    const auto net = load_network(quad_path);
    const auto basis = crn::conservation_basis(net);
    const crn::Vector M = quad_mass.empty() ? crn::Vector() : parse_values(quad_mass);
    const auto eq = crn::solve_positive_equilibrium(net, basis, M);
    std::cout << "Lambda," << crn::g17(crn::quadratic_form_Lambda(net, eq.c, basis)) << "\n";
  });

  auto* lam = eed->add_subcommand("lambda", "constrained infimum of D/E on the mass shell");
  std::string lam_path, lam_mass, lam_caps = "1.0", lam_out;
  long lam_samples = 20000;
  unsigned long lam_seed = 0;
  double lam_domain = 1.0, lam_clsi = 0.0;
  lam->add_option("network", lam_path)->required();
  lam->add_option("--mass", lam_mass)->required();
  lam->add_option("--entropy-cap", lam_caps, "comma separated caps K; one lambda(K) row each");
  lam->add_option("--samples", lam_samples);
  lam->add_option("--seed", lam_seed);
  lam->add_option("--domain-length", lam_domain, "interval length for the PDE-level estimate");
  lam->add_option("--c-lsi", lam_clsi,
                  "log-Sobolev constant (default: Poincare surrogate pi^2/L^2)");
  lam->add_option("--out", lam_out);
  lam->callback([&] {
    const auto net = load_network(lam_path);
    const auto basis = crn::conservation_basis(net);
    const crn::Vector M = parse_values(lam_mass);
    const auto eq = crn::solve_positive_equilibrium(net, basis, M);
    const crn::Vector caps = parse_values(lam_caps);
    std::string out = "K,lambda_lo,Lambda_quadratic,lambda1,lambda_pde,witness\n";
    for (Eigen::Index i = 0; i < caps.size(); ++i) {
      crn::ConstraintSet cset{basis, M, caps[i]};
      crn::SampleBudget budget;
      budget.samples = lam_samples;
      budget.seed = lam_seed;
      const auto est = crn::estimate_lambda_ode(net, eq.c, cset, budget);
      const auto pde_est = crn::pde_lambda_estimate(
          net, lam_domain, est.lambda_lo,
          lam_clsi > 0.0 ? std::optional<double>(lam_clsi) : std::nullopt);
      out += crn::g17(caps[i]) + "," + crn::g17(est.lambda_lo) + "," +
             crn::g17(est.Lambda_quadratic) + "," + crn::g17(pde_est.lambda1) + "," +
             crn::g17(pde_est.lambda) + ",";
      for (Eigen::Index j = 0; j < est.witness.size(); ++j)
        out += (j ? ";" : "") + crn::g17(est.witness[j]);
      out += "\n";
    }
    emit(lam_out, out);
  });

  auto* fc = eed->add_subcommand("finite-cycle", "cyclic finite-dimensional inequality, brute force");
  std::string fc_alphas = "1,1,1", fc_ainf, fc_out;
  long fc_samples = 100000;
  unsigned long fc_seed = 0;
  double fc_mass = 0.0;
  int fc_n = 0;
  fc->add_option("--n", fc_n, "shorthand for --alphas 1,...,1 with n entries");
  fc->add_option("--alphas", fc_alphas);
  fc->add_option("--a-inf", fc_ainf,
                 "equilibrium sqrt-amplitudes A_inf (default: from --mass with unit rates)");
  fc->add_option("--mass", fc_mass, "mass used to derive A_inf when --a-inf is omitted");
  fc->add_option("--samples", fc_samples);
  fc->add_option("--seed", fc_seed);
  fc->add_option("--out", fc_out, "per-sample CSV");
  fc->callback([&] {
    const auto alphas = fc_n > 0 ? std::vector<int>(fc_n, 1) : parse_ints(fc_alphas);
    const int N = static_cast<int>(alphas.size());
    crn::Vector A_inf;
    if (!fc_ainf.empty()) {
      A_inf = parse_values(fc_ainf);
    } else {
      const double mass = fc_mass > 0.0 ? fc_mass : static_cast<double>(N);
      const auto eq = crn::solve_cyclic_equilibrium(alphas, std::vector<double>(N, 1.0), mass);
      A_inf = eq.point.c.cwiseSqrt();
    }
    const auto rep =
        crn::verify_finite_cycle_inequality(alphas, A_inf, fc_samples, fc_seed, !fc_out.empty());
    if (!fc_out.empty()) crn::write_file(fc_out, inequality_rows_csv(rep));
    std::cout << "samples: " << rep.samples << ", redraws: " << rep.redraws
              << ", violations: " << rep.violations << ", min_ratio = " << crn::g17(rep.min_ratio)
              << " (bound " << crn::g17(std::pow(double(N), -N)) << ")\n";
    if (rep.violations > 0) throw CliFailure{kExitViolation, "inequality violations found"};
  });

  auto* g6 = eed->add_subcommand(
      "g6", "3x3 finite-dimensional inequality with K5 = min(eps^2/B_inf^2,1)/4");
  std::string g6_k = "1,1,1", g6_out;
  double g6_mass = 4.0, g6_eps = 0.5;
  long g6_samples = 100000;
  unsigned long g6_seed = 0;
  g6->add_option("--k", g6_k, "rates k1,k2,k3");
  g6->add_option("--mass", g6_mass);
  g6->add_option("--epsilon", g6_eps);
  g6->add_option("--samples", g6_samples);
  g6->add_option("--seed", g6_seed);
  g6->add_option("--out", g6_out, "per-sample CSV");
  g6->callback([&] {
    const crn::Vector ks = parse_values(g6_k);
    const Eigen::Vector3d c_inf = crn::equilibrium_3x3(ks[0], ks[1], ks[2], g6_mass);
    const auto rep = crn::verify_3x3_inequality(c_inf, g6_eps, g6_samples, g6_seed, !g6_out.empty());
    if (!g6_out.empty()) crn::write_file(g6_out, inequality_rows_csv(rep));
    const double K5 = 0.25 * std::min(g6_eps * g6_eps / c_inf[1], 1.0);
    std::cout << "samples: " << rep.samples << ", redraws: " << rep.redraws
              << ", violations: " << rep.violations << ", min_ratio = " << crn::g17(rep.min_ratio)
              << " (K5 " << crn::g17(K5) << "), cases I/II/III: " << rep.case_counts[0] << "/"
              << rep.case_counts[1] << "/" << rep.case_counts[2] << "\n";
    if (rep.violations > 0) throw CliFailure{kExitViolation, "inequality violations found"};
  });

  auto* avg =
      eed->add_subcommand("averaged-cycle", "sampled averaged inequality for homogeneous states");
  std::string avg_alphas = "1,1", avg_ks = "1,1";
  double avg_mass = 2.0, avg_eps = 0.1;
  long avg_samples = 100000;
  unsigned long avg_seed = 0;
  avg->add_option("--alphas", avg_alphas);
  avg->add_option("--ks", avg_ks);
  avg->add_option("--mass", avg_mass);
  avg->add_option("--epsilon", avg_eps);
  avg->add_option("--samples", avg_samples);
  avg->add_option("--seed", avg_seed);
  avg->callback([&] {
    const auto alphas = parse_ints(avg_alphas);
    const crn::Vector ksv = parse_values(avg_ks);
    const std::vector<double> ks(ksv.data(), ksv.data() + ksv.size());
    const auto rep =
        crn::verify_averaged_cyclic_inequality(alphas, ks, avg_mass, avg_eps, avg_samples, avg_seed);
    std::cout << "samples: " << rep.samples << ", K2 = " << crn::g17(rep.K2)
              << ", K3_sampled = " << crn::g17(rep.K3_sampled)
              << ", small-support samples: " << rep.case_small << "\n";
    if (!(rep.K3_sampled > 0.0)) throw CliFailure{kExitViolation, "averaged ratio not positive"};
  });

  // --- experiment -------------------------------------------------------
  auto* exp = app.add_subcommand("experiment", "named preset scenarios");
  exp->require_subcommand(1);

  auto* smooth =
      exp->add_subcommand("2x2-smooth", "smooth-data 2x2 run with bound and decay checks");
  int smooth_cells = 256;
  double smooth_tend = 20.0;
  std::string smooth_out;
  smooth->add_option("--cells", smooth_cells);
  smooth->add_option("--t-end", smooth_tend);
  smooth->add_option("--out", smooth_out);
  smooth->callback([&] {
    const auto net = crn::make_2x2();
    const auto grid0 = crn::make_grid(
        smooth_cells,
        [](double x, int i) { return 1.0 + (i == 0 ? 0.4 : -0.4) * std::sin(2.0 * M_PI * x); }, 2);
    const double eps = std::sqrt(0.6), Lambda = 1.4;
    auto rep = crn::experiment_2x2_bounds(net, grid0, eps, Lambda, smooth_tend);
    if (!smooth_out.empty()) crn::write_file(smooth_out, crn::pde_trace_csv(rep.trace));
    const double max_mass =
        *std::max_element(rep.trace.mass_residual.begin(), rep.trace.mass_residual.end());
    long increases = 0;
    for (size_t k = 0; k + 1 < rep.trace.size(); ++k)
      if (rep.trace.E[k + 1] > rep.trace.E[k] + 1e-8) ++increases;
    std::cout << "bounds_ok: " << (rep.bounds_ok ? "yes" : "no") << "\n";
    std::cout << "max_mass_residual: " << crn::g17(max_mass) << "\n";
    std::cout << "entropy_increases: " << increases << "\n";
    std::cout << "final_l2_gap_sq: " << crn::g17(rep.l2_distance_sq.back()) << "\n";
    std::cout << "fitted_rate: " << crn::g17(rep.fitted_rate) << " r2: " << crn::g17(rep.r_squared)
              << "\n";
    if (!rep.bounds_ok || increases > 0) throw CliFailure{kExitViolation, "invariant violated"};
  });

  auto* bounds = exp->add_subcommand("2x2-bounds", "propagation of eps^2 <= a,b <= Lambda");
  double b_eps = 0.5, b_upper = 2.0, b_tend = 20.0;
  int b_cells = 256;
  std::string bounds_out;
  bounds->add_option("--epsilon", b_eps);
  bounds->add_option("--upper", b_upper);
  bounds->add_option("--t-end", b_tend);
  bounds->add_option("--cells", b_cells);
  bounds->add_option("--out", bounds_out);
  bounds->callback([&] {
    const auto net = crn::make_2x2();
    const double lo = b_eps * b_eps;
    // a mixed across the box, b pinned at the floor: keeps the slow reaction
    // mode alive so the reported decay rate reflects the mass.
    const auto grid0 = crn::make_grid(
        b_cells,
        [&](double x, int i) {
          return i == 0 ? lo + (b_upper - lo) * 0.5 * (1.0 + std::sin(2.0 * M_PI * x)) : lo;
        },
        2);
    auto rep = crn::experiment_2x2_bounds(net, grid0, b_eps, b_upper, b_tend);
    if (!bounds_out.empty()) crn::write_file(bounds_out, crn::pde_trace_csv(rep.trace));
    std::cout << "bounds_ok: " << (rep.bounds_ok ? "yes" : "no") << "\n";
    if (rep.violation)
      std::cout << "violation: t=" << crn::g17(rep.violation->t) << " cell=" << rep.violation->cell
                << " species=" << rep.violation->species
                << " value=" << crn::g17(rep.violation->value) << "\n";
    std::cout << "fitted_rate: " << crn::g17(rep.fitted_rate) << " r2: " << crn::g17(rep.r_squared)
              << "\n";
    if (!rep.bounds_ok) throw CliFailure{kExitViolation, "bound violated"};
  });

  auto* lower = exp->add_subcommand("3x3-lower-bound", "algebraic lower bound for b");
  double l_b0 = 1.0, l_k3 = 1.0, l_tend = 50.0, l_dtcap = 0.01;
  int l_cells = 128, l_alpha = 1;
  std::string lower_out;
  lower->add_option("--b0", l_b0);
  lower->add_option("--k3", l_k3);
  lower->add_option("--t-end", l_tend);
  lower->add_option("--cells", l_cells);
  lower->add_option("--alpha", l_alpha);
  lower->add_option("--dt-cap", l_dtcap);
  lower->add_option("--out", lower_out);
  lower->callback([&] {
    const auto net = l_alpha == 1 ? crn::make_3x3(1.0, 1.0, l_k3)
                                  : crn::make_generalized_3x3(l_alpha, 1.0, 1.0, l_k3);
    crn::Vector c0(3);
    c0 << 0.0, l_b0, 0.0;
    const auto grid0 = crn::make_constant_grid(l_cells, c0);
    crn::PdeOpts opts;
    opts.dt_cap = l_dtcap;
    auto rep = crn::experiment_3x3_lower_bound(net, grid0, l_k3, l_tend, l_alpha, opts);
    if (!lower_out.empty()) crn::write_file(lower_out, crn::pde_trace_csv(rep.trace));
    std::cout << "bound_ok: " << (rep.ok ? "yes" : "no") << "\n";
    std::cout << "min_margin: " << crn::g17(rep.min_margin) << "\n";
    if (rep.violation)
      std::cout << "violation: t=" << crn::g17(rep.violation->t) << " cell=" << rep.violation->cell
                << " value=" << crn::g17(rep.violation->value) << "\n";
    if (!rep.ok) throw CliFailure{kExitViolation, "lower bound violated"};
  });

  auto* bc = exp->add_subcommand("boundary-convergence", "heat-equation decay toward (0,0,M)");
  double bc_mass = 1.0, bc_amp = 0.3, bc_dc = 1.0, bc_tend = 1.2, bc_dtcap = 5e-4;
  int bc_cells = 256;
  std::string bc_out;
  bc->add_option("--mass", bc_mass);
  bc->add_option("--amp", bc_amp);
  bc->add_option("--dc", bc_dc);
  bc->add_option("--t-end", bc_tend);
  bc->add_option("--cells", bc_cells);
  bc->add_option("--dt-cap", bc_dtcap);
  bc->add_option("--out", bc_out);
  bc->callback([&] {
    const auto net = crn::make_3x3(1.0, 1.0, 1.0, 1.0, 1.0, bc_dc);
    const auto grid0 = crn::make_grid(
        bc_cells, [&](double x, int i) { return i == 2 ? bc_mass + bc_amp * std::cos(M_PI * x) : 0.0; },
        3);
    crn::PdeOpts opts;
    opts.dt_cap = bc_dtcap;
    auto rep = crn::experiment_boundary_convergence(net, grid0, bc_tend, opts);
    if (!bc_out.empty()) crn::write_file(bc_out, crn::pde_trace_csv(rep.trace));
    const double target = 2.0 * bc_dc * M_PI * M_PI;
    std::cout << "exponent: " << crn::g17(rep.exponent) << " (target " << crn::g17(target)
              << ", rel err " << crn::g17(std::abs(rep.exponent - target) / target) << ")\n";
    std::cout << "r2: " << crn::g17(rep.r_squared) << "\n";
    std::cout << "ab_max: " << crn::g17(rep.ab_max) << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const CliFailure& f) {
    std::cerr << f.message << "\n";
    return f.code;
  } catch (const crn::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const crn::NonConvergence& e) {
    std::cerr << "solver did not converge: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const crn::NotComplexBalanced& e) {
    std::cerr << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const crn::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitIntegration;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
