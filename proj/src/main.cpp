#include "crestwave/corner_laplace.hpp"
#include "crestwave/corner_ode.hpp"
#include "crestwave/evolution.hpp"
#include "crestwave/report.hpp"
#include "crestwave/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace cw = crestwave;
using nlohmann::json;

namespace {

int max_workers() {
  if (const char* env = std::getenv("CRESTWAVE_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? int(hw) : 1;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw cw::config_error("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw cw::config_error(std::string("malformed config JSON: ") + e.what());
  }
  if (!j.is_object()) throw cw::config_error("config must be a flat JSON object");
  return j;
}

// flat-JSON config values fill in flags the user did not pass explicitly
template <typename T>
void apply_config(const json& cfg, const CLI::App& app, const std::string& flag,
                  const std::string& key, T& var) {
  const CLI::Option* opt = app.get_option(flag);
  if (opt && opt->count() > 0) return;
  if (cfg.contains(key)) var = cfg.at(key).get<T>();
}

cw::cplx parse_pair(const std::vector<double>& v) {
  return v.size() == 2 ? cw::cplx(v[0], v[1]) : cw::cplx(0, 0);
}

// ------------------------------------------------------------------- ode

struct OdeArgs {
  double two_nu = 3.0 * cw::kPi / 8.0;
  double nu_plus = std::numeric_limits<double>::quiet_NaN();
  double nu_minus = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> b0{0.0, 0.0};
  std::vector<double> b1{1.0, 0.0};
  double gravity = 0.0;
  double t_end = 10.0;
  double dt0 = 1e-3;
  double rtol = 1e-10;
  double r_max = 1e8;
  double eps_stop = 1e-4;
  bool periodic = false;
  std::string out_csv, out_report, config;
  int sweep = 20;
  double perturb = 0.01;
  std::uint64_t seed = 1;
};

cw::CornerState initial_state(const OdeArgs& a) {
  cw::CornerState s;
  if (std::isnan(a.nu_plus) || std::isnan(a.nu_minus)) {
    if (!(a.two_nu > 0.0 && a.two_nu < 0.5 * cw::kPi))
      throw cw::config_error("two_nu must lie in (0, pi/2)");
    s.nu_plus = 0.5 * (a.two_nu - cw::kPi);
    s.nu_minus = -s.nu_plus;
  } else {
    s.nu_plus = a.nu_plus;
    s.nu_minus = a.nu_minus;
  }
  s.b0 = parse_pair(a.b0);
  s.b1 = parse_pair(a.b1);
  s.g = a.gravity;
  return s;
}

int run_ode(const OdeArgs& a, bool blowup_sweep) {
  cw::OdeControls ctl;
  ctl.rtol = a.rtol;
  ctl.R_max = a.r_max;
  ctl.eps_stop = a.eps_stop;
  ctl.periodic = a.periodic;
  cw::CornerState s0 = initial_state(a);

  if (!blowup_sweep) {
    cw::OdeRun run = cw::integrate(s0, a.t_end, a.dt0, ctl);
    if (!a.out_csv.empty()) cw::write_ode_csv(a.out_csv, run.trajectory);
    std::string rep = cw::blowup_report_json(run.report);
    if (!a.out_report.empty())
      cw::write_text(a.out_report, rep);
    else
      std::cout << rep;
    return 0;
  }

  // perturbation sweep: pre-seeded slots, ordered aggregation, worker fan-out
  const int m = a.sweep;
  std::vector<cw::CornerState> seeds(m);
  for (int i = 0; i < m; ++i) {
    cw::FieldRng rng(a.seed + 1000003ull * std::uint64_t(i));
    cw::CornerState s = s0;
    auto jitter = [&](double v) { return v * (1.0 + a.perturb * (2.0 * rng.uniform() - 1.0)); };
    s.nu_plus = jitter(s.nu_plus);
    s.nu_minus = jitter(s.nu_minus);
    s.b1 = cw::cplx(jitter(s.b1.real()), s.b1.imag() + a.perturb * (2.0 * rng.uniform() - 1.0) *
                                                           std::abs(s.b1));
    seeds[i] = s;
  }
  std::vector<cw::BlowupReport> reports(m);
  std::vector<std::string> errors(m);
  int workers = std::min(max_workers(), m);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w]() {
      for (int i = w; i < m; i += workers) {
        try {
          reports[i] = cw::integrate(seeds[i], a.t_end, a.dt0, ctl).report;
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }
    });
  for (auto& th : pool) th.join();

  int blew = 0;
  json j;
  j["sweep"] = m;
  j["perturb"] = a.perturb;
  json runs = json::array();
  for (int i = 0; i < m; ++i) {
    json r;
    r["index"] = i;
    if (!errors[i].empty()) {
      r["error"] = errors[i];
    } else {
      r["blew_up"] = reports[i].blew_up;
      r["terminal_two_nu"] = reports[i].terminal_two_nu;
      r["rate_exponent"] = reports[i].rate_exponent;
      if (reports[i].blew_up) ++blew;
    }
    runs.push_back(r);
  }
  j["blew_up_count"] = blew;
  j["runs"] = runs;
  std::string rep = j.dump(2) + "\n";
  if (!a.out_report.empty())
    cw::write_text(a.out_report, rep);
  else
    std::cout << rep;
  return blew == m ? 0 : 3;
}

// --------------------------------------------------------------- laplace

int run_laplace_dtn(const std::string& shape, int mode, int n, const std::string& out_csv) {
  cw::WeightedGrid g = cw::make_grid(n);
  cw::CurveSamples c;
  cw::VectorXd psi(n), expect(n);
  if (shape == "disk") {
    c.z.resize(n);
    c.z_alpha.resize(n);
    c.z_star = cw::cplx(0, 0);
    for (int j = 0; j < n; ++j) {
      c.z[j] = std::exp(cw::cplx(0, -g.nodes[j]));  // clockwise circle
      c.z_alpha[j] = cw::cplx(0, -1) * c.z[j];
      double theta = -g.nodes[j];
      psi[j] = std::cos(mode * theta);
      expect[j] = mode * std::cos(mode * theta);
    }
  } else if (shape == "fixture") {
    cw::CornerInterface iface = cw::make_corner_fixture(0.9, 0.1, g);
    c = cw::reconstruct_curve(iface, g).curve;
    for (int j = 0; j < n; ++j)
      psi[j] = g.weights_m[j] * g.weights_m[j] * std::cos(mode * g.nodes[j]);
    expect.setZero();
  } else {
    throw cw::config_error("laplace dtn: unknown shape " + shape);
  }
  cw::VectorXd gpsi = cw::dtn_apply(psi, c, g);
  json j;
  j["shape"] = shape;
  j["mode"] = mode;
  j["n"] = n;
  if (shape == "disk") {
    double err = (gpsi - expect).lpNorm<Eigen::Infinity>() / std::max(1, mode);
    j["max_rel_error"] = err;
  }
  double flux = 0.0;
  for (int j2 = 0; j2 < n; ++j2) flux += gpsi[j2] * std::abs(c.z_alpha[j2]) * g.h;
  j["flux"] = flux;
  std::cout << j.dump(2) << "\n";
  if (!out_csv.empty()) {
    std::vector<std::vector<double>> rows;
    for (int j2 = 0; j2 < n; ++j2) rows.push_back({g.nodes[j2], gpsi[j2]});
    cw::write_csv(out_csv, {"alpha", "dtn"}, rows);
  }
  return 0;
}

int run_laplace_strip(double nu, const std::string& data, int mx, int my, double L,
                      double c_plus, double c_minus, const std::string& out_csv) {
  if (!(nu > 0.0 && 2.0 * nu < 0.5 * cw::kPi))
    throw cw::config_error("laplace strip: nu must satisfy 2 nu in (0, pi/2)");
  cw::DiffeoTables t = cw::exact_wedge_tables(2.0 * nu, L, 0.0, mx);
  cw::StripSolution sol;
  json j;
  j["nu"] = nu;
  j["mx"] = mx;
  j["my"] = my;
  if (data == "quadratic") {
    cw::QuadraticExtension q = cw::quadratic_data_extension(0.0, 0.0, c_plus, c_minus, nu);
    auto top = [&](double x) { return c_plus * std::exp(2.0 * x); };
    auto bottom = [&](double x) { return c_minus * std::exp(2.0 * x); };
    auto right = [&](double y) {
      return (q.a_plus * std::exp(cw::cplx(0, 2.0 * y)) +
              q.a_minus * std::exp(cw::cplx(0, -2.0 * y)))
          .real();
    };
    sol = cw::solve_strip(
        t, my, [](double, double) { return 0.0; }, bottom, top, right);
    // recover the mode coefficient from the interior solution at mid-strip
    double xm = 0.5 * (t.x[0] + t.x_max);
    int im = int(std::lround((xm - t.x[0]) / t.hx));
    xm = t.x[im];
    double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
    for (int jy = 0; jy <= my; ++jy) {
      double y = sol.ys[jy];
      double b1 = 2.0 * std::cos(2.0 * y), b2 = -2.0 * std::sin(2.0 * y);
      double v = sol.U(im, jy) / std::exp(2.0 * xm);
      s11 += b1 * b1;
      s12 += b1 * b2;
      s22 += b2 * b2;
      r1 += b1 * v;
      r2 += b2 * v;
    }
    double det = s11 * s22 - s12 * s12;
    cw::cplx a_fit((s22 * r1 - s12 * r2) / det, (s11 * r2 - s12 * r1) / det);
    j["a_plus_closed_form"] = {q.a_plus.real(), q.a_plus.imag()};
    j["a_plus_fitted"] = {a_fit.real(), a_fit.imag()};
    j["a_plus_error"] = std::abs(a_fit - q.a_plus);
  } else if (data == "mode") {
    double mu = cw::kPi / (4.0 * nu);
    auto top = [&](double x) { return std::cos(mu * nu) * std::exp(mu * x); };
    auto bottom = top;
    auto right = [&](double y) { return std::cos(mu * y); };
    sol = cw::solve_strip(
        t, my, [](double, double) { return 0.0; }, bottom, top, right);
    double err = 0.0;
    for (int i = 0; i < int(t.x.size()); ++i)
      for (int jy = 0; jy <= my; ++jy)
        err = std::max(err, std::abs(sol.U(i, jy) -
                                     std::exp(mu * t.x[i]) * std::cos(mu * sol.ys[jy])));
    j["mode_error"] = err;
  } else {
    throw cw::config_error("laplace strip: unknown data " + data);
  }
  j["residual"] = sol.residual;
  std::cout << j.dump(2) << "\n";
  if (!out_csv.empty()) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < int(t.x.size()); ++i)
      for (int jy = 0; jy <= my; ++jy) rows.push_back({t.x[i], sol.ys[jy], sol.U(i, jy)});
    cw::write_csv(out_csv, {"x", "y", "U"}, rows);
  }
  return 0;
}

// ---------------------------------------------------------------- evolve

struct EvolveArgs {
  std::string state_file, out_dir = ".", config;
  double two_nu = 0.9, perturb = 0.1;
  int n = 128;
  std::vector<double> b0{0.0, 0.0};
  std::vector<double> b1{0.05, 0.0};
  double gravity = 0.0;
  double eps = 1e-3, delta = 0.0, dt = 0.0;
  int steps = 20, snapshot_every = 10;
  int k = 2;
  double beta = 0.25;
};

cw::FullState evolve_initial_state(const EvolveArgs& a, cw::WeightedGrid& g) {
  cw::FullState s;
  if (!a.state_file.empty()) {
    s = cw::load_state_json(a.state_file);
    g = cw::make_grid(int(s.iface.Theta.size()));
    return s;
  }
  g = cw::make_grid(a.n);
  s.iface = cw::make_corner_fixture(a.two_nu, a.perturb, g);
  s.vel.b0 = parse_pair(a.b0);
  s.vel.b1 = parse_pair(a.b1);
  s.vel.W = cw::VectorXcd::Zero(a.n);
  s.gravity = a.gravity;
  s.params = cw::make_space_params(a.k, a.beta);
  return s;
}

int run_evolve(const EvolveArgs& a) {
  cw::WeightedGrid g;
  cw::FullState s = evolve_initial_state(a, g);
  std::filesystem::create_directories(a.out_dir);
  double dt = a.dt;
  if (dt <= 0.0) dt = 0.5 * cw::cfl_cap(s, a.delta, g, 0.5);
  std::vector<std::vector<double>> rows;
  double t = 0.0;
  for (int step_i = 0; step_i <= a.steps; ++step_i) {
    cw::Monitors mon = cw::monitors(s, g);
    cw::EnergyReport er = cw::energy(s, a.eps, g);
    cw::ConstraintDefects defects = cw::constraint_defects(s, g);
    rows.push_back({t, er.E_low, er.E_high, mon.rt_ratio_min, mon.arc_chord,
                    s.iface.nu_plus, s.iface.nu_minus, std::abs(s.vel.b1), defects.closure,
                    defects.w_integral});
    if (!er.finite) throw cw::numeric_error("evolve: non-finite energy at step " +
                                            std::to_string(step_i));
    if (a.snapshot_every > 0 && step_i % a.snapshot_every == 0)
      cw::save_state_json(a.out_dir + "/state_" + std::to_string(step_i) + ".json", s);
    if (step_i == a.steps) break;
    s = cw::step(s, dt, a.eps, a.delta, g);
    t += dt;
  }
  cw::write_csv(a.out_dir + "/monitors.csv",
                {"t", "E_low", "E_high", "rt_ratio_min", "arc_chord", "nu_plus", "nu_minus",
                 "abs_b1", "closure_defect", "w_defect"},
                rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crestwave: corner water-wave numerics"};
  app.require_subcommand(1);

  // ode
  OdeArgs oa;
  CLI::App* ode = app.add_subcommand("ode", "corner-dynamics parameter ODE");
  ode->require_subcommand(1);
  CLI::App* ode_run = ode->add_subcommand("run", "integrate one trajectory");
  CLI::App* ode_blow = ode->add_subcommand("blowup", "perturbation sweep of a blow-up seed");
  for (CLI::App* sub : {ode_run, ode_blow}) {
    sub->add_option("--two-nu", oa.two_nu, "corner angle (symmetric seed)");
    sub->add_option("--nu-plus", oa.nu_plus);
    sub->add_option("--nu-minus", oa.nu_minus);
    sub->add_option("--b0", oa.b0, "b0 as re,im")->expected(2)->delimiter(',');
    sub->add_option("--b1", oa.b1, "b1 as re,im")->expected(2)->delimiter(',');
    sub->add_option("--g", oa.gravity);
    sub->add_option("--t-end", oa.t_end);
    sub->add_option("--dt0", oa.dt0);
    sub->add_option("--rtol", oa.rtol);
    sub->add_option("--r-max", oa.r_max);
    sub->add_option("--eps-stop", oa.eps_stop);
    sub->add_flag("--periodic", oa.periodic);
    sub->add_option("--out", oa.out_csv, "trajectory CSV path");
    sub->add_option("--report", oa.out_report, "report JSON path");
    sub->add_option("--config", oa.config, "flat JSON config file");
  }
  ode_blow->add_option("--sweep", oa.sweep);
  ode_blow->add_option("--perturb", oa.perturb);
  ode_blow->add_option("--seed", oa.seed);

  // verify
  std::string suite = "hilbert";
  int vn = 512;
  double vgamma = 0.25;
  std::uint64_t vseed = 7;
  std::string vout;
  CLI::App* verify = app.add_subcommand("verify", "operator-inequality suites");
  verify->add_option("suite", suite, "suite name or 'all'")->required();
  verify->add_option("--n", vn);
  verify->add_option("--gamma", vgamma);
  verify->add_option("--seed", vseed);
  verify->add_option("--out", vout, "report JSON path");

  // laplace
  CLI::App* laplace = app.add_subcommand("laplace", "strip / DtN solvers");
  laplace->require_subcommand(1);
  std::string shape = "disk", ldata = "quadratic", lout;
  int mode = 4, ln = 256, mx = 256, my = 64;
  double lnu = cw::kPi / 8.0, lL = 6.0, lcp = -0.5, lcm = -0.5;
  CLI::App* ldtn = laplace->add_subcommand("dtn", "Dirichlet-to-Neumann on a curve");
  ldtn->add_option("--shape", shape, "disk | fixture");
  ldtn->add_option("--mode", mode);
  ldtn->add_option("--n", ln);
  ldtn->add_option("--out", lout, "CSV path");
  CLI::App* lstrip = laplace->add_subcommand("strip", "truncated-strip solve");
  lstrip->add_option("--nu", lnu, "wedge half-angle");
  lstrip->add_option("--data", ldata, "quadratic | mode");
  lstrip->add_option("--mx", mx);
  lstrip->add_option("--my", my);
  lstrip->add_option("--L", lL);
  lstrip->add_option("--c-plus", lcp);
  lstrip->add_option("--c-minus", lcm);
  lstrip->add_option("--out", lout, "CSV path");

  // evolve
  EvolveArgs ea;
  CLI::App* evolve = app.add_subcommand("evolve", "regularized interface evolution");
  evolve->add_option("--config", ea.config, "flat JSON config file");
  evolve->add_option("--state", ea.state_file, "initial state JSON");
  evolve->add_option("--out", ea.out_dir, "output directory");
  evolve->add_option("--two-nu", ea.two_nu);
  evolve->add_option("--perturb", ea.perturb);
  evolve->add_option("--n", ea.n);
  evolve->add_option("--b0", ea.b0)->expected(2)->delimiter(',');
  evolve->add_option("--b1", ea.b1)->expected(2)->delimiter(',');
  evolve->add_option("--g", ea.gravity);
  evolve->add_option("--eps", ea.eps);
  evolve->add_option("--delta", ea.delta);
  evolve->add_option("--dt", ea.dt, "0 means use the stability cap");
  evolve->add_option("--steps", ea.steps);
  evolve->add_option("--snapshot-every", ea.snapshot_every);
  evolve->add_option("--k", ea.k);
  evolve->add_option("--beta", ea.beta);

  // energy
  std::string estate;
  double eeps = 0.0;
  CLI::App* energy_cmd = app.add_subcommand("energy", "energy report for a state JSON");
  energy_cmd->add_option("state", estate)->required();
  energy_cmd->add_option("--eps", eeps);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (ode_run->parsed() || ode_blow->parsed()) {
      json cfg = load_config(oa.config);
      CLI::App* sub = ode_run->parsed() ? ode_run : ode_blow;
      apply_config(cfg, *sub, "--two-nu", "two_nu", oa.two_nu);
      apply_config(cfg, *sub, "--g", "g", oa.gravity);
      apply_config(cfg, *sub, "--t-end", "t_end", oa.t_end);
      apply_config(cfg, *sub, "--dt0", "dt0", oa.dt0);
      apply_config(cfg, *sub, "--rtol", "rtol", oa.rtol);
      apply_config(cfg, *sub, "--r-max", "r_max", oa.r_max);
      apply_config(cfg, *sub, "--eps-stop", "eps_stop", oa.eps_stop);
      return run_ode(oa, ode_blow->parsed());
    }
    if (verify->parsed()) {
      std::vector<std::string> names =
          suite == "all" ? cw::verify_suite_names() : std::vector<std::string>{suite};
      bool all_pass = true;
      std::string out;
      for (const std::string& name : names) {
        cw::SuiteReport rep = cw::verify_suite(name, vn, vgamma, vseed);
        out += cw::suite_report_json(rep);
        all_pass = all_pass && rep.pass;
      }
      if (!vout.empty())
        cw::write_text(vout, out);
      else
        std::cout << out;
      return all_pass ? 0 : 3;
    }
    if (ldtn->parsed()) return run_laplace_dtn(shape, mode, ln, lout);
    if (lstrip->parsed()) return run_laplace_strip(lnu, ldata, mx, my, lL, lcp, lcm, lout);
    if (evolve->parsed()) {
      json cfg = load_config(ea.config);
      apply_config(cfg, *evolve, "--two-nu", "two_nu", ea.two_nu);
      apply_config(cfg, *evolve, "--perturb", "perturb", ea.perturb);
      apply_config(cfg, *evolve, "--n", "n", ea.n);
      apply_config(cfg, *evolve, "--g", "g", ea.gravity);
      apply_config(cfg, *evolve, "--eps", "eps", ea.eps);
      apply_config(cfg, *evolve, "--delta", "delta", ea.delta);
      apply_config(cfg, *evolve, "--dt", "dt", ea.dt);
      apply_config(cfg, *evolve, "--steps", "steps", ea.steps);
      apply_config(cfg, *evolve, "--state", "state", ea.state_file);
      return run_evolve(ea);
    }
    if (energy_cmd->parsed()) {
      cw::FullState s = cw::load_state_json(estate);
      cw::WeightedGrid g = cw::make_grid(int(s.iface.Theta.size()));
      cw::EnergyReport rep = cw::energy(s, eeps, g);
      json j;
      j["E_low"] = rep.E_low;
      j["E_high"] = rep.E_high;
      j["E_total"] = rep.E_total;
      j["finite"] = rep.finite;
      for (const auto& kv : rep.components) j["components"][kv.first] = kv.second;
      std::cout << j.dump(2) << "\n";
      return rep.finite ? 0 : 3;
    }
  } catch (const cw::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cw::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
