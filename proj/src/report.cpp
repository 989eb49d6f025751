#include "crestwave/report.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

namespace crestwave {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot open output file " + path);
  out << content;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::string buf;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) buf += ',';
    buf += header[i];
  }
  buf += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) buf += ',';
      buf += format_double(row[i]);
    }
    buf += '\n';
  }
  write_text(path, buf);
}

void write_ode_csv(const std::string& path, const std::vector<CornerState>& traj) {
  std::vector<std::vector<double>> rows;
  rows.reserve(traj.size());
  for (const CornerState& s : traj) {
    PolarState p = to_polar(s);
    double q = 0.0;
    try {
      q = conserved_quantity(p);
    } catch (const numeric_error&) {
      q = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back({s.t, s.nu_plus, s.nu_minus, 2.0 * p.nu, s.b0.real(), s.b0.imag(),
                    s.b1.real(), s.b1.imag(), p.R, p.psi, q, s.z_star.real(),
                    s.z_star.imag()});
  }
  write_csv(path,
            {"t", "nu_plus", "nu_minus", "two_nu", "b0_re", "b0_im", "b1_re", "b1_im", "R",
             "psi", "conserved", "zstar_re", "zstar_im"},
            rows);
}

namespace {

json raw_number(double v) {
  // keep NaN/inf representable as strings; json numbers render via dump()
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

std::string blowup_report_json(const BlowupReport& rep) {
  json j;
  j["stop_reason"] = rep.stop_reason;
  j["blew_up"] = rep.blew_up;
  j["T_fit"] = raw_number(rep.T_fit);
  j["rate_exponent"] = raw_number(rep.rate_exponent);
  j["rate_spread"] = raw_number(rep.rate_spread);
  j["terminal_two_nu"] = raw_number(rep.terminal_two_nu);
  j["conserved_drift"] = raw_number(rep.conserved_drift);
  j["steps"] = rep.steps;
  return j.dump(2) + "\n";
}

std::string suite_report_json(const SuiteReport& rep) {
  json j;
  j["suite"] = rep.suite;
  j["n"] = rep.n;
  j["gamma"] = rep.gamma;
  j["fitted_C"] = raw_number(rep.fitted_C);
  j["fitted_C_refined"] = raw_number(rep.fitted_C_refined);
  j["pass"] = rep.pass;
  if (!rep.note.empty()) j["note"] = rep.note;
  for (const auto& kv : rep.details) j["details"][kv.first] = raw_number(kv.second);
  return j.dump(2) + "\n";
}

void save_state_json(const std::string& path, const FullState& s) {
  json j;
  j["z_star"] = {s.iface.z_star.real(), s.iface.z_star.imag()};
  j["nu_plus"] = s.iface.nu_plus;
  j["nu_minus"] = s.iface.nu_minus;
  j["b0"] = {s.vel.b0.real(), s.vel.b0.imag()};
  j["b1"] = {s.vel.b1.real(), s.vel.b1.imag()};
  j["g"] = s.gravity;
  j["k"] = s.params.k;
  j["beta"] = s.params.beta;
  j["n"] = int(s.iface.Theta.size());
  auto put = [&](const char* key, const VectorXd& v) {
    std::vector<double> vals(v.data(), v.data() + v.size());
    j[key] = vals;
  };
  put("Theta", s.iface.Theta);
  put("log_mod_zalpha", s.iface.log_mod_zalpha);
  put("W_re", s.vel.W.real());
  put("W_im", s.vel.W.imag());
  write_text(path, j.dump(2) + "\n");
}

FullState load_state_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open state file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw config_error(std::string("malformed state JSON: ") + e.what());
  }
  FullState s;
  try {
    s.iface.z_star = cplx(j.at("z_star")[0], j.at("z_star")[1]);
    s.iface.nu_plus = j.at("nu_plus");
    s.iface.nu_minus = j.at("nu_minus");
    s.vel.b0 = cplx(j.at("b0")[0], j.at("b0")[1]);
    s.vel.b1 = cplx(j.at("b1")[0], j.at("b1")[1]);
    s.gravity = j.value("g", 0.0);
    int k = j.value("k", 2);
    double beta = j.value("beta", 0.25);
    s.params = make_space_params(k, beta);
    int n = j.at("n");
    auto get = [&](const char* key) {
      std::vector<double> vals = j.at(key).get<std::vector<double>>();
      if (int(vals.size()) != n) throw config_error("state field size mismatch");
      return Eigen::Map<const VectorXd>(vals.data(), n).eval();
    };
    s.iface.Theta = get("Theta");
    s.iface.log_mod_zalpha = get("log_mod_zalpha");
    VectorXd wr = get("W_re"), wi = get("W_im");
    s.vel.W.resize(n);
    for (int i = 0; i < n; ++i) s.vel.W[i] = cplx(wr[i], wi[i]);
  } catch (const json::exception& e) {
    throw config_error(std::string("invalid state JSON: ") + e.what());
  }
  return s;
}

}  // namespace crestwave
