#pragma once

// Artifact output plumbing: CSV emission with full-precision floats, state
// serialization, and JSON reports for the ODE and verification drivers.

#include "crestwave/corner_ode.hpp"
#include "crestwave/interface.hpp"
#include "crestwave/verify.hpp"

#include <string>
#include <vector>

namespace crestwave {

// %.17g rendering used for every float written to disk
std::string format_double(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// trajectory CSV: t, nu_plus, nu_minus, two_nu, b0_re, b0_im, b1_re, b1_im,
// R, psi, conserved, zstar_re, zstar_im
void write_ode_csv(const std::string& path, const std::vector<CornerState>& traj);

std::string blowup_report_json(const BlowupReport& rep);
std::string suite_report_json(const SuiteReport& rep);

void write_text(const std::string& path, const std::string& content);

void save_state_json(const std::string& path, const FullState& s);
FullState load_state_json(const std::string& path);

}  // namespace crestwave
