#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "willmore/io.hpp"
#include "willmore/verify.hpp"

namespace willmore::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsage = 2, kNumerical = 3 };

/// Default solver tolerance: WILLMORE_TOL if set and parsable, else 1e-10.
/// Throws DomainError on a malformed value.
double default_solver_tolerance();

/// max |r f - lambda| over the rows of an exported profile table.
double csv_flux_residual(const io::Table& table, double lambda);

/// Default configuration of each named suite. `all` expands to every
/// suite, with flux and annulus run on both the sphere and the catenoid.
std::vector<verify::VerificationReport> run_suite(const std::string& suite, double solver_tol);

/// {passed, reports: [...]} for a batch of reports.
nlohmann::json aggregate(const std::vector<verify::VerificationReport>& reports);

/// Full command-line entry point. Never throws; returns an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace willmore::cli
