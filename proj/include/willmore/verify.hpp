#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "willmore/radial_ode.hpp"

namespace willmore::verify {

/// Outcome of one numerical check. `measured` may carry informational
/// values; only keys that also appear in `tolerance` gate `passed`.
struct VerificationReport {
    std::string name;
    nlohmann::json inputs = nlohmann::json::object();
    std::map<std::string, double> measured;
    std::map<std::string, double> tolerance;
    bool passed = false;
    double runtime_s = 0.0;

    /// passed <=> measured[k] <= tolerance[k] for every gated key k.
    bool gates_pass() const;
};

void to_json(nlohmann::json& j, const VerificationReport& r);
void from_json(const nlohmann::json& j, VerificationReport& r);

inline constexpr double kDefaultSolverTolerance = 1e-10;

struct VerifyOptions {
    double solver_tol = kDefaultSolverTolerance;
};

/// Zero data a = 0 integrated to r = 10; gate sup |w| <= tol.
VerificationReport verify_flat(double tol, const VerifyOptions& opts = {});

/// Smooth data a on [0, r_frac/|a|] against the hemisphere slope
/// a r / sqrt(1 - a^2 r^2). Throws NumericalError if the solver stops short.
VerificationReport verify_sphere(double a, double r_frac, double tol, const VerifyOptions& opts = {});

/// Singular data (lambda, b) on [r0, 0.9 R_{c,a}] against U' of the matched
/// inverted-catenoid branch; also gates the flux first integral at
/// 100 * solver_tol.
VerificationReport verify_catenoid_match(double lambda, double b, double tol,
                                         const VerifyOptions& opts = {});

/// max over the solver grid of |r f(r) - lambda|, with u''' from the dense
/// output.
double max_flux_residual(const ode::RadialProfile& profile);
VerificationReport verify_flux(const ode::RadialProfile& profile, double tol);

VerificationReport verify_annulus(const ode::RadialProfile& profile, double eps, double rho, double tol);

struct HFit {
    double K1 = 0.0;  // coefficient of log r
    double K2 = 0.0;  // constant term
    std::size_t samples = 0;
};

/// Ordinary least squares H(r) ~ K1 log r + K2 over the solver grid points
/// in [r_lo, r_hi]. Needs at least 10 points.
HFit fit_H_decomposition(const ode::RadialProfile& profile, double r_lo, double r_hi);

/// Fits the log coefficient of H on a singular profile and gates its
/// relative distance from lambda. The report also records the distance
/// from lambda/2.
VerificationReport verify_hfit(ode::SingularData data, double r_lo, double r_hi, double rel_tol,
                               const VerifyOptions& opts = {});

}  // namespace willmore::verify
