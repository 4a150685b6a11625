#pragma once

#include "willmore/radial_ode.hpp"

namespace willmore::geometry {

/// Central-difference step used for the outer derivative in the residual.
double residual_step(double r);

/// Delta_g H + H^3/2 - 2 H K on a solved profile. Delta_g of a radial
/// function is (1/(r v)) d/dr (r H'/v); H' is evaluated from the equation
/// and the outer derivative by Richardson-extrapolated central differences
/// with steps residual_step(r) and twice that.
double willmore_operator_residual(const ode::RadialProfile& profile, double r);

/// 2 pi int_{r_lo}^{r_hi} H^2 r v dr.
double willmore_energy(const ode::RadialProfile& profile, double r_lo, double r_hi,
                       double tol = 1e-10);

struct AnnulusIdentity {
    double lhs = 0.0;  // int_{eps < r < rho} (|A|^2 - H^2) dmu by quadrature
    double rhs = 0.0;  // 4 pi (1/v(rho) - 1/v(eps))
};

AnnulusIdentity annulus_identity(const ode::RadialProfile& profile, double eps, double rho,
                                 double tol = 1e-10);

}  // namespace willmore::geometry
