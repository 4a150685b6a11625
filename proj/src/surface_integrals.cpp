#include "willmore/surface_integrals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "willmore/errors.hpp"
#include "willmore/quadrature.hpp"

namespace willmore::geometry {

namespace {

GeometryPoint equation_point(const ode::RadialProfile& profile, double r)
{
    const ode::SlopeState s = profile.state_at(r);
    GeometryPoint p{r, s.w, s.dw, {}};
    p.ddw = ode::rhs_singular(p, profile.lambda());
    return p;
}

double mean_curvature_or_limit(const ode::RadialProfile& profile, double r)
{
    if (r == 0.0 && profile.kind() == ode::ProfileKind::smooth) {
        return mean_curvature_at_origin(std::get<ode::SmoothData>(profile.data()).a);
    }
    return mean_curvature(profile.point_at(r));
}

void require_bounds(const ode::RadialProfile& profile, double lo, double hi, const char* op)
{
    if (!(lo >= 0.0 && lo < hi && hi <= profile.r_last())) {
        throw DomainError(std::string(op) + ": need 0 <= lo < hi <= r_last = " +
                          std::to_string(profile.r_last()) + ", got [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
    }
}

// Integrates f over [lo, hi] piecewise: the series part below r0 and then one
// solver step at a time, so that each panel sees a polynomial interpolant.
template <class F>
double integrate_over_profile(const ode::RadialProfile& profile, F&& f, double lo, double hi, double tol)
{
    const auto grid = profile.grid();
    double total = 0.0;
    double a = lo;
    if (a < grid.front()) {
        const double b = std::min(hi, grid.front());
        total += quadrature::integrate(f, a, b, tol).value;
        a = b;
    }
    auto it = std::upper_bound(grid.begin(), grid.end(), a);
    for (; a < hi && it != grid.end(); ++it) {
        const double b = std::min(hi, *it);
        if (b > a) {
            total += quadrature::integrate(f, a, b, tol).value;
        }
        a = b;
    }
    return total;
}

}  // namespace

double residual_step(double r)
{
    return std::max(1e-5, 1e-3 * r);
}

double willmore_operator_residual(const ode::RadialProfile& profile, double r)
{
    const double h = residual_step(r);
    if (!(r - 2.0 * h >= profile.r0() && r + 2.0 * h <= profile.r_last())) {
        throw DomainError("willmore_operator_residual: r = " + std::to_string(r) +
                          " is not interior to the resolved profile [" + std::to_string(profile.r0()) +
                          ", " + std::to_string(profile.r_last()) + "]");
    }
    auto flux_like = [&](double s) {
        const GeometryPoint p = equation_point(profile, s);
        return s * mean_curvature_derivative(p) / area_element(p.w);
    };
    const GeometryPoint p = equation_point(profile, r);
    const double v = area_element(p.w);
    // central differences at h and 2h, one Richardson level: O(h^4)
    const double d_h = (flux_like(r + h) - flux_like(r - h)) / (2.0 * h);
    const double d_2h = (flux_like(r + 2.0 * h) - flux_like(r - 2.0 * h)) / (4.0 * h);
    const double laplacian = (4.0 * d_h - d_2h) / 3.0 / (r * v);
    const double H = mean_curvature(p);
    const double K = gauss_curvature(p);
    return laplacian + 0.5 * H * H * H - 2.0 * H * K;
}

double willmore_energy(const ode::RadialProfile& profile, double r_lo, double r_hi, double tol)
{
    require_bounds(profile, r_lo, r_hi, "willmore_energy");
    auto integrand = [&](double r) {
        const double H = mean_curvature_or_limit(profile, r);
        return H * H * r * area_element(profile.state_at(r).w);
    };
    return 2.0 * std::numbers::pi * integrate_over_profile(profile, integrand, r_lo, r_hi, tol);
}

AnnulusIdentity annulus_identity(const ode::RadialProfile& profile, double eps, double rho, double tol)
{
    if (!(eps > 0.0)) {
        throw DomainError("annulus_identity: eps must be positive");
    }
    require_bounds(profile, eps, rho, "annulus_identity");
    auto integrand = [&](double r) {
        const GeometryPoint p = profile.point_at(r);
        const double H = mean_curvature(p);
        return (second_form_norm(p) - H * H) * r * area_element(p.w);
    };
    AnnulusIdentity out;
    out.lhs = 2.0 * std::numbers::pi * integrate_over_profile(profile, integrand, eps, rho, tol);
    const double v_rho = area_element(profile.state_at(rho).w);
    const double v_eps = area_element(profile.state_at(eps).w);
    out.rhs = 4.0 * std::numbers::pi * (1.0 / v_rho - 1.0 / v_eps);
    return out;
}

}  // namespace willmore::geometry
