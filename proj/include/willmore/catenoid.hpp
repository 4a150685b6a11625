#pragma once

#include <vector>

namespace willmore::catenoid {

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// (|c| cosh t cos theta, |c| cosh t sin theta, c t). c may be negative.
Point3 catenoid_point(double c, double t, double theta);

/// Inversion in the unit sphere centred at (0, 0, a_inv).
Point3 invert(double a_inv, const Point3& p);

/// Catenoid as a graph over rho >= |c|: u(rho) = c arccosh(rho/|c|).
struct CatenoidGraphJet {
    double u = 0.0;
    double w = 0.0;   // u'
    double dw = 0.0;  // u''
};
CatenoidGraphJet catenoid_graph(double c, double rho);

/// Cylindrical radius h(t) and height hbar(t) of the inverted profile curve
///   h = |c| cosh t / R^2,  hbar = (c t - a) / R^2,  R^2 = c^2 cosh^2 t + (c t - a)^2.
double profile_h(double c, double a_inv, double t);
double profile_hbar(double c, double a_inv, double t);
double profile_h_derivative(double c, double a_inv, double t);

/// All zeros of h' in ascending order: sign-change scan with step 1e-3 over
/// a window [-T, T] widened until h has decayed to a tenth of its critical
/// values at both ends, then bisection of each bracket.
std::vector<double> critical_points(double c, double a_inv);

/// R_{c,a} = h(t_m), the radius of the punctured disk carrying the last
/// graph branch.
double branch_radius(double c, double a_inv);

/// U and its first three r-derivatives on the last branch.
struct GraphJet {
    double r = 0.0;
    double t = 0.0;  // curve parameter with h(t) = r
    double U = 0.0;
    double dU = 0.0;
    double d2U = 0.0;
    double d3U = 0.0;
};

/// The inverted catenoid I_a(F_c) with its critical-point census done once.
/// The last branch Sigma_{c,a} = I_a(F_c((t_m, inf) x S^1)) is the graph of
/// U over the punctured disk of radius R = h(t_m).
class InvertedCatenoid {
public:
    InvertedCatenoid(double c, double a_inv);

    double c() const { return c_; }
    double a() const { return a_; }
    const std::vector<double>& t_crit() const { return t_crit_; }
    double t_branch() const { return t_crit_.back(); }
    double R() const { return R_; }
    /// The census bound 1 <= m <= 3; a violation is reported here rather
    /// than clamped.
    bool census_within_bound() const { return !t_crit_.empty() && t_crit_.size() <= 3; }

    /// h^{-1}(r) on (t_branch, inf) by bisection.
    double parameter_at(double r) const;
    double U(double r) const;
    GraphJet graph_jet(double r) const;

private:
    double c_;
    double a_;
    std::vector<double> t_crit_;
    double R_;
};

double graph_U(double c, double a_inv, double r);
GraphJet graph_U_derivs(double c, double a_inv, double r);

struct CatenoidParams {
    double c = 0.0;
    double a = 0.0;
};

/// The unique (c, a) whose branch U' solves the singular equation with flux
/// constant lambda and lim (U'' - (lambda/2) log r) = b.
CatenoidParams params_from_singular_data(double lambda, double b);

/// lim_{r -> 0} (U''(r) + 2 c log r) = 2 (c log 2 - c log|c| - a) - 3c.
double asymptotic_constant(double c, double a_inv);

}  // namespace willmore::catenoid
