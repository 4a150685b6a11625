#include "willmore/catenoid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "willmore/errors.hpp"
#include "willmore/jet.hpp"

namespace willmore::catenoid {

namespace {

constexpr double kScanStep = 1e-3;
constexpr double kInitialWindow = 10.0;
constexpr double kMaxWindow = 640.0;
constexpr double kRootTolerance = 1e-12;

void require_neck(double c, const char* op)
{
    if (c == 0.0 || !std::isfinite(c)) {
        throw DomainError(std::string(op) + ": neck parameter c must be finite and nonzero");
    }
}

double sech(double t)
{
    return 1.0 / std::cosh(t);
}

// E = R^2 sech^2 t, which stays O(1) for large |t|.
double scaled_radius2(double c, double a, double t)
{
    const double s = sech(t);
    const double z = c * t - a;
    return c * c + z * z * s * s;
}

// h' / (|c| sech t / E^2): same sign as h', overflow-free.
double critical_function(double c, double a, double t)
{
    const double th = std::tanh(t);
    const double s2 = sech(t) * sech(t);
    const double z = c * t - a;
    return -c * c * th + s2 * (z * z * th - 2.0 * c * z);
}

template <class F>
double bisect_root(F&& f, double lo, double hi, double abs_tol)
{
    std::uintmax_t max_iter = 400;
    auto done = [abs_tol](double x, double y) { return std::abs(y - x) <= abs_tol; };
    try {
        const auto [a, b] = boost::math::tools::bisect(f, lo, hi, done, max_iter);
        return 0.5 * (a + b);
    } catch (const boost::math::evaluation_error& e) {
        throw NumericalError(std::string("bisection failed: ") + e.what());
    }
}

std::vector<double> scan_roots(double c, double a, double T)
{
    std::vector<double> roots;
    const auto n = static_cast<long>(std::ceil(2.0 * T / kScanStep));
    auto f = [c, a](double t) { return critical_function(c, a, t); };
    double t_prev = -T;
    double f_prev = f(t_prev);
    if (f_prev == 0.0) {
        roots.push_back(t_prev);
    }
    for (long i = 1; i <= n; ++i) {
        const double t = -T + 2.0 * T * static_cast<double>(i) / static_cast<double>(n);
        const double ft = f(t);
        if (ft == 0.0) {
            roots.push_back(t);
        } else if (f_prev != 0.0 && (f_prev < 0.0) != (ft < 0.0)) {
            roots.push_back(bisect_root(f, t_prev, t, kRootTolerance));
        }
        t_prev = t;
        f_prev = ft;
    }
    return roots;
}

}  // namespace

Point3 catenoid_point(double c, double t, double theta)
{
    require_neck(c, "catenoid_point");
    const double rad = std::abs(c) * std::cosh(t);
    return {rad * std::cos(theta), rad * std::sin(theta), c * t};
}

Point3 invert(double a_inv, const Point3& p)
{
    const double z = p.z - a_inv;
    const double n2 = p.x * p.x + p.y * p.y + z * z;
    if (n2 == 0.0) {
        throw DomainError("invert: the centre of inversion has no image");
    }
    return {p.x / n2, p.y / n2, z / n2};
}

CatenoidGraphJet catenoid_graph(double c, double rho)
{
    require_neck(c, "catenoid_graph");
    const double x = rho / std::abs(c);
    if (!(x > 1.0)) {
        throw DomainError("catenoid_graph: need rho > |c|");
    }
    const double root = std::sqrt((x - 1.0) * (x + 1.0));
    const double gap = std::sqrt((rho - std::abs(c)) * (rho + std::abs(c)));  // sqrt(rho^2 - c^2)
    CatenoidGraphJet j;
    j.u = c * std::log(x + root);
    j.w = c / gap;
    j.dw = -c * rho / (gap * gap * gap);
    return j;
}

double profile_h(double c, double a_inv, double t)
{
    require_neck(c, "profile_h");
    return std::abs(c) * sech(t) / scaled_radius2(c, a_inv, t);
}

double profile_hbar(double c, double a_inv, double t)
{
    require_neck(c, "profile_hbar");
    const double s = sech(t);
    return (c * t - a_inv) * s * s / scaled_radius2(c, a_inv, t);
}

double profile_h_derivative(double c, double a_inv, double t)
{
    require_neck(c, "profile_h_derivative");
    const double e = scaled_radius2(c, a_inv, t);
    return std::abs(c) * sech(t) * critical_function(c, a_inv, t) / (e * e);
}

std::vector<double> critical_points(double c, double a_inv)
{
    require_neck(c, "critical_points");
    for (double T = kInitialWindow; T <= kMaxWindow; T *= 2.0) {
        std::vector<double> roots = scan_roots(c, a_inv, T);
        if (roots.empty()) {
            continue;
        }
        double h_max = 0.0;
        for (double t : roots) {
            h_max = std::max(h_max, profile_h(c, a_inv, t));
        }
        const bool decayed =
            profile_h(c, a_inv, -T) < 0.1 * h_max && profile_h(c, a_inv, T) < 0.1 * h_max;
        // h increases from 0 at -inf and decreases to 0 at +inf
        const bool tails = critical_function(c, a_inv, -T) > 0.0 && critical_function(c, a_inv, T) < 0.0;
        if (decayed && tails) {
            std::sort(roots.begin(), roots.end());
            return roots;
        }
    }
    throw NumericalError("critical_points: scan window exhausted for c = " + std::to_string(c) +
                         ", a = " + std::to_string(a_inv));
}

double branch_radius(double c, double a_inv)
{
    const std::vector<double> roots = critical_points(c, a_inv);
    return profile_h(c, a_inv, roots.back());
}

InvertedCatenoid::InvertedCatenoid(double c, double a_inv)
    : c_(c), a_(a_inv), t_crit_(critical_points(c, a_inv)), R_(profile_h(c, a_inv, t_crit_.back()))
{
}

double InvertedCatenoid::parameter_at(double r) const
{
    if (!(r > 0.0 && r < R_)) {
        throw DomainError("InvertedCatenoid: r = " + std::to_string(r) + " outside (0, R = " +
                          std::to_string(R_) + ")");
    }
    const double t_lo = t_branch();
    double step = 1.0;
    double t_hi = t_lo + step;
    while (profile_h(c_, a_, t_hi) > r) {
        step *= 2.0;
        t_hi = t_lo + step;
        if (step > 2.0 * kMaxWindow) {
            throw NumericalError("InvertedCatenoid: cannot bracket h^{-1}(" + std::to_string(r) + ")");
        }
    }
    auto g = [this, r](double t) { return profile_h(c_, a_, t) - r; };
    if (g(t_lo) <= 0.0) {
        // r is within roundoff of R
        return t_lo;
    }
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_hi));
    return bisect_root(g, t_lo, t_hi, tol);
}

double InvertedCatenoid::U(double r) const
{
    return profile_hbar(c_, a_, parameter_at(r));
}

GraphJet InvertedCatenoid::graph_jet(double r) const
{
    using J = Jet<4>;
    const double t = parameter_at(r);
    const J tj = J::variable(t);
    const J ch = cosh(tj);
    const J z = c_ * tj - a_;
    const J R2 = (c_ * c_) * (ch * ch) + z * z;
    const J X = std::abs(c_) * ch / R2;
    const J Y = z / R2;

    const double x1 = X.derivative(1), x2 = X.derivative(2), x3 = X.derivative(3);
    const double y1 = Y.derivative(1), y2 = Y.derivative(2), y3 = Y.derivative(3);
    const double num2 = y2 * x1 - y1 * x2;

    GraphJet out;
    out.r = r;
    out.t = t;
    out.U = Y.value();
    out.dU = y1 / x1;
    out.d2U = num2 / (x1 * x1 * x1);
    out.d3U = ((y3 * x1 - y1 * x3) * x1 - 3.0 * x2 * num2) / std::pow(x1, 5);
    return out;
}

double graph_U(double c, double a_inv, double r)
{
    return InvertedCatenoid(c, a_inv).U(r);
}

GraphJet graph_U_derivs(double c, double a_inv, double r)
{
    return InvertedCatenoid(c, a_inv).graph_jet(r);
}

CatenoidParams params_from_singular_data(double lambda, double b)
{
    if (lambda == 0.0 || !std::isfinite(lambda) || !std::isfinite(b)) {
        throw DomainError("params_from_singular_data: lambda must be finite and nonzero");
    }
    return {-lambda / 4.0, lambda / 4.0 * std::log(std::abs(lambda) / 8.0) + 3.0 * lambda / 8.0 - b / 2.0};
}

double asymptotic_constant(double c, double a_inv)
{
    require_neck(c, "asymptotic_constant");
    return 2.0 * (c * std::log(2.0) - c * std::log(std::abs(c)) - a_inv) - 3.0 * c;
}

}  // namespace willmore::catenoid
