#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "willmore/errors.hpp"

namespace willmore::quadrature {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

inline constexpr double kDefaultTolerance = 1e-10;
inline constexpr unsigned kMaxDepth = 20;

namespace detail {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
using Gauss = boost::math::quadrature::gauss<double, 7>;

struct Panel {
    double value;
    double error;
    double l1;
};

// 15-point Kronrod estimate with its embedded 7-point Gauss rule. Node and
// weight tables come from Boost; the error is returned in the units of
// [a, b] (Boost's own recursion compares it unscaled, which never
// terminates on very narrow panels).
template <class F>
Panel kronrod_panel(F& f, double a, double b)
{
    const auto& x = Kronrod::abscissa();
    const auto& wk = Kronrod::weights();
    const auto& wg = Gauss::weights();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f0 = f(mid);
    double k = f0 * wk[0];
    double g = f0 * wg[0];
    double l1 = std::abs(f0) * wk[0];
    for (unsigned i = 1; i < x.size(); ++i) {
        const double fp = f(mid + half * x[i]);
        const double fm = f(mid - half * x[i]);
        k += (fp + fm) * wk[i];
        l1 += (std::abs(fp) + std::abs(fm)) * wk[i];
        if (i % 2 == 0) {
            g += (fp + fm) * wg[i / 2];
        }
    }
    return {half * k, half * std::abs(k - g), half * l1};
}

template <class F>
QuadratureResult adaptive(F& f, double a, double b, const Panel& whole, double abs_tol, unsigned depth)
{
    // stop once the panel error is at tolerance or at the roundoff floor
    const double floor = 50.0 * std::numeric_limits<double>::epsilon() * whole.l1;
    if (depth == 0 || whole.error <= std::max(abs_tol, floor)) {
        return {whole.value, whole.error};
    }
    const double m = 0.5 * (a + b);
    const Panel left = kronrod_panel(f, a, m);
    const Panel right = kronrod_panel(f, m, b);
    const auto l = adaptive(f, a, m, left, 0.5 * abs_tol, depth - 1);
    const auto r = adaptive(f, m, b, right, 0.5 * abs_tol, depth - 1);
    return {l.value + r.value, l.error_estimate + r.error_estimate};
}

}  // namespace detail

/// Adaptive bisection with a 15-point Gauss-Kronrod rule per panel. Panels
/// are split until their error estimate drops below tol times the
/// magnitude of the first whole-interval estimate (halved per split), or
/// below the roundoff floor of the panel.
template <class F>
QuadratureResult integrate(F&& f, double lo, double hi, double tol = kDefaultTolerance)
{
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw DomainError("integrate: need finite lo <= hi");
    }
    if (lo == hi) {
        return {};
    }
    const detail::Panel whole = detail::kronrod_panel(f, lo, hi);
    const double abs_tol = tol * std::max(std::abs(whole.value), whole.l1 * 1e-3);
    return detail::adaptive(f, lo, hi, whole, abs_tol, kMaxDepth);
}

}  // namespace willmore::quadrature
