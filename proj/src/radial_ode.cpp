#include "willmore/radial_ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "willmore/errors.hpp"
#include "willmore/quadrature.hpp"

namespace willmore::ode {

using geometry::GeometryPoint;

std::string_view to_string(ProfileKind kind)
{
    return kind == ProfileKind::smooth ? "smooth" : "singular";
}

std::string_view to_string(StopReason reason)
{
    switch (reason) {
    case StopReason::reached_end:
        return "reached-end";
    case StopReason::slope_blowup:
        return "slope-blowup";
    case StopReason::step_underflow:
        return "step-underflow";
    }
    return "unknown";
}

double rhs_smooth(const GeometryPoint& p)
{
    // phi() rejects r <= 0
    return geometry::phi(p) - p.dw / p.r + p.w / (p.r * p.r);
}

double rhs_singular(const GeometryPoint& p, double lambda)
{
    const double base = rhs_smooth(p);
    if (lambda == 0.0) {
        return base;
    }
    const double v = geometry::area_element(p.w);
    const double v2 = v * v;
    return base + lambda * v2 * v2 * v / p.r;
}

SlopeState series_start_smooth(SmoothData data, double r0)
{
    if (!(r0 >= 0.0)) {
        throw DomainError("series_start_smooth: r0 must be nonnegative");
    }
    const double a = data.a;
    const double a3 = a * a * a;
    return {a * r0 + 0.5 * a3 * r0 * r0 * r0, a + 1.5 * a3 * r0 * r0};
}

SlopeState series_start_singular(SingularData data, double r0)
{
    if (!(r0 > 0.0)) {
        throw DomainError("series_start_singular: r0 must be positive");
    }
    const double half = 0.5 * data.lambda;
    const double log_r = std::log(r0);
    return {half * r0 * log_r + (data.b - half) * r0, half * log_r + data.b};
}

namespace {

// Uniform grid in s = log t reaching kLogDepth e-folds below r0; the Picard
// integrands decay like t^2 |log t|^3, so the tail below is negligible.
constexpr int kPicardNodes = 4000;
constexpr double kLogDepth = 40.0;

// Cumulative integral of samples g on a uniform grid with spacing h, using
// the four-point cubic rule on interior cells and one-sided rules at the ends.
std::vector<double> cumulative_integral(const std::vector<double>& g, double h)
{
    const std::size_t n = g.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        double cell = 0.0;
        if (j == 0) {
            cell = 9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3];
        } else if (j + 2 == n) {
            cell = g[j - 2] - 5.0 * g[j - 1] + 19.0 * g[j] + 9.0 * g[j + 1];
        } else {
            cell = -g[j - 1] + 13.0 * g[j] + 13.0 * g[j + 1] - g[j + 2];
        }
        out[j + 1] = out[j] + h * cell / 24.0;
    }
    return out;
}

}  // namespace

RefinedStart refine_start(SingularData data, double r0, int iterations)
{
    if (!(r0 > 0.0)) {
        throw DomainError("refine_start: r0 must be positive");
    }
    if (iterations < 1) {
        throw DomainError("refine_start: iterations must be >= 1");
    }
    const double lambda = data.lambda;
    const double half = 0.5 * lambda;
    const double slope = data.b - half;  // coefficient of r in the two-term start

    const double s_hi = std::log(r0);
    const double hs = kLogDepth / kPicardNodes;
    std::vector<double> t(kPicardNodes + 1);
    std::vector<double> w(t.size());
    std::vector<double> dw(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) {
        const double s = s_hi - kLogDepth + hs * static_cast<double>(j);
        t[j] = std::exp(s);
        const SlopeState seed = series_start_singular(data, t[j]);
        w[j] = seed.w;
        dw[j] = seed.dw;
    }
    t.back() = r0;

    RefinedStart out;
    out.state = {w.back(), dw.back()};
    std::vector<double> g(t.size());
    for (int it = 0; it < iterations; ++it) {
        // psi(t) = int_0^t N, integrated in s = log t: dt = t ds
        for (std::size_t j = 0; j < t.size(); ++j) {
            const double wj = w[j];
            const double w2 = wj * wj;
            const double v2 = 1.0 + w2;
            const double v5m1 = std::expm1(2.5 * std::log1p(w2));
            const double n = 5.0 * wj * dw[j] * dw[j] / (2.0 * v2) +
                             wj * w2 * (3.0 + w2) / (2.0 * t[j] * t[j]) + lambda * v5m1 / t[j];
            g[j] = n * t[j];
        }
        const std::vector<double> psi = cumulative_integral(g, hs);
        // I(t) = int_0^t tau psi(tau) dtau
        for (std::size_t j = 0; j < t.size(); ++j) {
            g[j] = t[j] * t[j] * psi[j];
        }
        const std::vector<double> moment = cumulative_integral(g, hs);
        for (std::size_t j = 0; j < t.size(); ++j) {
            const double log_t = std::log(t[j]);
            w[j] = moment[j] / t[j] + half * t[j] * log_t + slope * t[j];
            dw[j] = psi[j] - moment[j] / (t[j] * t[j]) + half * (log_t + 1.0) + slope;
        }
        const SlopeState next{w.back(), dw.back()};
        const double diff = std::max(std::abs(next.w - out.state.w), std::abs(next.dw - out.state.dw));
        const double floor = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(next.dw));
        if (!out.iterate_differences.empty() && diff > out.iterate_differences.back() && diff > floor) {
            throw NumericalError("refine_start: Picard iterate difference grew from " +
                                 std::to_string(out.iterate_differences.back()) + " to " +
                                 std::to_string(diff) + " at r0 = " + std::to_string(r0));
        }
        if (!std::isfinite(diff)) {
            throw NumericalError("refine_start: non-finite iterate");
        }
        out.iterate_differences.push_back(diff);
        out.state = next;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)

namespace {

using Vec = std::array<double, 2>;

constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// Step-size controller constants (Hairer-Wanner PI control).
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kFacMin = 0.2;   // h may grow by at most 1/kFacMin
constexpr double kFacMax = 10.0;  // and shrink by at most 1/kFacMax
constexpr double kMinStepRelative = 1e-14;

struct Rhs {
    double lambda;

    Vec operator()(double r, const Vec& y) const
    {
        return {y[1], rhs_singular({r, y[0], y[1], {}}, lambda)};
    }
};

Vec axpy(const Vec& y, double h, std::initializer_list<std::pair<double, const Vec*>> terms)
{
    Vec out = y;
    for (const auto& [c, k] : terms) {
        out[0] += h * c * (*k)[0];
        out[1] += h * c * (*k)[1];
    }
    return out;
}

double interp_value(const DenseSegment& seg, int comp, double theta)
{
    const double theta1 = 1.0 - theta;
    const auto& c = seg.coeff;
    return c[0][comp] +
           theta * (c[1][comp] + theta1 * (c[2][comp] + theta * (c[3][comp] + theta1 * c[4][comp])));
}

// d/dr of the continuous extension
double interp_derivative(const DenseSegment& seg, int comp, double theta)
{
    const auto& c = seg.coeff;
    const double c1 = c[1][comp], c2_ = c[2][comp], c3_ = c[3][comp], c4_ = c[4][comp];
    // p(theta) = c1 th + c2 th(1-th) + c3 th^2 (1-th) + c4 th^2 (1-th)^2
    const double th = theta;
    const double th1 = 1.0 - th;
    const double dp = c1 + c2_ * (1.0 - 2.0 * th) + c3_ * (2.0 * th - 3.0 * th * th) +
                      c4_ * (2.0 * th * th1 * th1 - 2.0 * th * th * th1);
    return dp / seg.h;
}

}  // namespace

double RadialProfile::lambda() const
{
    if (const auto* s = std::get_if<SingularData>(&data_)) {
        return s->lambda;
    }
    return 0.0;
}

bool RadialProfile::contains(double r) const
{
    return r > 0.0 && r <= r_last();
}

std::size_t RadialProfile::segment_index(double r) const
{
    // last segment whose start is <= r
    auto it = std::upper_bound(grid_.begin(), grid_.end(), r);
    std::size_t idx = static_cast<std::size_t>(std::distance(grid_.begin(), it));
    idx = idx == 0 ? 0 : idx - 1;
    return std::min(idx, segments_.size() - 1);
}

SlopeState RadialProfile::state_at(double r) const
{
    if (!contains(r)) {
        throw DomainError("state_at: r = " + std::to_string(r) + " outside (0, " +
                          std::to_string(r_last()) + "]");
    }
    if (r < r0()) {
        if (const auto* s = std::get_if<SingularData>(&data_)) {
            return series_start_singular(*s, r);
        }
        return series_start_smooth(std::get<SmoothData>(data_), r);
    }
    if (segments_.empty()) {
        return states_.front();
    }
    const std::size_t i = segment_index(r);
    if (r == grid_[i]) {
        return states_[i];
    }
    if (r == grid_[i + 1]) {
        return states_[i + 1];
    }
    const DenseSegment& seg = segments_[i];
    const double theta = (r - seg.r) / seg.h;
    return {interp_value(seg, 0, theta), interp_value(seg, 1, theta)};
}

double RadialProfile::ddw_at(double r) const
{
    if (!contains(r)) {
        throw DomainError("ddw_at: r = " + std::to_string(r) + " outside (0, " +
                          std::to_string(r_last()) + "]");
    }
    if (r < r0() || segments_.empty()) {
        if (const auto* s = std::get_if<SingularData>(&data_)) {
            return 0.5 * s->lambda / r;
        }
        const double a = std::get<SmoothData>(data_).a;
        return 3.0 * a * a * a * r;
    }
    const std::size_t i = segment_index(r);
    const DenseSegment& seg = segments_[i];
    const double theta = std::clamp((r - seg.r) / seg.h, 0.0, 1.0);
    return interp_derivative(seg, 1, theta);
}

geometry::GeometryPoint RadialProfile::point_at(double r) const
{
    const SlopeState s = state_at(r);
    return {r, s.w, s.dw, ddw_at(r)};
}

RadialProfile integrate(const InitialData& data, double r_end, double tol, const IntegratorOptions& options)
{
    if (!(tol >= kMinTolerance && tol <= kMaxTolerance)) {
        throw DomainError("integrate: tolerance " + std::to_string(tol) + " outside [1e-13, 1e-4]");
    }
    RadialProfile profile;
    profile.data_ = data;
    profile.tol_ = tol;

    double lambda = 0.0;
    double r0 = options.r0;
    SlopeState start;
    if (const auto* s = std::get_if<SingularData>(&data)) {
        profile.kind_ = ProfileKind::singular;
        if (!std::isfinite(s->lambda) || !std::isfinite(s->b)) {
            throw DomainError("integrate: singular data must be finite");
        }
        lambda = s->lambda;
        r0 = r0 > 0.0 ? r0 : kSingularStartRadius;
        start = options.refine_singular_start ? refine_start(*s, r0, options.refine_iterations).state
                                              : series_start_singular(*s, r0);
    } else {
        const auto& sm = std::get<SmoothData>(data);
        profile.kind_ = ProfileKind::smooth;
        if (!std::isfinite(sm.a)) {
            throw DomainError("integrate: smooth data must be finite");
        }
        r0 = r0 > 0.0 ? r0 : kSmoothStartRadius;
        start = series_start_smooth(sm, r0);
    }
    if (options.start_state) {
        if (!(options.r0 > 0.0)) {
            throw DomainError("integrate: start_state needs an explicit r0");
        }
        start = *options.start_state;
    }
    if (!(r_end > r0) || !std::isfinite(r_end)) {
        throw DomainError("integrate: r_end = " + std::to_string(r_end) + " must exceed r0 = " +
                          std::to_string(r0));
    }

    const Rhs rhs{lambda};
    double r = r0;
    Vec y{start.w, start.dw};
    profile.grid_.push_back(r);
    profile.states_.push_back(start);

    const bool fixed = options.fixed_step > 0.0;
    double h = fixed ? options.fixed_step : std::min(1e-3 * r0, r_end - r0);
    double fac_old = 1e-4;
    bool last_rejected = false;
    Vec k1 = rhs(r, y);
    std::size_t steps = 0;

    auto scale = [tol](double a, double b) { return tol + tol * std::max(std::abs(a), std::abs(b)); };

    while (r < r_end) {
        if (++steps > options.max_steps) {
            throw NumericalError("integrate: exceeded max_steps at r = " + std::to_string(r));
        }
        if (!fixed && h < kMinStepRelative * r) {
            if (profile.segments_.empty()) {
                throw NumericalError("integrate: step-underflow before any progress at r = " +
                                     std::to_string(r));
            }
            profile.stop_reason_ = std::abs(y[0]) > std::sqrt(options.max_slope)
                                       ? StopReason::slope_blowup
                                       : StopReason::step_underflow;
            return profile;
        }
        bool final_step = false;
        if (r + h >= r_end || (r_end - (r + h)) < kMinStepRelative * r_end) {
            h = r_end - r;
            final_step = true;
        }

        const Vec k2 = rhs(r + c2 * h, axpy(y, h, {{a21, &k1}}));
        const Vec k3 = rhs(r + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
        const Vec k4 = rhs(r + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const Vec k5 = rhs(r + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const Vec k6 = rhs(r + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const Vec y1 = axpy(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
        const double r1 = final_step ? r_end : r + h;

        const bool finite = std::isfinite(y1[0]) && std::isfinite(y1[1]);
        if (finite && std::abs(y1[0]) > options.max_slope) {
            profile.stop_reason_ = StopReason::slope_blowup;
            return profile;
        }
        const Vec k7 = finite ? rhs(r1, y1) : Vec{NAN, NAN};

        double err = std::numeric_limits<double>::infinity();
        if (finite && std::isfinite(k7[0]) && std::isfinite(k7[1])) {
            err = 0.0;
            for (int i = 0; i < 2; ++i) {
                const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                      e7 * k7[i]);
                const double q = e / scale(y[i], y1[i]);
                err += q * q;
            }
            err = std::sqrt(err / 2.0);
        }

        if (!fixed && !(err <= 1.0)) {
            const double fac = std::isfinite(err) ? std::pow(err, kExpo) / kSafety : kFacMax;
            h /= std::min(kFacMax, fac);
            last_rejected = true;
            continue;
        }
        if (!finite) {
            throw NumericalError("integrate: non-finite state in fixed-step mode at r = " + std::to_string(r));
        }

        DenseSegment seg;
        seg.r = r;
        seg.h = h;
        for (int i = 0; i < 2; ++i) {
            const double ydiff = y1[i] - y[i];
            const double bspl = h * k1[i] - ydiff;
            seg.coeff[0][i] = y[i];
            seg.coeff[1][i] = ydiff;
            seg.coeff[2][i] = bspl;
            seg.coeff[3][i] = ydiff - h * k7[i] - bspl;
            seg.coeff[4][i] =
                h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        profile.segments_.push_back(seg);
        profile.grid_.push_back(r1);
        profile.states_.push_back({y1[0], y1[1]});

        r = r1;
        y = y1;
        k1 = k7;
        if (fixed) {
            continue;
        }
        const double fac11 = std::pow(std::max(err, 1e-300), kExpo);
        double fac = fac11 / std::pow(fac_old, kBeta) / kSafety;
        fac = std::clamp(fac, 1.0 / kFacMax, 1.0 / kFacMin);
        double h_new = h / fac;
        if (last_rejected) {
            h_new = std::min(h_new, h);
        }
        fac_old = std::max(err, 1e-4);
        last_rejected = false;
        h = h_new;
    }
    profile.stop_reason_ = StopReason::reached_end;
    return profile;
}

// ---------------------------------------------------------------------------

namespace {

double series_height(const InitialData& data, double r)
{
    if (const auto* s = std::get_if<SingularData>(&data)) {
        const double half = 0.5 * s->lambda;
        const double r2 = r * r;
        return half * (0.5 * r2 * std::log(r) - 0.25 * r2) + 0.5 * (s->b - half) * r2;
    }
    const double a = std::get<SmoothData>(data).a;
    const double r2 = r * r;
    return 0.5 * a * r2 + 0.125 * a * a * a * r2 * r2;
}

}  // namespace

HeightFunction::HeightFunction(RadialProfile profile, double u0) : profile_(std::move(profile)), u0_(u0)
{
    const auto grid = profile_.grid();
    cumulative_.resize(grid.size());
    cumulative_[0] = u0_ + series_height(profile_.data(), grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const auto piece = quadrature::integrate([this](double r) { return profile_.state_at(r).w; },
                                                 grid[i - 1], grid[i], 1e-13);
        cumulative_[i] = cumulative_[i - 1] + piece.value;
    }
}

double HeightFunction::operator()(double r) const
{
    if (r == 0.0) {
        return u0_;
    }
    if (!profile_.contains(r)) {
        throw DomainError("height: r = " + std::to_string(r) + " outside [0, " +
                          std::to_string(profile_.r_last()) + "]");
    }
    const auto grid = profile_.grid();
    if (r < grid[0]) {
        return u0_ + series_height(profile_.data(), r);
    }
    auto it = std::upper_bound(grid.begin(), grid.end(), r);
    const std::size_t i = static_cast<std::size_t>(std::distance(grid.begin(), it)) - 1;
    if (r == grid[i]) {
        return cumulative_[i];
    }
    const auto piece =
        quadrature::integrate([this](double s) { return profile_.state_at(s).w; }, grid[i], r, 1e-13);
    return cumulative_[i] + piece.value;
}

HeightFunction reconstruct_height(const RadialProfile& profile, double u0)
{
    if (!std::isfinite(u0)) {
        throw DomainError("reconstruct_height: u0 must be finite");
    }
    return HeightFunction(profile, u0);
}

}  // namespace willmore::ode
