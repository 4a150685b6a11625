#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "willmore/geometry.hpp"

namespace willmore::ode {

/// Data for a graph smooth at the origin: w(0) = 0, w'(0) = a, so that
/// the mean curvature at the origin is 2a.
struct SmoothData {
    double a = 0.0;
};

/// Data for a graph with a point singularity at the origin:
///   r f(r) = lambda,   w(0+) = 0,   lim (w'(r) - (lambda/2) log r) = b.
struct SingularData {
    double lambda = 0.0;
    double b = 0.0;
};

using InitialData = std::variant<SmoothData, SingularData>;

enum class ProfileKind { smooth, singular };
enum class StopReason { reached_end, slope_blowup, step_underflow };

std::string_view to_string(ProfileKind kind);
std::string_view to_string(StopReason reason);

struct SlopeState {
    double w = 0.0;
    double dw = 0.0;
};

inline constexpr double kSmoothStartRadius = 1e-4;
inline constexpr double kSingularStartRadius = 1e-6;
inline constexpr double kMaxSlope = 1e6;
inline constexpr double kMinTolerance = 1e-13;
inline constexpr double kMaxTolerance = 1e-4;

/// w'' solved from w'' + (w/r)' = phi.
double rhs_smooth(const geometry::GeometryPoint& p);

/// w'' solved from w'' + (w/r)' = phi + lambda v^5 / r.
double rhs_singular(const geometry::GeometryPoint& p, double lambda);

/// Odd Taylor start w = a r + (a^3/2) r^3; the cubic coefficient is forced by
/// the equation. Truncation error O(r0^5).
SlopeState series_start_smooth(SmoothData data, double r0 = kSmoothStartRadius);

/// Two-term start w = (lambda/2) r log r + (b - lambda/2) r.
SlopeState series_start_singular(SingularData data, double r0 = kSingularStartRadius);

struct RefinedStart {
    SlopeState state;
    // max(|delta w|, |delta w'|) at r0 between consecutive iterates; entry k
    // compares iterate k+1 with iterate k (iterate 0 is the two-term start).
    std::vector<double> iterate_differences;
};

/// Picard iteration of the integral form
///   w(r) = (1/r) int_0^r t psi(t) dt + (lambda/2) r log r + (b - lambda/2) r,
///   psi(r) = int_0^r [5 w w'^2 / (2(1+w^2)) + (3w^3 + w^5)/(2t^2) + lambda (v^5 - 1)/t] dt,
/// seeded with the two-term start. Throws NumericalError when the iterate
/// difference grows.
RefinedStart refine_start(SingularData data, double r0, int iterations);

struct IntegratorOptions {
    double r0 = 0.0;  // 0 selects the default start radius for the kind
    double max_slope = kMaxSlope;
    bool refine_singular_start = true;
    int refine_iterations = 3;
    double fixed_step = 0.0;  // > 0 disables step control (order studies)
    // Replaces the series start at r0 (needs r0 > 0). Queries below r0 still
    // use the series of the initial data.
    std::optional<SlopeState> start_state;
    std::size_t max_steps = 2'000'000;
};

/// One accepted Dormand-Prince step together with its continuous extension.
struct DenseSegment {
    double r = 0.0;
    double h = 0.0;
    std::array<std::array<double, 2>, 5> coeff{};
};

class RadialProfile {
public:
    ProfileKind kind() const { return kind_; }
    const InitialData& data() const { return data_; }
    /// Flux constant r f(r): lambda for singular data, 0 for smooth data.
    double lambda() const;
    double r0() const { return grid_.front(); }
    double r_last() const { return grid_.back(); }
    double tol() const { return tol_; }
    StopReason stop_reason() const { return stop_reason_; }

    std::span<const double> grid() const { return grid_; }
    std::span<const SlopeState> states() const { return states_; }

    /// True for 0 < r <= r_last.
    bool contains(double r) const;

    /// Dense output on [r0, r_last]; the series start on (0, r0).
    SlopeState state_at(double r) const;

    /// w''(r): derivative of the dense w' interpolant on [r0, r_last], the
    /// series derivative on (0, r0).
    double ddw_at(double r) const;

    geometry::GeometryPoint point_at(double r) const;

private:
    friend RadialProfile integrate(const InitialData&, double, double, const IntegratorOptions&);

    RadialProfile() = default;

    std::size_t segment_index(double r) const;

    ProfileKind kind_ = ProfileKind::smooth;
    InitialData data_;
    double tol_ = 0.0;
    StopReason stop_reason_ = StopReason::reached_end;
    std::vector<double> grid_;
    std::vector<SlopeState> states_;
    std::vector<DenseSegment> segments_;
};

/// Adaptive Dormand-Prince 5(4) integration with PI step control and dense
/// output, started from the series at r0. Stops early with slope_blowup when
/// |w| would exceed max_slope or the step collapses while |w| is large.
RadialProfile integrate(const InitialData& data, double r_end, double tol,
                        const IntegratorOptions& options = {});

/// Height u(r) = u0 + int_0^r w, using the closed-form series on [0, r0].
class HeightFunction {
public:
    HeightFunction(RadialProfile profile, double u0);

    double operator()(double r) const;
    const RadialProfile& profile() const { return profile_; }

private:
    RadialProfile profile_;
    double u0_;
    std::vector<double> cumulative_;  // u at each grid node
};

HeightFunction reconstruct_height(const RadialProfile& profile, double u0);

}  // namespace willmore::ode
