#include "willmore/geometry.hpp"

#include <cmath>
#include <string>

#include "willmore/errors.hpp"

namespace willmore::geometry {

namespace {

void require_positive_radius(const GeometryPoint& p, const char* op)
{
    if (!(p.r > 0.0) || !std::isfinite(p.r)) {
        throw DomainError(std::string(op) + ": radius must be positive and finite, got r = " +
                          std::to_string(p.r));
    }
}

}  // namespace

double area_element(double w)
{
    return std::hypot(1.0, w);
}

double mean_curvature(const GeometryPoint& p)
{
    require_positive_radius(p, "mean_curvature");
    const double v = area_element(p.w);
    return p.dw / (v * v * v) + p.w / (p.r * v);
}

double mean_curvature_at_origin(double dw0)
{
    return 2.0 * dw0;
}

double gauss_curvature(const GeometryPoint& p)
{
    require_positive_radius(p, "gauss_curvature");
    const double v2 = 1.0 + p.w * p.w;
    return p.w * p.dw / (p.r * v2 * v2);
}

double second_form_norm(const GeometryPoint& p)
{
    require_positive_radius(p, "second_form_norm");
    const double v = area_element(p.w);
    const double k1 = p.dw / (v * v * v);
    const double k2 = p.w / (p.r * v);
    return k1 * k1 + k2 * k2;
}

double phi(const GeometryPoint& p)
{
    require_positive_radius(p, "phi");
    const double w2 = p.w * p.w;
    return 5.0 * p.w * p.dw * p.dw / (2.0 * (1.0 + w2)) +
           p.w * w2 * (3.0 + w2) / (2.0 * p.r * p.r);
}

double flux(const GeometryPoint& p)
{
    require_positive_radius(p, "flux");
    if (!p.ddw) {
        throw DomainError("flux: the third derivative u''' (ddw) is required");
    }
    const double v = area_element(p.w);
    const double v5 = v * v * v * v * v;
    return (*p.ddw + p.dw / p.r - p.w / (p.r * p.r) - phi(p)) / v5;
}

FundamentalForms fundamental_forms(const GeometryPoint& p)
{
    require_positive_radius(p, "fundamental_forms");
    const double v = area_element(p.w);
    return {{1.0 + p.w * p.w, p.r * p.r}, {p.dw / v, p.r * p.w / v}};
}

double mean_curvature_derivative(const GeometryPoint& p)
{
    require_positive_radius(p, "mean_curvature_derivative");
    if (!p.ddw) {
        throw DomainError("mean_curvature_derivative: ddw is required");
    }
    const double v2 = 1.0 + p.w * p.w;
    const double v = std::sqrt(v2);
    const double v3 = v2 * v;
    // d/dr [w'/v^3] = w''/v^3 - 3 w w'^2 / v^5
    // d/dr [w/(r v)] = w'/(r v) - w/(r^2 v) - w^2 w'/(r v^3)
    return *p.ddw / v3 - 3.0 * p.w * p.dw * p.dw / (v3 * v2) + p.dw / (p.r * v) -
           p.w / (p.r * p.r * v) - p.w * p.w * p.dw / (p.r * v3);
}

GeometrySample sample(const GeometryPoint& p)
{
    GeometrySample s;
    s.r = p.r;
    s.w = p.w;
    s.dw = p.dw;
    s.v = area_element(p.w);
    s.H = mean_curvature(p);
    s.K = gauss_curvature(p);
    s.A2 = second_form_norm(p);
    if (p.ddw) {
        s.f = flux(p);
    }
    return s;
}

}  // namespace willmore::geometry
