#pragma once

#include <array>
#include <optional>

namespace willmore::geometry {

/// Jet of a radial graph z = u(r) at one radius, written in terms of the
/// slope w = u'(r) and its derivatives.
struct GeometryPoint {
    double r = 0.0;
    double w = 0.0;
    double dw = 0.0;
    std::optional<double> ddw;  // only the flux needs u'''
};

/// Pointwise curvature data of a radial graph. H is the sum of the
/// principal curvatures.
struct GeometrySample {
    double r = 0.0;
    double w = 0.0;
    double dw = 0.0;
    double v = 1.0;
    double H = 0.0;
    double K = 0.0;
    double A2 = 0.0;
    std::optional<double> f;
};

/// Diagonal fundamental forms in (r, theta) coordinates.
struct FundamentalForms {
    std::array<double, 2> g{};  // diag(1 + w^2, r^2)
    std::array<double, 2> A{};  // diag(w'/v, r w/v)

    double det_g() const { return g[0] * g[1]; }
    double det_A() const { return A[0] * A[1]; }
    double gauss_curvature() const { return det_A() / det_g(); }
};

double area_element(double w);

double mean_curvature(const GeometryPoint& p);

/// Limit of the mean curvature as r -> 0 for a graph that is smooth at the
/// origin (w(0) = 0).
double mean_curvature_at_origin(double dw0);

double gauss_curvature(const GeometryPoint& p);

/// |A|^2, the sum of squared principal curvatures.
double second_form_norm(const GeometryPoint& p);

/// Nonlinearity of the reduced equation
///   w'' + (w/r)' = phi(r, w, w') [+ lambda v^5 / r].
double phi(const GeometryPoint& p);

/// Radial flux density. r * flux is constant along any radial Willmore graph.
double flux(const GeometryPoint& p);

FundamentalForms fundamental_forms(const GeometryPoint& p);

/// d/dr of the mean curvature, which needs u'''.
double mean_curvature_derivative(const GeometryPoint& p);

/// All pointwise quantities at once; f is filled only when p.ddw is set.
GeometrySample sample(const GeometryPoint& p);

}  // namespace willmore::geometry
