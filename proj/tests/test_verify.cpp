#include <cmath>

#include <doctest.h>

#include "willmore/errors.hpp"
#include "willmore/radial_ode.hpp"
#include "willmore/verify.hpp"

using namespace willmore;
using namespace willmore::verify;

namespace {

const double kB10 = 2 * std::log(2.0) - 3;

}  // namespace

TEST_CASE("gates: only keys with a tolerance decide passed")
{
    VerificationReport r;
    CHECK_FALSE(r.gates_pass());  // nothing gated is not a pass
    r.measured["x"] = 1.0;
    r.measured["info"] = 1e9;
    r.tolerance["x"] = 1.0;
    CHECK(r.gates_pass());
    r.measured["x"] = std::nextafter(1.0, 2.0);
    CHECK_FALSE(r.gates_pass());
    r.measured["x"] = NAN;
    CHECK_FALSE(r.gates_pass());
    r.measured.erase("x");
    CHECK_FALSE(r.gates_pass());
}

TEST_CASE("verify_flat")
{
    const auto r = verify_flat(1e-10);
    CHECK(r.passed);
    CHECK(r.measured.at("sup_abs_w") <= 1e-12);
    // the zero solution is reproduced exactly, so even tol = 0 passes
    const auto z = verify_flat(0.0);
    CHECK(z.measured.at("sup_abs_w") == 0.0);
    CHECK(z.passed);

    // report JSON round trip
    const nlohmann::json j = r;
    const auto back = j.get<VerificationReport>();
    CHECK(nlohmann::json(back) == j);
    CHECK(back.measured == r.measured);
    CHECK(back.tolerance == r.tolerance);
    CHECK(back.passed == r.passed);
    for (const char* key : {"name", "inputs", "measured", "tolerance", "passed", "runtime_s"}) {
        CHECK(j.contains(key));
    }
}

TEST_CASE("verify_sphere")
{
    CHECK(verify_sphere(1, 0.99, 1e-6).passed);
    for (double a : {-2.0, -1.0, -0.5, 0.5, 2.0}) {
        CHECK(verify_sphere(a, 0.99, 1e-6).passed);
    }
    const auto m = verify_sphere(-2, 0.9, 1e-6);
    CHECK(m.passed);
    const auto p = ode::integrate(ode::SmoothData{2.0}, 0.45, 1e-10);
    const auto q = ode::integrate(ode::SmoothData{-2.0}, 0.45, 1e-10);
    for (std::size_t i = 0; i < p.grid().size(); ++i) {
        REQUIRE(q.states()[i].w == -p.states()[i].w);
    }

    // approaching the equator: the solver still resolves r >= 0.99999
    const auto edge = verify_sphere(1, 0.999999, 1e-3);
    CHECK(edge.inputs.at("profile").at("r_last").get<double>() >= 0.99999);

    CHECK_FALSE(verify_sphere(1, 0.99, 1e-16).passed);
    CHECK_THROWS_AS(verify_sphere(0, 0.5, 1e-6), DomainError);
    CHECK_THROWS_AS(verify_sphere(1, 1.0, 1e-6), DomainError);
}

TEST_CASE("verify_catenoid_match")
{
    const auto r = verify_catenoid_match(-4, kB10, 1e-5);
    CHECK(r.passed);
    CHECK(r.inputs.at("c").get<double>() == 1.0);
    CHECK(r.inputs.at("R").get<double>() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.measured.at("max_flux_residual") <= 1e-5);
    CHECK(r.measured.at("critical_point_count") == 1.0);

    const auto s = verify_catenoid_match(4, 0, 1e-5);
    CHECK(s.passed);
    CHECK(s.inputs.at("c").get<double>() == -1.0);
    CHECK(s.inputs.at("a").get<double>() == doctest::Approx(0.806853).epsilon(1e-6));

    for (double lambda : {-8.0, -4.0, 4.0}) {
        for (double b : {-1.0, 0.0, 1.0}) {
            INFO("lambda=" << lambda << " b=" << b);
            CHECK(verify_catenoid_match(lambda, b, 1e-4).passed);
        }
    }
    CHECK_THROWS_AS(verify_catenoid_match(0, 1, 1e-5), DomainError);
}

TEST_CASE("verify_flux")
{
    const auto sphere = ode::integrate(ode::SmoothData{1.0}, 0.99, 1e-10);
    CHECK(verify_flux(sphere, 1e-6).passed);
    const auto flat = ode::integrate(ode::SmoothData{0.0}, 10.0, 1e-10);
    CHECK(verify_flux(flat, 0.0).measured.at("max_flux_residual") == 0.0);
    const auto cat = ode::integrate(ode::SingularData{-4.0, kB10}, 0.9, 1e-10);
    CHECK(verify_flux(cat, 1e-5).passed);
}

TEST_CASE("verify_annulus")
{
    const auto sphere = ode::integrate(ode::SmoothData{1.0}, 0.95, 1e-10);
    const auto s = verify_annulus(sphere, 0.1, 0.9, 1e-8);
    CHECK(s.passed);
    CHECK(s.measured.at("rhs") ==
          doctest::Approx(4 * M_PI * (std::sqrt(1 - 0.81) - std::sqrt(1 - 0.01))).epsilon(1e-9));
    const auto flat = ode::integrate(ode::SmoothData{0.0}, 2.0, 1e-10);
    const auto f = verify_annulus(flat, 0.1, 1.5, 0.0);
    CHECK(f.measured.at("lhs") == 0.0);
    CHECK(f.measured.at("rhs") == 0.0);
    CHECK(f.passed);
    const auto cat = ode::integrate(ode::SingularData{-4.0, kB10}, 0.9, 1e-10);
    CHECK(verify_annulus(cat, 0.1, 0.8, 1e-6).passed);
    CHECK_THROWS_AS(verify_annulus(sphere, 0.0, 0.5, 1e-6), DomainError);
}

TEST_CASE("fit_H_decomposition")
{
    const auto cat = ode::integrate(ode::SingularData{-4.0, kB10}, 0.01, 1e-10);
    const auto fit = fit_H_decomposition(cat, 1e-5, 1e-3);
    CHECK(fit.K1 == doctest::Approx(-4.0).epsilon(0.05));
    CHECK(fit.samples >= 10);

    const auto sphere = ode::integrate(ode::SmoothData{0.7}, 1.0, 1e-10);
    const auto s = fit_H_decomposition(sphere, 1e-3, 1.0);
    CHECK(std::abs(s.K1) <= 1e-8);
    CHECK(s.K2 == doctest::Approx(1.4).epsilon(1e-8));

    // zero error lets the step grow fast, so the flat grid is sparse
    const auto flat = ode::integrate(ode::SmoothData{0.0}, 100.0, 1e-10);
    const auto z = fit_H_decomposition(flat, flat.r0(), 100.0);
    CHECK(z.K1 == 0.0);
    CHECK(z.K2 == 0.0);

    CHECK_THROWS_AS(fit_H_decomposition(cat, 1e-5, 1.1e-5), DomainError);
    CHECK_THROWS_AS(fit_H_decomposition(cat, 1e-3, 1e-5), DomainError);
}

TEST_CASE("verify_hfit records both normalisations")
{
    const auto r = verify_hfit({-4.0, kB10}, 1e-5, 1e-3, 0.05);
    CHECK(r.passed);
    CHECK(r.inputs.at("stated_log_coefficient").get<double>() == -2.0);
    CHECK(r.inputs.at("derived_log_coefficient").get<double>() == -4.0);
    CHECK(r.measured.at("K1") >= -4.2);
    CHECK(r.measured.at("K1") <= -3.8);
    CHECK(r.measured.at("K1_rel_gap_stated") > 0.9);
    CHECK(r.tolerance.count("K1_rel_gap_stated") == 0);
}

TEST_CASE("property: K1 tracks lambda for windows below 1e-3")
{
    for (double lambda : {-8.0, -4.0, -1.0, 2.0, 6.0}) {
        for (double b : {-1.0, 0.5}) {
            for (auto [lo, hi] : {std::pair{1e-5, 1e-3}, {1e-6, 1e-4}, {1e-5, 3e-4}}) {
                const auto r = verify_hfit({lambda, b}, lo, hi, 0.05);
                INFO("lambda=" << lambda << " b=" << b << " window=[" << lo << "," << hi << "] K1=" << r.measured.at("K1"));
                CHECK(r.passed);
            }
        }
    }
}

TEST_CASE("property: reports are deterministic")
{
    const auto a = verify_catenoid_match(-4, kB10, 1e-5);
    const auto b = verify_catenoid_match(-4, kB10, 1e-5);
    CHECK(a.measured == b.measured);
    CHECK(a.inputs == b.inputs);
    const auto c = verify_hfit({-4.0, kB10}, 1e-5, 1e-3, 0.05);
    const auto d = verify_hfit({-4.0, kB10}, 1e-5, 1e-3, 0.05);
    CHECK(c.measured == d.measured);
}
