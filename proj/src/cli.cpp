#include "willmore/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "willmore/catenoid.hpp"
#include "willmore/errors.hpp"
#include "willmore/radial_ode.hpp"

namespace willmore::cli {

using nlohmann::json;
using verify::VerificationReport;

namespace {

const double kCatenoidB = 2.0 * std::log(2.0) - 3.0;  // Sigma_{1,0} when lambda = -4

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::optional<double> value_if(const CLI::Option* opt, double v)
{
    return opt->count() ? std::optional<double>(v) : std::nullopt;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw UsageError("cannot open '" + path + "' for writing");
    }
    f << text;
}

std::string read_text(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw UsageError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Profile used by the flux and annulus suites.
ode::RadialProfile named_profile(const std::string& name, std::optional<double> a, std::optional<double> lambda,
                                 std::optional<double> b, double r_end, double solver_tol)
{
    if (name == "flat") {
        return ode::integrate(ode::SmoothData{0.0}, r_end, solver_tol);
    }
    if (name == "sphere") {
        return ode::integrate(ode::SmoothData{a.value_or(1.0)}, r_end, solver_tol);
    }
    if (name == "catenoid") {
        return ode::integrate(ode::SingularData{lambda.value_or(-4.0), b.value_or(kCatenoidB)}, r_end, solver_tol);
    }
    throw UsageError("unknown profile '" + name + "' (expected flat, sphere or catenoid)");
}

void require_reached(const ode::RadialProfile& p, double r_end)
{
    if (p.stop_reason() != ode::StopReason::reached_end) {
        throw NumericalError("solver stopped (" + std::string(ode::to_string(p.stop_reason())) + ") at r = " +
                             io::format_double(p.r_last()) + " before " + io::format_double(r_end));
    }
}

struct VerifyParams {
    std::optional<double> a, r_frac, lambda, b, tol, eps, rho, r_lo, r_hi;
    std::optional<std::string> profile;
    std::string csv;
    std::string meta;
};

VerificationReport flux_report(const VerifyParams& p, double solver_tol)
{
    const std::string name = p.profile.value_or(p.lambda ? "catenoid" : "sphere");
    const double tol = p.tol.value_or(100.0 * solver_tol);
    double r_end = 0.9;
    if (name == "sphere") {
        r_end = p.r_frac.value_or(0.99) / std::abs(p.a.value_or(1.0));
    } else if (name == "flat") {
        r_end = 10.0;
    }
    auto profile = named_profile(name, p.a, p.lambda, p.b, r_end, solver_tol);
    require_reached(profile, r_end);
    auto report = verify::verify_flux(profile, tol);
    report.inputs["suite_profile"] = name;
    return report;
}

VerificationReport flux_csv_report(const VerifyParams& p, double solver_tol)
{
    double lambda = p.lambda.value_or(0.0);
    json meta;
    if (!p.meta.empty()) {
        meta = json::parse(read_text(p.meta));
        lambda = meta.value("kind", "smooth") == "singular" ? meta.at("lambda").get<double>() : 0.0;
    }
    std::istringstream in(read_text(p.csv));
    const auto table = io::read_csv(in);
    VerificationReport report;
    report.name = "flux";
    report.inputs = {{"csv", p.csv}, {"lambda", lambda}, {"rows", table.rows.size()}};
    if (!meta.is_null()) {
        report.inputs["meta"] = meta;
    }
    report.measured["max_flux_residual"] = csv_flux_residual(table, lambda);
    report.tolerance["max_flux_residual"] = p.tol.value_or(100.0 * solver_tol);
    report.passed = report.gates_pass();
    return report;
}

VerificationReport annulus_report(const VerifyParams& p, double solver_tol)
{
    const std::string name = p.profile.value_or("sphere");
    const double eps = p.eps.value_or(0.1);
    const double rho = p.rho.value_or(name == "catenoid" ? 0.8 : 0.9);
    auto profile = named_profile(name, p.a, p.lambda, p.b, rho, solver_tol);
    require_reached(profile, rho);
    auto report = verify::verify_annulus(profile, eps, rho, p.tol.value_or(1e-6));
    report.inputs["suite_profile"] = name;
    return report;
}

using Job = std::function<VerificationReport()>;

std::vector<Job> jobs_for(const std::string& suite, const VerifyParams& p, double solver_tol)
{
    const verify::VerifyOptions opts{solver_tol};
    if (suite == "flat") {
        return {[=] { return verify::verify_flat(p.tol.value_or(1e-12), opts); }};
    }
    if (suite == "sphere") {
        return {[=] { return verify::verify_sphere(p.a.value_or(1.0), p.r_frac.value_or(0.99), p.tol.value_or(1e-6), opts); }};
    }
    if (suite == "catenoid") {
        return {[=] {
            return verify::verify_catenoid_match(p.lambda.value_or(-4.0), p.b.value_or(kCatenoidB),
                                                 p.tol.value_or(1e-5), opts);
        }};
    }
    if (suite == "flux") {
        if (!p.csv.empty()) {
            return {[=] { return flux_csv_report(p, solver_tol); }};
        }
        return {[=] { return flux_report(p, solver_tol); }};
    }
    if (suite == "annulus") {
        return {[=] { return annulus_report(p, solver_tol); }};
    }
    if (suite == "hfit") {
        return {[=] {
            return verify::verify_hfit(ode::SingularData{p.lambda.value_or(-4.0), p.b.value_or(kCatenoidB)},
                                       p.r_lo.value_or(1e-5), p.r_hi.value_or(1e-3), p.tol.value_or(0.05), opts);
        }};
    }
    if (suite == "all") {
        std::vector<Job> jobs;
        for (const char* s : {"flat", "sphere", "catenoid", "hfit"}) {
            auto j = jobs_for(s, {}, solver_tol);
            jobs.insert(jobs.end(), j.begin(), j.end());
        }
        for (const char* prof : {"sphere", "catenoid"}) {
            VerifyParams q;
            q.profile = prof;
            jobs.push_back([=] { return flux_report(q, solver_tol); });
            jobs.push_back([=] { return annulus_report(q, solver_tol); });
        }
        return jobs;
    }
    throw UsageError("unknown suite '" + suite + "'");
}

std::vector<VerificationReport> run_jobs(const std::vector<Job>& jobs)
{
    std::vector<std::future<VerificationReport>> futures;
    futures.reserve(jobs.size());
    for (const auto& job : jobs) {
        futures.push_back(std::async(std::launch::async, job));
    }
    std::vector<VerificationReport> reports;
    reports.reserve(jobs.size());
    for (auto& f : futures) {
        reports.push_back(f.get());
    }
    return reports;
}

json catenoid_info(double c, double a_inv)
{
    const catenoid::InvertedCatenoid branch(c, a_inv);
    const double b = catenoid::asymptotic_constant(c, a_inv);
    return json{{"c", c},
                {"a", a_inv},
                {"t_crit", branch.t_crit()},
                {"t_branch", branch.t_branch()},
                {"R", branch.R()},
                {"asymptotic_constant", b},
                {"lambda", -4.0 * c},
                {"b", b},
                {"census_within_bound", branch.census_within_bound()}};
}

}  // namespace

double default_solver_tolerance()
{
    const char* env = std::getenv("WILLMORE_TOL");
    if (env == nullptr || *env == '\0') {
        return verify::kDefaultSolverTolerance;
    }
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !std::isfinite(v) || v <= 0.0) {
        throw DomainError(std::string("WILLMORE_TOL is not a positive number: '") + env + "'");
    }
    return v;
}

double csv_flux_residual(const io::Table& table, double lambda)
{
    const auto r = table.column("r");
    const auto f = table.column("f");
    double worst = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        worst = std::max(worst, std::abs(r[i] * f[i] - lambda));
    }
    return worst;
}

std::vector<VerificationReport> run_suite(const std::string& suite, double solver_tol)
{
    return run_jobs(jobs_for(suite, {}, solver_tol));
}

json aggregate(const std::vector<VerificationReport>& reports)
{
    const bool ok = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed; });
    return json{{"passed", ok}, {"reports", reports}};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Radial Willmore graphs: solve, inspect inverted catenoids, verify, plot", "willmore"};
    app.require_subcommand(1);

    double solver_tol = 0.0;
    CLI::Option* solver_tol_opt = nullptr;

    // solve
    auto* solve = app.add_subcommand("solve", "Integrate a radial profile and export CSV + metadata");
    std::string mode, out_path, meta_path;
    double s_a = 0.0, s_lambda = 0.0, s_b = 0.0, r_end = 0.0, r0 = 0.0;
    bool no_timestamp = false;
    solve->add_option("--mode", mode, "smooth or singular")->required()->check(CLI::IsMember({"smooth", "singular"}));
    auto* s_a_opt = solve->add_option("--a", s_a, "smooth data: H(0)/2");
    auto* s_lambda_opt = solve->add_option("--lambda", s_lambda, "singular data: flux constant");
    auto* s_b_opt = solve->add_option("--b", s_b, "singular data: log-free slope coefficient");
    solve->add_option("--r-end", r_end, "end radius")->required();
    auto* s_tol_opt = solve->add_option("--tol", solver_tol, "solver tolerance");
    solve->add_option("--r0", r0, "series start radius (default per kind)");
    solve->add_option("--out", out_path, "CSV path, '-' for stdout")->required();
    solve->add_option("--meta", meta_path, "metadata JSON path (default: CSV path with .json)");
    solve->add_flag("--no-timestamp", no_timestamp, "omit generated_at from metadata");

    // catenoid
    auto* cat = app.add_subcommand("catenoid", "Branch data of an inverted catenoid");
    double c_c = 0.0, c_a = 0.0, f_lambda = 0.0, f_b = 0.0;
    std::string cat_out;
    auto* c_c_opt = cat->add_option("--c", c_c, "neck size");
    auto* c_a_opt = cat->add_option("--a", c_a, "inversion centre height");
    auto* f_lambda_opt = cat->add_option("--from-lambda", f_lambda, "derive (c, a) from singular data");
    auto* f_b_opt = cat->add_option("--from-b", f_b, "derive (c, a) from singular data");
    cat->add_option("--out", cat_out, "JSON path (default stdout)");

    // verify
    auto* ver = app.add_subcommand("verify", "Run a verification suite");
    std::string suite, ver_out;
    VerifyParams vp;
    double v_a = 0, v_r_frac = 0, v_lambda = 0, v_b = 0, v_tol = 0, v_eps = 0, v_rho = 0, v_lo = 0, v_hi = 0;
    std::string v_profile;
    ver->add_option("suite", suite, "flat|sphere|catenoid|flux|annulus|hfit|all")->required();
    auto* v_a_opt = ver->add_option("--a", v_a);
    auto* v_r_frac_opt = ver->add_option("--r-frac", v_r_frac);
    auto* v_lambda_opt = ver->add_option("--lambda", v_lambda);
    auto* v_b_opt = ver->add_option("--b", v_b);
    auto* v_tol_opt = ver->add_option("--tol", v_tol, "pass threshold");
    auto* v_eps_opt = ver->add_option("--eps", v_eps);
    auto* v_rho_opt = ver->add_option("--rho", v_rho);
    auto* v_lo_opt = ver->add_option("--r-lo", v_lo);
    auto* v_hi_opt = ver->add_option("--r-hi", v_hi);
    auto* v_profile_opt = ver->add_option("--profile", v_profile, "flux/annulus profile: flat|sphere|catenoid");
    auto* v_solver_tol_opt = ver->add_option("--solver-tol", solver_tol, "solver tolerance");
    ver->add_option("--csv", vp.csv, "flux: re-verify an exported profile CSV");
    ver->add_option("--meta", vp.meta, "flux: metadata JSON for --csv (supplies lambda)");
    ver->add_option("--out", ver_out, "JSON path (default stdout)");

    // plot
    auto* plot = app.add_subcommand("plot", "Render CSV columns as SVG");
    std::string plot_in, plot_out;
    io::PlotOptions popts;
    popts.y_columns.clear();
    plot->add_option("--in", plot_in, "profile CSV")->required();
    plot->add_option("--y", popts.y_columns, "columns to plot")->delimiter(',')->required();
    plot->add_option("--x", popts.x_column, "abscissa column");
    plot->add_option("--out", plot_out, "SVG path")->required();
    plot->add_option("--title", popts.title);
    plot->add_flag("--log-x", popts.log_x);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        solver_tol_opt = s_tol_opt->count() ? s_tol_opt : v_solver_tol_opt;
        if (!solver_tol_opt->count()) {
            solver_tol = default_solver_tolerance();
        }

        if (*solve) {
            const bool smooth = mode == "smooth";
            if (smooth && (!s_a_opt->count() || s_lambda_opt->count() || s_b_opt->count())) {
                throw UsageError("smooth mode takes --a and no --lambda/--b");
            }
            if (!smooth && (s_a_opt->count() || !s_lambda_opt->count() || !s_b_opt->count())) {
                throw UsageError("singular mode takes --lambda and --b and no --a");
            }
            const ode::InitialData data =
                smooth ? ode::InitialData{ode::SmoothData{s_a}} : ode::InitialData{ode::SingularData{s_lambda, s_b}};
            ode::IntegratorOptions iopts;
            iopts.r0 = r0;
            const auto profile = ode::integrate(data, r_end, solver_tol, iopts);

            std::ostringstream csv;
            io::write_profile_csv(csv, profile);
            write_text(out_path, csv.str(), out);
            if (meta_path.empty() && out_path != "-") {
                meta_path = std::filesystem::path(out_path).replace_extension(".json").string();
            }
            if (!meta_path.empty()) {
                write_text(meta_path, io::profile_metadata(profile, !no_timestamp).dump(2) + "\n", out);
            }
            if (profile.stop_reason() != ode::StopReason::reached_end) {
                err << "willmore: integration stopped early: stop_reason=" << ode::to_string(profile.stop_reason())
                    << " r_last=" << io::format_double(profile.r_last()) << " (requested " << io::format_double(r_end)
                    << "); partial profile written\n";
                return kNumerical;
            }
            return kOk;
        }

        if (*cat) {
            const bool direct = c_c_opt->count() || c_a_opt->count();
            const bool derived = f_lambda_opt->count() || f_b_opt->count();
            if (direct == derived) {
                throw UsageError("give either --c/--a or --from-lambda/--from-b");
            }
            json info;
            if (direct) {
                if (!c_c_opt->count()) {
                    throw UsageError("--c is required");
                }
                info = catenoid_info(c_c, c_a);
            } else {
                if (!f_lambda_opt->count() || !f_b_opt->count()) {
                    throw UsageError("--from-lambda and --from-b go together");
                }
                const auto params = catenoid::params_from_singular_data(f_lambda, f_b);
                info = catenoid_info(params.c, params.a);
                info["from"] = {{"lambda", f_lambda}, {"b", f_b}};
            }
            write_text(cat_out, info.dump(2) + "\n", out);
            return kOk;
        }

        if (*ver) {
            vp.a = value_if(v_a_opt, v_a);
            vp.r_frac = value_if(v_r_frac_opt, v_r_frac);
            vp.lambda = value_if(v_lambda_opt, v_lambda);
            vp.b = value_if(v_b_opt, v_b);
            vp.tol = value_if(v_tol_opt, v_tol);
            vp.eps = value_if(v_eps_opt, v_eps);
            vp.rho = value_if(v_rho_opt, v_rho);
            vp.r_lo = value_if(v_lo_opt, v_lo);
            vp.r_hi = value_if(v_hi_opt, v_hi);
            if (v_profile_opt->count()) {
                vp.profile = v_profile;
            }
            if (vp.tol && !(*vp.tol >= 0.0)) {
                throw UsageError("--tol must be nonnegative");
            }
            if (suite == "all" && (v_a_opt->count() || v_lambda_opt->count() || v_b_opt->count() ||
                                   v_tol_opt->count() || !vp.csv.empty())) {
                throw UsageError("verify all runs fixed defaults; only --solver-tol and --out apply");
            }
            const auto reports = run_jobs(jobs_for(suite, vp, solver_tol));
            const json j = reports.size() == 1 ? json(reports.front()) : aggregate(reports);
            write_text(ver_out, j.dump(2) + "\n", out);
            const bool ok = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed; });
            return ok ? kOk : kVerificationFailed;
        }

        if (*plot) {
            std::istringstream in(read_text(plot_in));
            const auto table = io::read_csv(in);
            write_text(plot_out, io::render_svg(table, popts), out);
            return kOk;
        }
    } catch (const UsageError& e) {
        err << "willmore: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << "willmore: invalid input: " << e.what() << '\n';
        return kUsage;
    } catch (const json::exception& e) {
        err << "willmore: bad JSON: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericalError& e) {
        err << "willmore: numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        err << "willmore: numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}

}  // namespace willmore::cli
