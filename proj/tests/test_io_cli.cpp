#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include <doctest.h>

#include "support.hpp"
#include "willmore/cli.hpp"
#include "willmore/errors.hpp"
#include "willmore/geometry.hpp"
#include "willmore/io.hpp"
#include "willmore/radial_ode.hpp"

using namespace willmore;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli_run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

// Fresh scratch directory per test case.
struct TempDir {
    fs::path path;
    TempDir()
    {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("willmore_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

io::Table load(const std::string& path)
{
    std::istringstream in(slurp(path));
    return io::read_csv(in);
}

// Sets an environment variable for one scope.
struct EnvGuard {
    std::string name;
    EnvGuard(const char* n, const char* value) : name(n) { ::setenv(n, value, 1); }
    ~EnvGuard() { ::unsetenv(name.c_str()); }
};

const std::string kB10 = "-1.6137056";

}  // namespace

// ---------------------------------------------------------------------------
// io

TEST_CASE("format_double is the shortest round-trip form")
{
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(1e-6) == "1e-06");
    CHECK(io::format_double(-0.0) == "-0");
    testing::Gen gen(30);
    for (int i = 0; i < 10000; ++i) {
        const double x = gen.signed_log_uniform(1e-300, 1e300);
        std::istringstream in("x\n" + io::format_double(x) + "\n");
        const double back = io::read_csv(in).rows.at(0).at(0);
        REQUIRE(std::memcmp(&back, &x, sizeof x) == 0);
    }
}

TEST_CASE("profile CSV round trip is bit exact")
{
    const auto p = ode::integrate(ode::SingularData{-4.0, 2 * std::log(2.0) - 3}, 0.9, 1e-10);
    std::ostringstream out;
    io::write_profile_csv(out, p);
    const std::string text = out.str();
    CHECK(text.substr(0, text.find('\n')) == "r,w,dw,v,H,K,A2,f");

    std::istringstream in(text);
    const auto t = io::read_csv(in);
    REQUIRE(t.rows.size() == p.grid().size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto s = geometry::sample(p.point_at(p.grid()[i]));
        const double expect[] = {s.r, s.w, s.dw, s.v, s.H, s.K, s.A2, *s.f};
        for (int k = 0; k < 8; ++k) {
            REQUIRE(t.rows[i][k] == expect[k]);
        }
    }
}

TEST_CASE("read_csv rejects malformed input")
{
    std::istringstream ragged("a,b\n1,2\n3\n");
    CHECK_THROWS_AS(io::read_csv(ragged), DomainError);
    std::istringstream bad("a,b\n1,zz\n");
    CHECK_THROWS_AS(io::read_csv(bad), DomainError);
    std::istringstream empty("");
    CHECK_THROWS_AS(io::read_csv(empty), DomainError);
    std::istringstream crlf("a,b\r\n1,2\r\n");
    CHECK(io::read_csv(crlf).rows.at(0).at(1) == 2.0);
    std::istringstream ok("a\n1\n");
    CHECK_THROWS_AS(io::read_csv(ok).column("zz"), DomainError);
}

TEST_CASE("profile metadata")
{
    const auto p = ode::integrate(ode::SmoothData{1.0}, 0.5, 1e-10);
    const auto j = io::profile_metadata(p, false);
    CHECK(j.at("kind") == "smooth");
    CHECK(j.at("a") == 1.0);
    CHECK_FALSE(j.contains("lambda"));
    CHECK(j.at("r0") == 1e-4);
    CHECK(j.at("tol") == 1e-10);
    CHECK(j.at("stop_reason") == "reached-end");
    CHECK(j.at("r_last") == 0.5);
    CHECK_FALSE(j.contains("generated_at"));
    CHECK(io::profile_metadata(p, true).contains("generated_at"));

    const auto q = ode::integrate(ode::SingularData{2.0, 0.5}, 0.1, 1e-10);
    const auto k = io::profile_metadata(q, false);
    CHECK(k.at("kind") == "singular");
    CHECK(k.at("lambda") == 2.0);
    CHECK(k.at("b") == 0.5);
    CHECK_FALSE(k.contains("a"));
}

TEST_CASE("render_svg")
{
    io::Table t;
    t.columns = {"r", "w", "z"};
    for (int i = 0; i <= 20; ++i) {
        t.rows.push_back({0.05 * i, 0.1 * i * i, 0.0});
    }
    io::PlotOptions opts;
    opts.y_columns = {"w"};
    const auto a = io::render_svg(t, opts);
    CHECK(a == io::render_svg(t, opts));
    CHECK(a.rfind("<svg", 0) == 0);
    CHECK(a.find("<polyline") != std::string::npos);
    CHECK(a.find("</svg>") != std::string::npos);

    // an all-zero column draws a horizontal line
    opts.y_columns = {"z"};
    const auto z = io::render_svg(t, opts);
    const auto start = z.find("points=\"") + 8;
    std::istringstream pts(z.substr(start, z.find('"', start) - start));
    std::string pair;
    std::set<std::string> ys;
    while (pts >> pair) {
        ys.insert(pair.substr(pair.find(',') + 1));
    }
    CHECK(ys.size() == 1);

    opts.y_columns = {"missing"};
    CHECK_THROWS_AS(io::render_svg(t, opts), DomainError);
    opts.y_columns = {"w"};
    opts.x_column = "nope";
    CHECK_THROWS_AS(io::render_svg(t, opts), DomainError);

    // log-x drops the r = 0 row
    opts.x_column = "r";
    opts.log_x = true;
    const auto l = io::render_svg(t, opts);
    CHECK(l.find("(log)") != std::string::npos);
}

// ---------------------------------------------------------------------------
// cli

TEST_CASE("cli solve")
{
    TempDir dir;
    auto r = cli_run({"solve", "--mode", "smooth", "--a", "1", "--r-end", "0.99", "--tol", "1e-10", "--out",
                      dir / "sphere.csv"});
    REQUIRE(r.code == 0);
    const auto t = load(dir / "sphere.csv");
    CHECK(t.rows.back()[0] == 0.99);
    CHECK(t.rows.back()[1] == doctest::Approx(0.99 / std::sqrt(1 - 0.9801)).epsilon(1e-8));
    CHECK(t.rows.back()[1] == doctest::Approx(7.0178).epsilon(1e-4));
    const auto meta = nlohmann::json::parse(slurp(dir / "sphere.json"));
    CHECK(meta.at("kind") == "smooth");
    CHECK(meta.contains("generated_at"));

    r = cli_run({"solve", "--mode", "smooth", "--a", "0", "--r-end", "10", "--out", dir / "flat.csv", "--meta",
                 dir / "flat_meta.json", "--no-timestamp"});
    REQUIRE(r.code == 0);
    for (double w : load(dir / "flat.csv").column("w")) {
        REQUIRE(w == 0.0);
    }
    CHECK_FALSE(nlohmann::json::parse(slurp(dir / "flat_meta.json")).contains("generated_at"));

    r = cli_run({"solve", "--mode", "singular", "--lambda", "-4", "--b", kB10, "--r-end", "0.9", "--out",
                 dir / "cat.csv", "--no-timestamp"});
    REQUIRE(r.code == 0);
    const auto c = load(dir / "cat.csv");
    CHECK(cli::csv_flux_residual(c, -4.0) <= 1e-6);

    // stdout output, no metadata file
    r = cli_run({"solve", "--mode", "smooth", "--a", "1", "--r-end", "0.5", "--out", "-"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("r,w,dw,v,H,K,A2,f\n", 0) == 0);
}

TEST_CASE("cli solve is deterministic without a timestamp")
{
    TempDir dir;
    for (const char* name : {"a", "b"}) {
        REQUIRE(cli_run({"solve", "--mode", "singular", "--lambda", "2", "--b", "0.5", "--r-end", "0.3", "--out",
                         dir / (std::string(name) + ".csv"), "--no-timestamp"})
                    .code == 0);
    }
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
}

TEST_CASE("cli solve blow-up writes a partial profile and exits 3")
{
    TempDir dir;
    const auto r = cli_run({"solve", "--mode", "smooth", "--a", "1", "--r-end", "1.5", "--out", dir / "p.csv"});
    CHECK(r.code == cli::kNumerical);
    CHECK(r.err.find("stop_reason=slope-blowup") != std::string::npos);
    const auto t = load(dir / "p.csv");
    CHECK(t.rows.back()[0] <= 1.0 + 1e-9);
    CHECK(nlohmann::json::parse(slurp(dir / "p.json")).at("stop_reason") == "slope-blowup");
}

TEST_CASE("cli usage errors exit 2")
{
    TempDir dir;
    const auto out = dir / "x.csv";
    CHECK(cli_run({}).code == cli::kUsage);
    CHECK(cli_run({"bogus"}).code == cli::kUsage);
    CHECK(cli_run({"solve", "--mode", "smooth", "--lambda", "1", "--b", "0", "--r-end", "1", "--out", out}).code ==
          cli::kUsage);
    CHECK(cli_run({"solve", "--mode", "singular", "--a", "1", "--r-end", "1", "--out", out}).code == cli::kUsage);
    CHECK(cli_run({"solve", "--mode", "sideways", "--a", "1", "--r-end", "1", "--out", out}).code == cli::kUsage);
    CHECK(cli_run({"solve", "--mode", "smooth", "--a", "1", "--r-end", "-1", "--out", out}).code == cli::kUsage);
    CHECK(cli_run({"solve", "--mode", "smooth", "--a", "1", "--r-end", "0.5", "--tol", "0", "--out", out}).code ==
          cli::kUsage);
    CHECK(cli_run({"solve", "--mode", "smooth", "--a", "nan", "--r-end", "0.5", "--out", out}).code == cli::kUsage);
    CHECK(cli_run({"catenoid", "--c", "0", "--a", "0"}).code == cli::kUsage);
    CHECK(cli_run({"catenoid", "--c", "1", "--from-lambda", "-4"}).code == cli::kUsage);
    CHECK(cli_run({"catenoid", "--from-lambda", "0", "--from-b", "1"}).code == cli::kUsage);
    CHECK(cli_run({"verify", "nonsense"}).code == cli::kUsage);
    CHECK(cli_run({"verify", "all", "--a", "2"}).code == cli::kUsage);
    CHECK(cli_run({"verify", "sphere", "--tol", "-1"}).code == cli::kUsage);
    CHECK(cli_run({"plot", "--in", dir / "missing.csv", "--y", "w", "--out", dir / "p.svg"}).code == cli::kUsage);
    CHECK(cli_run({"--help"}).code == cli::kOk);
}

TEST_CASE("cli catenoid")
{
    auto r = cli_run({"catenoid", "--c", "1", "--a", "0"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("t_crit") == nlohmann::json::array({0.0}));
    CHECK(j.at("R").get<double>() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(j.at("lambda").get<double>() == -4.0);

    r = cli_run({"catenoid", "--from-lambda", "-4", "--from-b", kB10});
    REQUIRE(r.code == 0);
    j = nlohmann::json::parse(r.out);
    CHECK(j.at("c").get<double>() == 1.0);
    CHECK(std::abs(j.at("a").get<double>()) <= 1e-6);
    CHECK(j.at("from").at("lambda").get<double>() == -4.0);
}

TEST_CASE("cli verify exit codes")
{
    auto r = cli_run({"verify", "sphere"});
    CHECK(r.code == cli::kOk);
    CHECK(nlohmann::json::parse(r.out).at("passed") == true);
    r = cli_run({"verify", "sphere", "--tol", "1e-16"});
    CHECK(r.code == cli::kVerificationFailed);
    CHECK(nlohmann::json::parse(r.out).at("passed") == false);
    CHECK(cli_run({"verify", "catenoid"}).code == cli::kOk);
    CHECK(cli_run({"verify", "flat"}).code == cli::kOk);
    CHECK(cli_run({"verify", "hfit"}).code == cli::kOk);
    CHECK(cli_run({"verify", "annulus", "--profile", "catenoid"}).code == cli::kOk);
}

TEST_CASE("cli verify all aggregates every suite")
{
    TempDir dir;
    const auto r = cli_run({"verify", "all", "--out", dir / "all.json"});
    CHECK(r.code == cli::kOk);
    const auto j = nlohmann::json::parse(slurp(dir / "all.json"));
    CHECK(j.at("passed") == true);
    std::set<std::string> names;
    for (const auto& rep : j.at("reports")) {
        CHECK(rep.at("passed") == true);
        names.insert(rep.at("name").get<std::string>());
    }
    CHECK(j.at("reports").size() == 8);
    CHECK(names.size() >= 6);

    // the aggregate fails if any member fails
    auto reports = cli::run_suite("all", 1e-10);
    CHECK(cli::aggregate(reports).at("passed") == true);
    reports.front().passed = false;
    CHECK(cli::aggregate(reports).at("passed") == false);
}

TEST_CASE("WILLMORE_TOL sets the default solver tolerance")
{
    TempDir dir;
    {
        EnvGuard env("WILLMORE_TOL", "1e-8");
        CHECK(cli::default_solver_tolerance() == 1e-8);
        REQUIRE(cli_run({"solve", "--mode", "smooth", "--a", "1", "--r-end", "0.5", "--out", dir / "e.csv"}).code ==
                0);
        CHECK(nlohmann::json::parse(slurp(dir / "e.json")).at("tol") == 1e-8);
        // an explicit flag wins
        REQUIRE(cli_run({"solve", "--mode", "smooth", "--a", "1", "--r-end", "0.5", "--tol", "1e-9", "--out",
                         dir / "f.csv"})
                    .code == 0);
        CHECK(nlohmann::json::parse(slurp(dir / "f.json")).at("tol") == 1e-9);
    }
    {
        EnvGuard env("WILLMORE_TOL", "tiny");
        CHECK_THROWS_AS(cli::default_solver_tolerance(), DomainError);
        CHECK(cli_run({"solve", "--mode", "smooth", "--a", "1", "--r-end", "0.5", "--out", dir / "g.csv"}).code ==
              cli::kUsage);
    }
    CHECK(cli::default_solver_tolerance() == 1e-10);
}

TEST_CASE("property: flux residual survives the CSV round trip")
{
    TempDir dir;
    testing::Gen gen(31);
    for (int i = 0; i < 12; ++i) {
        const double lambda = gen.signed_log_uniform(0.5, 8.0);
        const double b = gen.uniform(-2.0, 2.0);
        const double r_end = gen.uniform(0.05, 0.5);
        const auto profile = ode::integrate(ode::SingularData{lambda, b}, r_end, 1e-10);
        INFO("lambda=" << lambda << " b=" << b << " stop=" << ode::to_string(profile.stop_reason()));

        const auto csv = dir / "p.csv";
        const auto meta = dir / "p.json";
        std::ofstream(csv) << [&] {
            std::ostringstream s;
            io::write_profile_csv(s, profile);
            return s.str();
        }();
        std::ofstream(meta) << io::profile_metadata(profile, false).dump();

        // only the range where the profile is well conditioned
        const double edge = profile.stop_reason() == ode::StopReason::reached_end ? r_end : 0.95 * profile.r_last();
        io::Table t = load(csv);
        std::erase_if(t.rows, [&](const auto& row) { return row[0] > edge; });
        double in_memory = 0.0;
        for (double r : profile.grid()) {
            if (r <= edge) {
                in_memory = std::max(in_memory, std::abs(r * *geometry::sample(profile.point_at(r)).f - lambda));
            }
        }
        CHECK(std::abs(cli::csv_flux_residual(t, lambda) - in_memory) <= 1e-12);

        if (profile.stop_reason() == ode::StopReason::reached_end) {
            const auto r = cli_run({"verify", "flux", "--csv", csv, "--meta", meta, "--tol", "1e-3"});
            CHECK(r.code == cli::kOk);
            const auto direct = verify::verify_flux(profile, 1e-3);
            CHECK(std::abs(nlohmann::json::parse(r.out).at("measured").at("max_flux_residual").get<double>() -
                           direct.measured.at("max_flux_residual")) <= 1e-12);
        }
    }
}

TEST_CASE("cli plot")
{
    TempDir dir;
    REQUIRE(cli_run({"solve", "--mode", "smooth", "--a", "0", "--r-end", "2", "--out", dir / "flat.csv"}).code == 0);
    REQUIRE(cli_run({"plot", "--in", dir / "flat.csv", "--y", "w,H", "--out", dir / "a.svg"}).code == 0);
    REQUIRE(cli_run({"plot", "--in", dir / "flat.csv", "--y", "w,H", "--out", dir / "b.svg"}).code == 0);
    CHECK(slurp(dir / "a.svg") == slurp(dir / "b.svg"));
    CHECK(slurp(dir / "a.svg").find("<polyline") != std::string::npos);
    CHECK(cli_run({"plot", "--in", dir / "flat.csv", "--y", "nope", "--out", dir / "c.svg"}).code == cli::kUsage);
}
