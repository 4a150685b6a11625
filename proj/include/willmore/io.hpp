#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "willmore/radial_ode.hpp"

namespace willmore::io {

inline constexpr std::array<std::string_view, 8> kProfileColumns = {"r", "w", "dw", "v",
                                                                     "H", "K", "A2", "f"};

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::optional<std::size_t> column_index(std::string_view name) const;
    std::vector<double> column(std::string_view name) const;
};

/// One row per solver grid point with header r,w,dw,v,H,K,A2,f.
void write_profile_csv(std::ostream& out, const ode::RadialProfile& profile);

/// Parses a header line and rows of numbers. Throws DomainError on ragged
/// rows or unparsable fields.
Table read_csv(std::istream& in);

/// {kind, a | lambda, b, r0, tol, stop_reason, r_last [, generated_at]}.
nlohmann::json profile_metadata(const ode::RadialProfile& profile, bool with_timestamp);

struct PlotOptions {
    std::string x_column = "r";
    std::vector<std::string> y_columns = {"w"};
    bool log_x = false;
    int width = 800;
    int height = 500;
    std::string title;
};

/// Self-contained SVG with one polyline per y column, linear (or log-x)
/// axes, ticks and a legend. Byte-identical output for identical input.
std::string render_svg(const Table& table, const PlotOptions& options);

}  // namespace willmore::io
