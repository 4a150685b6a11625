#include "willmore/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <istream>
#include <ostream>
#include <sstream>

#include "willmore/errors.hpp"
#include "willmore/geometry.hpp"

namespace willmore::io {

std::string format_double(double x)
{
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return {buf.data(), res.ptr};
}

std::optional<std::size_t> Table::column_index(std::string_view name) const
{
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(std::distance(columns.begin(), it));
}

std::vector<double> Table::column(std::string_view name) const
{
    const auto idx = column_index(name);
    if (!idx) {
        throw DomainError("table has no column '" + std::string(name) + "'");
    }
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        out.push_back(row[*idx]);
    }
    return out;
}

void write_profile_csv(std::ostream& out, const ode::RadialProfile& profile)
{
    for (std::size_t i = 0; i < kProfileColumns.size(); ++i) {
        out << (i ? "," : "") << kProfileColumns[i];
    }
    out << '\n';
    for (double r : profile.grid()) {
        const auto s = geometry::sample(profile.point_at(r));
        const std::array<double, 8> row = {s.r, s.w, s.dw, s.v, s.H, s.K, s.A2, *s.f};
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << format_double(row[i]);
        }
        out << '\n';
    }
}

namespace {

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

double parse_double(std::string_view field, std::size_t line_no)
{
    double value = 0.0;
    // from_chars rejects a leading '+', which nobody writes here
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        // inf/nan spellings from_chars does not take
        if (field == "inf" || field == "-inf" || field == "nan") {
            return field == "nan" ? NAN : (field[0] == '-' ? -INFINITY : INFINITY);
        }
        throw DomainError("csv line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "'");
    }
    return value;
}

}  // namespace

Table read_csv(std::istream& in)
{
    Table table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line);
        if (table.columns.empty()) {
            for (auto f : fields) {
                table.columns.emplace_back(f);
            }
            continue;
        }
        if (fields.size() != table.columns.size()) {
            throw DomainError("csv line " + std::to_string(line_no) + ": expected " +
                              std::to_string(table.columns.size()) + " fields, got " +
                              std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (auto f : fields) {
            row.push_back(parse_double(f, line_no));
        }
        table.rows.push_back(std::move(row));
    }
    if (table.columns.empty()) {
        throw DomainError("csv: missing header line");
    }
    return table;
}

nlohmann::json profile_metadata(const ode::RadialProfile& profile, bool with_timestamp)
{
    nlohmann::json j;
    j["kind"] = ode::to_string(profile.kind());
    if (const auto* s = std::get_if<ode::SingularData>(&profile.data())) {
        j["lambda"] = s->lambda;
        j["b"] = s->b;
    } else {
        j["a"] = std::get<ode::SmoothData>(profile.data()).a;
    }
    j["r0"] = profile.r0();
    j["tol"] = profile.tol();
    j["stop_reason"] = ode::to_string(profile.stop_reason());
    j["r_last"] = profile.r_last();
    if (with_timestamp) {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm utc{};
        gmtime_r(&now, &utc);
        char buf[32];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
        j["generated_at"] = buf;
    }
    return j;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c",
                                                 "#9467bd", "#ff7f0e", "#17becf"};

std::string fixed2(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", x);
    return buf;
}

std::string tick_label(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", x);
    return buf;
}

std::string xml_escape(std::string_view s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

// Round step to 1, 2 or 5 times a power of ten.
double nice_step(double span, int target_ticks)
{
    const double raw = span / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    const double nice = norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0;
    return nice * mag;
}

struct Range {
    double lo = INFINITY;
    double hi = -INFINITY;

    void add(double x)
    {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    bool empty() const { return !(lo <= hi); }
    void pad()
    {
        if (empty()) {
            lo = 0.0;
            hi = 1.0;
        } else if (lo == hi) {
            const double d = lo == 0.0 ? 1.0 : 0.5 * std::abs(lo);
            lo -= d;
            hi += d;
        }
    }
};

}  // namespace

std::string render_svg(const Table& table, const PlotOptions& options)
{
    const auto x_idx = table.column_index(options.x_column);
    if (!x_idx) {
        throw DomainError("plot: missing x column '" + options.x_column + "'");
    }
    if (options.y_columns.empty()) {
        throw DomainError("plot: no y columns requested");
    }
    std::vector<std::size_t> y_idx;
    for (const auto& name : options.y_columns) {
        const auto idx = table.column_index(name);
        if (!idx) {
            throw DomainError("plot: missing y column '" + name + "'");
        }
        y_idx.push_back(*idx);
    }

    auto x_of = [&](double x) { return options.log_x ? std::log10(x) : x; };
    auto usable = [&](const std::vector<double>& row, std::size_t yi) {
        return std::isfinite(row[*x_idx]) && std::isfinite(row[yi]) && (!options.log_x || row[*x_idx] > 0.0);
    };

    Range xr, yr;
    for (const auto& row : table.rows) {
        for (std::size_t yi : y_idx) {
            if (usable(row, yi)) {
                xr.add(x_of(row[*x_idx]));
                yr.add(row[yi]);
            }
        }
    }
    xr.pad();
    yr.pad();

    const double W = options.width, Hh = options.height;
    const double left = 70.0, right = 20.0, top = 40.0, bottom = 50.0;
    const double pw = W - left - right, ph = Hh - top - bottom;
    auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return top + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
        << options.height << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << options.width << "\" height=\"" << options.height
        << "\" fill=\"white\"/>\n";
    if (!options.title.empty()) {
        svg << "<text x=\"" << fixed2(W / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            << "font-size=\"16\">" << xml_escape(options.title) << "</text>\n";
    }
    svg << "<rect x=\"" << fixed2(left) << "\" y=\"" << fixed2(top) << "\" width=\"" << fixed2(pw)
        << "\" height=\"" << fixed2(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

    svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    const double xs = nice_step(xr.hi - xr.lo, 6);
    for (double t = std::ceil(xr.lo / xs) * xs; t <= xr.hi + 1e-9 * xs; t += xs) {
        const double X = px(t);
        const double label = options.log_x ? std::pow(10.0, t) : (std::abs(t) < 1e-12 * xs ? 0.0 : t);
        svg << "<line x1=\"" << fixed2(X) << "\" y1=\"" << fixed2(top + ph) << "\" x2=\"" << fixed2(X)
            << "\" y2=\"" << fixed2(top + ph + 5) << "\" stroke=\"black\"/>"
            << "<text x=\"" << fixed2(X) << "\" y=\"" << fixed2(top + ph + 18)
            << "\" text-anchor=\"middle\">" << tick_label(label) << "</text>\n";
    }
    const double ys = nice_step(yr.hi - yr.lo, 6);
    for (double t = std::ceil(yr.lo / ys) * ys; t <= yr.hi + 1e-9 * ys; t += ys) {
        const double Y = py(t);
        const double label = std::abs(t) < 1e-12 * ys ? 0.0 : t;
        svg << "<line x1=\"" << fixed2(left - 5) << "\" y1=\"" << fixed2(Y) << "\" x2=\"" << fixed2(left)
            << "\" y2=\"" << fixed2(Y) << "\" stroke=\"black\"/>"
            << "<text x=\"" << fixed2(left - 8) << "\" y=\"" << fixed2(Y + 4) << "\" text-anchor=\"end\">"
            << tick_label(label) << "</text>\n";
    }
    svg << "<text x=\"" << fixed2(left + pw / 2) << "\" y=\"" << fixed2(Hh - 10)
        << "\" text-anchor=\"middle\">" << xml_escape(options.x_column) << (options.log_x ? " (log)" : "")
        << "</text>\n";
    svg << "</g>\n";

    for (std::size_t k = 0; k < y_idx.size(); ++k) {
        svg << "<polyline fill=\"none\" stroke=\"" << kPalette[k % kPalette.size()]
            << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (const auto& row : table.rows) {
            if (!usable(row, y_idx[k])) {
                continue;
            }
            svg << (first ? "" : " ") << fixed2(px(x_of(row[*x_idx]))) << ',' << fixed2(py(row[y_idx[k]]));
            first = false;
        }
        svg << "\"/>\n";
        const double ly = top + 16.0 + 16.0 * static_cast<double>(k);
        svg << "<line x1=\"" << fixed2(left + pw - 90) << "\" y1=\"" << fixed2(ly - 4) << "\" x2=\""
            << fixed2(left + pw - 70) << "\" y2=\"" << fixed2(ly - 4) << "\" stroke=\""
            << kPalette[k % kPalette.size()] << "\" stroke-width=\"2\"/>"
            << "<text x=\"" << fixed2(left + pw - 64) << "\" y=\"" << fixed2(ly)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(options.y_columns[k])
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace willmore::io
