#include "qsync/sweep/svg.hpp"

#include "qsync/sweep/csv.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace qsync::sweep {

namespace {

constexpr double kWidth = 640, kHeight = 480;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string frame(const PlotLabels& labels)
{
    std::string s = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
        "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        kWidth, kHeight);
    s += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", kWidth / 2,
                     escape(labels.title));
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", kLeft + kPlotW / 2, kHeight - 12,
                     escape(labels.x));
    s += fmt::format("<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
                     kTop + kPlotH / 2, kTop + kPlotH / 2, escape(labels.y));
    return s;
}

std::string tick(double x, double y, const std::string& text, const char* anchor)
{
    return fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"{}\">{}</text>\n", x, y, anchor, escape(text));
}

void save(const std::string& path, const std::string& body)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << body << "</svg>\n";
}

// Fractional index of v on a sorted grid (linear between nodes).
double index_of(const std::vector<double>& grid, double v)
{
    if (grid.size() < 2) return 0.0;
    if (v <= grid.front()) return 0.0;
    if (v >= grid.back()) return static_cast<double>(grid.size() - 1);
    const auto it = std::upper_bound(grid.begin(), grid.end(), v);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
    return static_cast<double>(i) + (v - grid[i]) / (grid[i + 1] - grid[i]);
}

}  // namespace

void write_heatmap_svg(const std::string& path, const Heatmap& map, const PlotLabels& labels)
{
    const std::size_t nx = map.x.size(), ny = map.y.size();
    if (nx == 0 || ny == 0 || map.values.size() != nx * ny) throw std::invalid_argument("heatmap shape mismatch");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : map.values)
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    const double span = hi > lo ? hi - lo : 1.0;
    const double cw = kPlotW / static_cast<double>(nx), ch = kPlotH / static_cast<double>(ny);

    std::string s = frame(labels);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) {
            const double v = map.values[i * ny + j];
            int gray = 255;
            if (std::isfinite(v)) gray = static_cast<int>(std::lround(235.0 * (1.0 - (v - lo) / span)));
            s += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" "
                             "fill=\"rgb({},{},{})\"/>\n",
                             kLeft + static_cast<double>(i) * cw, kTop + kPlotH - static_cast<double>(j + 1) * ch,
                             cw + 0.05, ch + 0.05, gray, gray, gray);
        }
    if (!map.overlay_x.empty()) {
        s += "<polyline fill=\"none\" stroke=\"red\" stroke-width=\"2\" stroke-dasharray=\"6 4\" points=\"";
        for (std::size_t k = 0; k < map.overlay_x.size(); ++k) {
            const double px = kLeft + (index_of(map.x, map.overlay_x[k]) + 0.5) * cw;
            const double py = kTop + kPlotH - (index_of(map.y, map.overlay_y[k]) + 0.5) * ch;
            s += fmt::format("{:.2f},{:.2f} ", px, py);
        }
        s += "\"/>\n";
    }
    s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft,
                     kTop, kPlotW, kPlotH);
    s += tick(kLeft, kTop + kPlotH + 16, format_number(map.x.front()), "start");
    s += tick(kLeft + kPlotW, kTop + kPlotH + 16, format_number(map.x.back()), "end");
    s += tick(kLeft - 4, kTop + kPlotH, format_number(map.y.front()), "end");
    s += tick(kLeft - 4, kTop + 10, format_number(map.y.back()), "end");
    s += tick(kWidth - kRight, kTop - 6, "range " + format_number(lo) + " .. " + format_number(hi), "end");
    save(path, s);
}

void write_lines_svg(const std::string& path, const std::vector<Series>& series, const PlotLabels& labels)
{
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& sr : series)
        for (std::size_t k = 0; k < sr.x.size() && k < sr.y.size(); ++k) {
            if (!std::isfinite(sr.x[k]) || !std::isfinite(sr.y[k])) continue;
            x0 = std::min(x0, sr.x[k]);
            x1 = std::max(x1, sr.x[k]);
            y0 = std::min(y0, sr.y[k]);
            y1 = std::max(y1, sr.y[k]);
        }
    if (!(x1 >= x0)) x0 = 0, x1 = 1;
    if (!(y1 >= y0)) y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;

    static const char* shades[] = {"black", "#555555", "#999999", "#333333", "#777777", "#bbbbbb"};
    static const char* dashes[] = {"", "6 3", "2 2", "8 3 2 3", "4 4", "1 3"};
    std::string s = frame(labels);
    for (std::size_t n = 0; n < series.size(); ++n) {
        const auto& sr = series[n];
        std::string pts;
        for (std::size_t k = 0; k < sr.x.size() && k < sr.y.size(); ++k) {
            if (!std::isfinite(sr.x[k]) || !std::isfinite(sr.y[k])) continue;
            pts += fmt::format("{:.2f},{:.2f} ", kLeft + (sr.x[k] - x0) / (x1 - x0) * kPlotW,
                               kTop + kPlotH - (sr.y[k] - y0) / (y1 - y0) * kPlotH);
        }
        s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" stroke-dasharray=\"{}\" "
                         "points=\"{}\"/>\n",
                         shades[n % 6], dashes[n % 6], pts);
        s += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", kLeft + 8, kTop + 16 + 14 * n,
                         shades[n % 6], escape(sr.name));
    }
    s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft,
                     kTop, kPlotW, kPlotH);
    s += tick(kLeft, kTop + kPlotH + 16, format_number(x0), "start");
    s += tick(kLeft + kPlotW, kTop + kPlotH + 16, format_number(x1), "end");
    s += tick(kLeft - 4, kTop + kPlotH, format_number(y0), "end");
    s += tick(kLeft - 4, kTop + 10, format_number(y1), "end");
    save(path, s);
}

}  // namespace qsync::sweep
