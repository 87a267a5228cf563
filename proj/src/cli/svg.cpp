#include "spinlab/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace spinlab::cli {

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel)
    : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

void SvgPlot::add_line(const std::vector<double>& x, const std::vector<double>& y,
                       const std::string& color) {
    series_.push_back({x, y, color, false});
}

void SvgPlot::add_scatter(const std::vector<double>& x, const std::vector<double>& y,
                          const std::string& color) {
    series_.push_back({x, y, color, true});
}

void SvgPlot::write(const std::string& path) const {
    const double w = 640, h = 480, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series_)
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!std::isfinite(xmin)) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

    std::ostringstream out;
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr << "' y2='" << h - mb
        << "' stroke='black'/>\n";
    out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << h - mb
        << "' stroke='black'/>\n";
    out << "<text x='" << w / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title_
        << "</text>\n";
    out << "<text x='" << w / 2 << "' y='" << h - 12 << "' text-anchor='middle' font-size='12'>"
        << xlabel_ << "</text>\n";
    out << "<text x='16' y='" << h / 2 << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 "
        << h / 2 << ")'>" << ylabel_ << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        double xv = xmin + i * (xmax - xmin) / 4.0;
        double yv = ymin + i * (ymax - ymin) / 4.0;
        out << "<text x='" << px(xv) << "' y='" << h - mb + 16
            << "' text-anchor='middle' font-size='10'>" << xv << "</text>\n";
        out << "<text x='" << ml - 6 << "' y='" << py(yv) + 3
            << "' text-anchor='end' font-size='10'>" << yv << "</text>\n";
    }
    for (const auto& s : series_) {
        if (s.scatter) {
            for (size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                out << "<circle cx='" << px(s.x[i]) << "' cy='" << py(s.y[i])
                    << "' r='2.5' fill='" << s.color << "'/>\n";
            }
        } else {
            out << "<polyline fill='none' stroke='" << s.color << "' points='";
            for (size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
            }
            out << "'/>\n";
        }
    }
    out << "</svg>\n";
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << out.str();
}

} // namespace spinlab::cli
