#include "rkm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace rkm::svg {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& s) {
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

void draw_panel(std::ostringstream& out, const Chart& c, int width, int height, int yOffset) {
    const double left = 70, right = 20 + (c.showLegend && !c.series.empty() ? 110 : 0), top = 30, bottom = 45;
    const double pw = width - left - right;
    const double ph = height - top - bottom;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : c.series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (!std::isfinite(xmin)) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return yOffset + top + (ymax - y) / (ymax - ymin) * ph; };

    out << "<g>\n";
    out << "<text x=\"" << num(width / 2.0) << "\" y=\"" << num(yOffset + 18)
        << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(c.title) << "</text>\n";
    out << "<rect x=\"" << num(left) << "\" y=\"" << num(yOffset + top) << "\" width=\"" << num(pw)
        << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"#000\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double xv = xmin + (xmax - xmin) * t / 4.0;
        const double yv = ymin + (ymax - ymin) * t / 4.0;
        out << "<text x=\"" << num(sx(xv)) << "\" y=\"" << num(yOffset + top + ph + 16)
            << "\" text-anchor=\"middle\" font-size=\"10\">" << tick(xv) << "</text>\n";
        out << "<text x=\"" << num(left - 6) << "\" y=\"" << num(sy(yv) + 3)
            << "\" text-anchor=\"end\" font-size=\"10\">" << tick(yv) << "</text>\n";
        out << "<line x1=\"" << num(left) << "\" y1=\"" << num(sy(yv)) << "\" x2=\"" << num(left + pw) << "\" y2=\""
            << num(sy(yv)) << "\" stroke=\"#ddd\"/>\n";
    }
    out << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(yOffset + height - 8)
        << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(c.xLabel) << "</text>\n";
    out << "<text x=\"14\" y=\"" << num(yOffset + top + ph / 2) << "\" text-anchor=\"middle\" font-size=\"12\""
        << " transform=\"rotate(-90 14 " << num(yOffset + top + ph / 2) << ")\">" << escape(c.yLabel) << "</text>\n";

    for (std::size_t k = 0; k < c.series.size(); ++k) {
        const auto& s = c.series[k];
        const std::size_t n = std::min(s.x.size(), s.y.size());
        const std::size_t stride = std::max<std::size_t>(1, (n + kMaxPoints - 1) / kMaxPoints);
        const char* color = kPalette[k % (sizeof kPalette / sizeof *kPalette)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\"";
        if (s.dashed) out << " stroke-dasharray=\"5,3\"";
        out << " points=\"";
        bool first = true;
        for (std::size_t i = 0; i < n; i += stride) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!first) out << ' ';
            out << num(sx(s.x[i])) << ',' << num(sy(s.y[i]));
            first = false;
        }
        if (n > 0 && (n - 1) % stride != 0 && std::isfinite(s.x[n - 1]) && std::isfinite(s.y[n - 1])) {
            out << ' ' << num(sx(s.x[n - 1])) << ',' << num(sy(s.y[n - 1]));
        }
        out << "\"/>\n";
        if (c.showLegend) {
            const double ly = yOffset + top + 12 + 14.0 * k;
            out << "<line x1=\"" << num(left + pw + 8) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(left + pw + 26)
                << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\"/>\n";
            out << "<text x=\"" << num(left + pw + 30) << "\" y=\"" << num(ly + 3) << "\" font-size=\"10\">"
                << escape(s.name) << "</text>\n";
        }
    }
    out << "</g>\n";
}

}  // namespace

std::string render(const std::vector<Chart>& panels, int width, int panelHeight) {
    std::ostringstream out;
    const int height = panelHeight * static_cast<int>(std::max<std::size_t>(1, panels.size()));
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
    for (std::size_t p = 0; p < panels.size(); ++p) {
        draw_panel(out, panels[p], width, panelHeight, static_cast<int>(p) * panelHeight);
    }
    out << "</svg>\n";
    return out.str();
}

std::string render(const Chart& chart, int width, int height) {
    return render(std::vector<Chart>{chart}, width, height);
}

}  // namespace rkm::svg
