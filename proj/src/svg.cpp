#include "qsk/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "qsk/errors.hpp"

namespace qsk {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

} // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series,
                           int width, int height) {
    if (series.empty()) throw ConfigError("svg chart needs at least one series");

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size() || s.x.empty())
            throw ConfigError("svg series needs matching nonempty x/y");
        for (double v : s.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (double v : s.y) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;
    ymin = std::min(ymin, 0.0);
    ymax *= 1.05;

    const double ml = 75, mr = 20, mt = 45, mb = 55;
    const double pw = width - ml - mr, ph = height - mt - mb;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    std::string out;
    char head[256];
    std::snprintf(head, sizeof(head),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                  "viewBox=\"0 0 %d %d\">\n",
                  width, height, width, height);
    out += head;
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + fmt(width / 2.0) + "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">" + title + "</text>\n";

    // axes with 6 ticks each
    out += "<g stroke=\"#444\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(mt + ph) + "\" x2=\"" + fmt(ml + pw) +
           "\" y2=\"" + fmt(mt + ph) + "\"/>\n";
    out += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(mt) + "\" x2=\"" + fmt(ml) + "\" y2=\"" +
           fmt(mt + ph) + "\"/>\n";
    for (int i = 0; i <= 6; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 6.0;
        const double yv = ymin + (ymax - ymin) * i / 6.0;
        out += "<line x1=\"" + fmt(px(xv)) + "\" y1=\"" + fmt(mt + ph) + "\" x2=\"" + fmt(px(xv)) +
               "\" y2=\"" + fmt(mt + ph + 5) + "\"/>\n";
        out += "<text x=\"" + fmt(px(xv)) + "\" y=\"" + fmt(mt + ph + 18) +
               "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#222\">" + fmt_tick(xv) +
               "</text>\n";
        out += "<line x1=\"" + fmt(ml - 5) + "\" y1=\"" + fmt(py(yv)) + "\" x2=\"" + fmt(ml) +
               "\" y2=\"" + fmt(py(yv)) + "\"/>\n";
        out += "<text x=\"" + fmt(ml - 8) + "\" y=\"" + fmt(py(yv) + 4) +
               "\" text-anchor=\"end\" stroke=\"none\" fill=\"#222\">" + fmt_tick(yv) +
               "</text>\n";
    }
    out += "</g>\n";
    out += "<text x=\"" + fmt(ml + pw / 2) + "\" y=\"" + fmt(height - 12.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + x_label +
           "</text>\n";
    out += "<text x=\"18\" y=\"" + fmt(mt + ph / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 18 " + fmt(mt + ph / 2) + ")\">" + y_label + "</text>\n";

    for (const auto& s : series) {
        out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.6\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            out += fmt(px(s.x[i])) + "," + fmt(py(s.y[i]));
            if (i + 1 < s.x.size()) out += " ";
        }
        out += "\"/>\n";
    }

    // legend
    double ly = mt + 10;
    for (const auto& s : series) {
        out += "<line x1=\"" + fmt(ml + pw - 150) + "\" y1=\"" + fmt(ly) + "\" x2=\"" +
               fmt(ml + pw - 120) + "\" y2=\"" + fmt(ly) + "\" stroke=\"" + s.color +
               "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + fmt(ml + pw - 112) + "\" y=\"" + fmt(ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + s.label + "</text>\n";
        ly += 18;
    }
    out += "</svg>\n";
    return out;
}

} // namespace qsk
