#include "aplab/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "aplab/errors.hpp"

namespace aplab {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    out.reserve(s.size());
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

double nice_step(double span, int target) {
    const double raw = span / std::max(1, target);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    const double step = norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0;
    return step * mag;
}

struct Range {
    double lo = 0.0, hi = 1.0;
    bool seen = false;
    void add(double v) {
        if (!std::isfinite(v)) return;
        if (!seen) {
            lo = hi = v;
            seen = true;
        } else {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void pad() {
        if (!seen) {
            lo = 0.0;
            hi = 1.0;
        } else if (hi - lo < 1e-12 * std::max(1.0, std::fabs(hi))) {
            const double w = std::max(1e-6, std::fabs(hi)) * 0.5;
            lo -= w;
            hi += w;
        } else {
            const double w = 0.05 * (hi - lo);
            lo -= w;
            hi += w;
        }
    }
};

} // namespace

void write_svg_plot(const PlotSpec& spec, const std::string& path) {
    const double ml = 70.0, mr = 18.0, mt = 42.0, mb = 52.0;
    const double W = spec.width, H = spec.height;
    const double pw = W - ml - mr, ph = H - mt - mb;

    const auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
    const auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
    const auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!spec.log_x || x > 0.0) &&
               (!spec.log_y || y > 0.0);
    };

    Range rx, ry;
    for (const PlotSeries& s : spec.series) {
        const std::size_t n = std::min(s.x.size(), s.y.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            rx.add(tx(s.x[i]));
            ry.add(ty(s.y[i]));
        }
    }
    rx.pad();
    ry.pad();

    const auto px = [&](double v) { return ml + (tx(v) - rx.lo) / (rx.hi - rx.lo) * pw; };
    const auto py = [&](double v) { return mt + (ry.hi - ty(v)) / (ry.hi - ry.lo) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
        << spec.height << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << spec.width << "\" height=\"" << spec.height
        << "\" fill=\"#ffffff\"/>\n";
    svg << "<text x=\"" << fmt(W / 2) << "\" y=\"22\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">"
        << escape_xml(spec.title) << "</text>\n";

    // tick marks and grid lines in transformed coordinates
    const auto emit_ticks = [&](bool horizontal) {
        const Range& r = horizontal ? rx : ry;
        const double step = nice_step(r.hi - r.lo, horizontal ? 6 : 6);
        const double first = std::ceil(r.lo / step) * step;
        for (double t = first; t <= r.hi + 1e-9 * step; t += step) {
            const double tv = std::fabs(t) < 1e-12 * step ? 0.0 : t;
            const double label = (horizontal ? spec.log_x : spec.log_y)
                                     ? std::pow(10.0, tv)
                                     : tv;
            if (horizontal) {
                const double x = ml + (tv - rx.lo) / (rx.hi - rx.lo) * pw;
                svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(x)
                    << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"#dddddd\"/>\n";
                svg << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(mt + ph + 18)
                    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
                    << fmt(label) << "</text>\n";
            } else {
                const double y = mt + (ry.hi - tv) / (ry.hi - ry.lo) * ph;
                svg << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(y) << "\" x2=\""
                    << fmt(ml + pw) << "\" y2=\"" << fmt(y) << "\" stroke=\"#dddddd\"/>\n";
                svg << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(y + 4)
                    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
                    << fmt(label) << "</text>\n";
            }
        }
    };
    emit_ticks(true);
    emit_ticks(false);

    svg << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw)
        << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#444444\"/>\n";
    svg << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(H - 12)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape_xml(spec.x_label) << "</text>\n";
    svg << "<text x=\"16\" y=\"" << fmt(mt + ph / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 "
        << fmt(mt + ph / 2) << ")\">" << escape_xml(spec.y_label) << "</text>\n";

    double legend_y = mt + 16;
    for (const PlotSeries& s : spec.series) {
        const std::size_t n = std::min(s.x.size(), s.y.size());
        if (s.line) {
            std::ostringstream pts;
            bool any = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (!usable(s.x[i], s.y[i])) continue;
                if (any) pts << " ";
                pts << fmt(px(s.x[i])) << "," << fmt(py(s.y[i]));
                any = true;
            }
            if (any)
                svg << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\""
                    << s.color << "\" stroke-width=\"1.5\"/>\n";
        }
        if (s.markers) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!usable(s.x[i], s.y[i])) continue;
                svg << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i]))
                    << "\" r=\"2.6\" fill=\"" << s.color << "\"/>\n";
            }
        }
        if (!s.label.empty()) {
            svg << "<rect x=\"" << fmt(ml + pw - 150) << "\" y=\"" << fmt(legend_y - 9)
                << "\" width=\"10\" height=\"10\" fill=\"" << s.color << "\"/>\n";
            svg << "<text x=\"" << fmt(ml + pw - 136) << "\" y=\"" << fmt(legend_y)
                << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(s.label)
                << "</text>\n";
            legend_y += 16;
        }
    }
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write plot: " + path);
    out << svg.str();
    if (!out) throw IoError("failed while writing plot: " + path);
}

} // namespace aplab
