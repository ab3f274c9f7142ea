#include "lnlink/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace lnlink {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
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

}  // namespace

std::string render_chart(const ChartSpec& spec) {
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    bool have_point = false;
    for (const ChartSeries& s : spec.series) {
        for (const auto& [x, y] : s.points) {
            if (!have_point) {
                xmin = xmax = x;
                ymin = ymax = y;
                have_point = true;
            } else {
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        }
    }
    if (!have_point) {
        xmin = ymin = 0.0;
        xmax = ymax = 1.0;
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;
    ymin = std::min(ymin, 0.0);

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
    auto sy = [&](double y) { return kHeight - kBottom - (y - ymin) / (ymax - ymin) * plot_h; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth) << "\" height=\""
       << fmt(kHeight) << "\" viewBox=\"0 0 " << fmt(kWidth) << " " << fmt(kHeight) << "\">\n";
    if (!spec.manifest_hash.empty())
        os << "<!-- manifest: " << escape(spec.manifest_hash) << " -->\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"15\">" << escape(spec.title) << "</text>\n";

    // axes
    os << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kHeight - kBottom) << "\" x2=\""
       << fmt(kWidth - kRight) << "\" y2=\"" << fmt(kHeight - kBottom)
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(kLeft)
       << "\" y2=\"" << fmt(kHeight - kBottom) << "\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 5; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 5.0;
        const double fy = ymin + (ymax - ymin) * i / 5.0;
        os << "<line x1=\"" << fmt(sx(fx)) << "\" y1=\"" << fmt(kHeight - kBottom) << "\" x2=\""
           << fmt(sx(fx)) << "\" y2=\"" << fmt(kHeight - kBottom + 5) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt(sx(fx)) << "\" y=\"" << fmt(kHeight - kBottom + 18)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << fmt(fx)
           << "</text>\n";
        os << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(sy(fy)) << "\" x2=\""
           << fmt(kLeft) << "\" y2=\"" << fmt(sy(fy)) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(sy(fy) + 3)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fmt(fy)
           << "</text>\n";
    }
    os << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << fmt(kHeight - 12)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
       << escape(spec.x_label) << "</text>\n";
    os << "<text x=\"16\" y=\"" << fmt(kTop + plot_h / 2)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
       << "transform=\"rotate(-90 16 " << fmt(kTop + plot_h / 2) << ")\">" << escape(spec.y_label)
       << "</text>\n";

    if (chart_is_empty(spec)) {
        os << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << fmt(kTop + plot_h / 2)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           << "fill=\"#888\">no data</text>\n";
    }

    for (std::size_t si = 0; si < spec.series.size(); ++si) {
        const ChartSeries& s = spec.series[si];
        const char* color = kPalette[si % 6];
        if (spec.bars) {
            const double bw = plot_w / std::max<std::size_t>(1, s.points.size()) * 0.6;
            for (const auto& [x, y] : s.points) {
                os << "<rect x=\"" << fmt(sx(x) - bw / 2) << "\" y=\"" << fmt(sy(y)) << "\" width=\""
                   << fmt(bw) << "\" height=\"" << fmt(sy(ymin) - sy(y)) << "\" fill=\"" << color
                   << "\"/>\n";
            }
        } else if (!s.points.empty()) {
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.points.size(); ++i) {
                if (i) os << " ";
                os << fmt(sx(s.points[i].first)) << "," << fmt(sy(s.points[i].second));
            }
            os << "\"/>\n";
            for (const auto& [x, y] : s.points)
                os << "<circle cx=\"" << fmt(sx(x)) << "\" cy=\"" << fmt(sy(y))
                   << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        }
        // legend
        const double ly = kTop + 8 + 16 * static_cast<double>(si);
        os << "<rect x=\"" << fmt(kWidth - kRight - 150) << "\" y=\"" << fmt(ly - 8)
           << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
        os << "<text x=\"" << fmt(kWidth - kRight - 136) << "\" y=\"" << fmt(ly + 1)
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
    }

    os << "</svg>\n";
    return os.str();
}

}  // namespace lnlink
