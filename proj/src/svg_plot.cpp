#include "emoidx/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "emoidx/error.hpp"

namespace emoidx {

namespace {

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// 1-2-5 tick step covering `range` in about `target` intervals.
double nice_step(double range, int target) {
    const double raw = range / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) return m * mag;
    }
    return 10.0 * mag;
}

std::string tick_label(double v, double step) {
    const int decimals = std::max(0, static_cast<int>(-std::floor(std::log10(step))));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, std::abs(v) < step * 1e-9 ? 0.0 : v);
    return buf;
}

} // namespace

std::string color_for(const std::string& label, std::size_t fallback_index) {
    static const std::map<std::string, std::string> kEmotion = {
        {"Anger", "#d62728"},   {"Confusion", "#9467bd"}, {"Depression", "#1f77b4"}, {"Fatigue", "#8c564b"},
        {"Friendliness", "#e377c2"}, {"Tension", "#ff7f0e"}, {"Vigor", "#2ca02c"},
    };
    static const char* kPalette[] = {"#17becf", "#bcbd22", "#7f7f7f", "#393b79", "#637939", "#8c6d31"};
    if (const auto it = kEmotion.find(label); it != kEmotion.end()) return it->second;
    return kPalette[fallback_index % std::size(kPalette)];
}

std::string render_svg(const std::vector<PlotLine>& lines, const PlotOptions& options) {
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -ymin;
    Day dmin = Day::max();
    Day dmax = Day::min();
    for (const auto& l : lines) {
        for (const auto& [d, v] : l.values) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
        }
    }
    if (!std::isfinite(ymin)) throw DataError("plot: nothing to draw");
    if (ymax - ymin < 1e-12) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    const double left = 70;
    const double right = 150;
    const double top = options.title.empty() ? 20 : 40;
    const double bottom = 50;
    const double w = options.width;
    const double h = options.height;
    const double pw = w - left - right;
    const double ph = h - top - bottom;
    const double xspan = std::max<double>(1.0, static_cast<double>((dmax - dmin).count()));
    auto xpos = [&](Day d) { return left + pw * static_cast<double>((d - dmin).count()) / xspan; };
    auto ypos = [&](double v) { return top + ph * (1.0 - (v - ymin) / (ymax - ymin)); };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
        << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << options.width << "\" height=\"" << options.height
        << "\" fill=\"white\"/>\n";
    if (!options.title.empty()) {
        svg << "<text x=\"" << num(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
            << xml_escape(options.title) << "</text>\n";
    }

    // Axes and y ticks.
    svg << "<g stroke=\"#333\" stroke-width=\"1\">\n"
        << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(left + pw) << "\" y2=\""
        << num(top + ph) << "\"/>\n"
        << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\""
        << num(top + ph) << "\"/>\n</g>\n";
    const double ystep = nice_step(ymax - ymin, 6);
    svg << "<g class=\"y-ticks\">\n";
    for (double v = std::ceil(ymin / ystep) * ystep; v <= ymax; v += ystep) {
        svg << "<line x1=\"" << num(left - 4) << "\" y1=\"" << num(ypos(v)) << "\" x2=\"" << num(left + pw)
            << "\" y2=\"" << num(ypos(v)) << "\" stroke=\"#ddd\"/>\n"
            << "<text x=\"" << num(left - 6) << "\" y=\"" << num(ypos(v) + 4) << "\" text-anchor=\"end\">"
            << tick_label(v, ystep) << "</text>\n";
    }
    svg << "</g>\n<g class=\"x-ticks\">\n";
    const int n_xticks = 6;
    for (int i = 0; i <= n_xticks; ++i) {
        const Day d = add_days(dmin, std::lround(xspan * i / n_xticks));
        if (d > dmax) break;
        svg << "<line x1=\"" << num(xpos(d)) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(xpos(d)) << "\" y2=\""
            << num(top + ph + 4) << "\" stroke=\"#333\"/>\n"
            << "<text x=\"" << num(xpos(d)) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">"
            << format_date(d) << "</text>\n";
    }
    svg << "</g>\n";
    if (!options.y_label.empty()) {
        svg << "<text transform=\"translate(16," << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
            << xml_escape(options.y_label) << "</text>\n";
    }

    // Series: one polyline per contiguous run of days.
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& l = lines[i];
        const std::string color = l.color.empty() ? color_for(l.label, i) : l.color;
        svg << "<g class=\"series\" stroke=\"" << color << "\" fill=\"none\" stroke-width=\"1.2\">\n";
        std::string points;
        Day prev{};
        bool open = false;
        auto flush = [&] {
            if (!points.empty()) svg << "<polyline points=\"" << points << "\"/>\n";
            points.clear();
        };
        for (const auto& [d, v] : l.values) {
            if (open && (d - prev).count() > 1) flush();
            if (!points.empty()) points.push_back(' ');
            points += num(xpos(d)) + "," + num(ypos(v));
            prev = d;
            open = true;
        }
        flush();
        svg << "</g>\n";
    }

    svg << "<g class=\"legend\">\n";
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const double ly = top + 10 + 18 * static_cast<double>(i);
        const std::string color = lines[i].color.empty() ? color_for(lines[i].label, i) : lines[i].color;
        svg << "<line x1=\"" << num(left + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(left + pw + 32)
            << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << num(left + pw + 36) << "\" y=\"" << num(ly + 4) << "\">" << xml_escape(lines[i].label)
            << "</text>\n";
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

} // namespace emoidx
