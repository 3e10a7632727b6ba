#include "gibbslab/svg.hpp"

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <functional>
#include <fstream>
#include <stdexcept>

namespace gibbslab::svg {

namespace {
std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}
}  // namespace

Document::Document(double min_x, double min_y, double width, double height)
    : min_x_(min_x), min_y_(min_y), width_(width), height_(height) {}

void Document::rect(double x, double y, double w, double h,
                    const std::string& fill, double opacity) {
    body_ += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" +
             fmt(w) + "\" height=\"" + fmt(h) + "\" fill=\"" + fill + "\"";
    if (opacity < 1.0) body_ += " fill-opacity=\"" + fmt(opacity) + "\"";
    body_ += "/>\n";
}

void Document::line(double x1, double y1, double x2, double y2,
                    const std::string& stroke, double width, bool dashed) {
    body_ += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" +
             fmt(x2) + "\" y2=\"" + fmt(y2) + "\" stroke=\"" + stroke +
             "\" stroke-width=\"" + fmt(width) + "\"";
    if (dashed) body_ += " stroke-dasharray=\"" + fmt(3 * width) + "\"";
    body_ += "/>\n";
}

void Document::circle(double cx, double cy, double r, const std::string& fill) {
    body_ += "<circle cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) + "\" r=\"" +
             fmt(r) + "\" fill=\"" + fill + "\"/>\n";
}

void Document::polygon(const std::vector<std::pair<double, double>>& points,
                       const std::string& fill, double opacity) {
    body_ += "<polygon points=\"";
    for (auto& [x, y] : points) body_ += fmt(x) + "," + fmt(y) + " ";
    body_ += "\" fill=\"" + fill + "\" fill-opacity=\"" + fmt(opacity) + "\"/>\n";
}

void Document::text(double x, double y, const std::string& s, double size) {
    body_ += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-size=\"" +
             fmt(size) + "\">" + s + "</text>\n";
}

std::string Document::str() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" +
           fmt(min_x_) + " " + fmt(min_y_) + " " + fmt(width_) + " " +
           fmt(height_) + "\">\n" + body_ + "</svg>\n";
}

void Document::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("svg: cannot open " + path);
    out << str();
}

std::string potts_color(int state) {
    static const char* palette[] = {"#9e9e9e", "#2166ac", "#b2182b", "#1b7837",
                                    "#fdb863", "#762a83", "#c51b7d", "#35978f",
                                    "#543005"};
    if (state < 0 || state > 8) return "#000000";
    return palette[state];
}

namespace {

Document render_slice(const Box& box, int slice_axis, int slice_value,
                      const std::function<std::string(std::int32_t)>& fill) {
    int d = box.dimension();
    int ax_x, ax_y;
    if (d == 1) {
        ax_x = 0;
        ax_y = -1;
    } else if (d == 2) {
        ax_x = 0;
        ax_y = 1;
    } else {
        if (slice_axis < 0) slice_axis = 1;  // default: slice along y
        ax_x = -1;
        ax_y = -1;
        for (int k = 0; k < d; ++k) {
            if (k == slice_axis) continue;
            if (ax_x < 0)
                ax_x = k;
            else if (ax_y < 0)
                ax_y = k;
        }
    }
    double w = box.extent(ax_x);
    double h = ax_y >= 0 ? box.extent(ax_y) : 1;
    Document doc(box.lo(ax_x) - 1, -(ax_y >= 0 ? box.hi(ax_y) : 0) - 1, w + 2,
                 h + 2);
    for (std::int32_t i = 0; i < box.interior_count(); ++i) {
        auto c = box.interior_coord(i);
        if (d >= 3 && c[slice_axis] != slice_value) continue;
        double x = c[ax_x];
        double y = ax_y >= 0 ? -static_cast<double>(c[ax_y]) : 0.0;
        doc.rect(x - 0.5, y - 0.5, 1.0, 1.0, fill(i));
    }
    return doc;
}

}  // namespace

Document render_spin_slice(const Box& box, const SpinConfig& config,
                           int slice_axis, int slice_value) {
    return render_slice(box, slice_axis, slice_value, [&](std::int32_t i) {
        return potts_color(config.value(i));
    });
}

Document render_field_slice(const Box& box, const std::vector<double>& field,
                            int slice_axis, int slice_value) {
    return render_slice(box, slice_axis, slice_value, [&](std::int32_t i) {
        double v = std::clamp(field[static_cast<std::size_t>(i)], -1.0, 1.0);
        int r, g, b;
        if (v >= 0) {
            r = 255;
            g = b = static_cast<int>(std::lround(255 * (1 - v)));
        } else {
            b = 255;
            r = g = static_cast<int>(std::lround(255 * (1 + v)));
        }
        char buf[16];
        std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
        return std::string(buf);
    });
}

}  // namespace gibbslab::svg
