#pragma once

#include <string>
#include <vector>

#include "gibbslab/lattice.hpp"

namespace gibbslab::svg {

/// Minimal SVG document builder; coordinates are user units with a
/// viewBox set at construction.
class Document {
public:
    Document(double min_x, double min_y, double width, double height);

    void rect(double x, double y, double w, double h, const std::string& fill,
              double opacity = 1.0);
    void line(double x1, double y1, double x2, double y2,
              const std::string& stroke, double width = 0.02,
              bool dashed = false);
    void circle(double cx, double cy, double r, const std::string& fill);
    void polygon(const std::vector<std::pair<double, double>>& points,
                 const std::string& fill, double opacity);
    void text(double x, double y, const std::string& s, double size = 0.1);

    std::string str() const;
    void write(const std::string& path) const;

private:
    std::string body_;
    double min_x_, min_y_, width_, height_;
};

/// Color per Potts state (1-based; 0 renders gray for free/undefined).
std::string potts_color(int state);

/// Renders a 2D slice of a configuration: for d = 2 the whole box, for
/// d = 3 the plane slice_axis = slice_value projected on the other axes.
Document render_spin_slice(const Box& box, const SpinConfig& config,
                           int slice_axis = -1, int slice_value = 0);

/// Same, but for a field of per-site real values in [-1, 1] rendered as
/// a blue/white/red ramp.
Document render_field_slice(const Box& box, const std::vector<double>& field,
                            int slice_axis = -1, int slice_value = 0);

}  // namespace gibbslab::svg
