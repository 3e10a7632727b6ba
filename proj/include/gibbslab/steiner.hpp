#pragma once

#include <array>
#include <string>
#include <vector>

#include "gibbslab/lattice.hpp"

namespace gibbslab::steiner {

struct Point {
    double x = 0, y = 0;
};

/// Norm on the plane: Euclidean, elliptic (axis-weighted), or the gauge
/// of a convexified sample table. Positive homogeneity and the triangle
/// inequality hold by construction; symmetry requires symmetric input.
class Norm2D {
public:
    static Norm2D euclidean();
    /// sqrt((a x)^2 + (b y)^2)
    static Norm2D elliptic(double a, double b);
    /// Gauge of the convex hull of the sampled unit-ball boundary points
    /// r_k = 1/value_k in direction angle_k (and their antipodes).
    static Norm2D from_samples(const std::vector<double>& angles,
                               const std::vector<double>& values);

    double operator()(double x, double y) const;
    double operator()(const Point& p) const { return (*this)(p.x, p.y); }

private:
    enum class Kind { Euclidean, Elliptic, Polygon } kind_ = Kind::Euclidean;
    double a_ = 1, b_ = 1;
    // polar-polygon vertices: norm(x) = max_k <x, w_k>
    std::vector<Point> polar_;
};

/// A candidate tree spanning the four square corners: vertices are the
/// 4 terminals followed by the inner (Steiner) points, inner nodes have
/// degree 3.
struct SteinerTopology {
    std::array<Point, 4> terminals;  // TL, TR, BR, BL order
    std::vector<Point> inner;
    std::vector<std::pair<int, int>> edges;  // indices: 0..3 terminals, 4+ inner
    double length = 0;

    Point vertex(int idx) const {
        return idx < 4 ? terminals[static_cast<std::size_t>(idx)]
                       : inner[static_cast<std::size_t>(idx - 4)];
    }
    /// Interior angles (radians) at each inner node.
    std::vector<double> inner_angles() const;
};

struct SteinerResult {
    SteinerTopology vertical;    // bar along the y axis
    SteinerTopology horizontal;  // bar along the x axis
    double three_sides_length = 0;  // best spanning path along box sides

    const SteinerTopology& shorter() const {
        return vertical.length <= horizontal.length ? vertical : horizontal;
    }
};

/// Both axis-aligned bar topologies for terminals at the corners of the
/// centered square of the given side, each minimized over its bar
/// half-length by golden-section search (tolerance 1e-9).
SteinerResult steiner_tree_square(const Norm2D& norm, double side);

/// Square faces cut out by a bar topology, colored like the quadrant
/// boundary condition: 0 = left, 1 = top, 2 = right, 3 = bottom.
int face_of(const SteinerTopology& top, const Point& p);

/// Points of the square (on a grid of `resolution` per side) assigned
/// `color` by topology A but not by topology B, in unit coordinates.
struct RegionMasks {
    std::vector<Point> a_only;  // A says color, B does not
    std::vector<Point> b_only;  // B says color, A does not
};
RegionMasks symmetric_difference_regions(const SteinerTopology& top_a,
                                         const SteinerTopology& top_b,
                                         const std::array<int, 4>& colors,
                                         int color, int resolution = 64);

/// Maps a unit-square point to the nearest interior site of a 2D box.
std::vector<int> site_from_unit(const Box& box, const Point& p);

/// The mask point farthest from every edge of both trees (robust site
/// placement for the violation hunt).
Point deepest_point(const std::vector<Point>& mask, const SteinerTopology& a,
                    const SteinerTopology& b);

/// Figure: terminals, both trees (solid/dashed) and optional masks.
std::string render_svg(const SteinerResult& result,
                       const std::vector<Point>& mask_a = {},
                       const std::vector<Point>& mask_b = {});

}  // namespace gibbslab::steiner
