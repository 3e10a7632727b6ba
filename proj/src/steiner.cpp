#include "gibbslab/steiner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "gibbslab/svg.hpp"

namespace gibbslab::steiner {

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

std::vector<Point> convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point& a, const Point& b) {
                              return a.x == b.x && a.y == b.y;
                          }),
              pts.end());
    const std::size_t n = pts.size();
    if (n < 3) throw std::invalid_argument("norm table: too few directions");
    std::vector<Point> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {  // lower
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

double golden_section(double lo, double hi, double tol,
                      const std::function<double(double)>& f) {
    const double phi = (std::sqrt(5.0) - 1) / 2;
    double a = lo, b = hi;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

bool point_in_polygon(const std::vector<Point>& poly, const Point& p) {
    bool inside = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        if ((poly[i].y > p.y) != (poly[j].y > p.y)) {
            double x_int = poly[j].x + (poly[i].x - poly[j].x) *
                                           (p.y - poly[j].y) /
                                           (poly[i].y - poly[j].y);
            if (p.x < x_int) inside = !inside;
        }
    }
    return inside;
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
    double vx = b.x - a.x, vy = b.y - a.y;
    double wx = p.x - a.x, wy = p.y - a.y;
    double c1 = vx * wx + vy * wy;
    double c2 = vx * vx + vy * vy;
    double t = c2 > 0 ? std::clamp(c1 / c2, 0.0, 1.0) : 0.0;
    double dx = p.x - (a.x + t * vx), dy = p.y - (a.y + t * vy);
    return std::hypot(dx, dy);
}

}  // namespace

Norm2D Norm2D::euclidean() { return Norm2D(); }

Norm2D Norm2D::elliptic(double a, double b) {
    if (a <= 0 || b <= 0)
        throw std::invalid_argument("elliptic norm: weights must be positive");
    Norm2D n;
    n.kind_ = Kind::Elliptic;
    n.a_ = a;
    n.b_ = b;
    return n;
}

Norm2D Norm2D::from_samples(const std::vector<double>& angles,
                            const std::vector<double>& values) {
    if (angles.size() != values.size() || angles.size() < 3)
        throw std::invalid_argument("norm table: need >= 3 samples");
    std::vector<Point> pts;
    for (std::size_t k = 0; k < angles.size(); ++k) {
        if (values[k] <= 0)
            throw std::invalid_argument("norm table: values must be positive");
        double r = 1.0 / values[k];
        pts.push_back({r * std::cos(angles[k]), r * std::sin(angles[k])});
        pts.push_back({-r * std::cos(angles[k]), -r * std::sin(angles[k])});
    }
    auto hull = convex_hull(std::move(pts));
    Norm2D n;
    n.kind_ = Kind::Polygon;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point& v1 = hull[i];
        const Point& v2 = hull[(i + 1) % hull.size()];
        // supporting line <n, x> = c, scaled so the gauge is max <x, w>
        double nx = v2.y - v1.y, ny = -(v2.x - v1.x);
        double c = nx * v1.x + ny * v1.y;
        if (c <= 0) {  // orient outward (origin is interior by symmetry)
            nx = -nx;
            ny = -ny;
            c = -c;
        }
        n.polar_.push_back({nx / c, ny / c});
    }
    return n;
}

double Norm2D::operator()(double x, double y) const {
    switch (kind_) {
        case Kind::Euclidean: return std::hypot(x, y);
        case Kind::Elliptic: return std::hypot(a_ * x, b_ * y);
        case Kind::Polygon: {
            double best = 0;
            for (const auto& w : polar_)
                best = std::max(best, x * w.x + y * w.y);
            return best;
        }
    }
    return 0;
}

std::vector<double> SteinerTopology::inner_angles() const {
    std::vector<double> out;
    for (std::size_t k = 0; k < inner.size(); ++k) {
        int idx = static_cast<int>(k) + 4;
        std::vector<Point> dirs;
        for (auto& [u, v] : edges) {
            int other = -1;
            if (u == idx) other = v;
            if (v == idx) other = u;
            if (other < 0) continue;
            Point o = vertex(other);
            double dx = o.x - inner[k].x, dy = o.y - inner[k].y;
            double norm = std::hypot(dx, dy);
            dirs.push_back({dx / norm, dy / norm});
        }
        for (std::size_t i = 0; i < dirs.size(); ++i)
            for (std::size_t j = i + 1; j < dirs.size(); ++j) {
                double dot = std::clamp(
                    dirs[i].x * dirs[j].x + dirs[i].y * dirs[j].y, -1.0, 1.0);
                out.push_back(std::acos(dot));
            }
    }
    return out;
}

SteinerResult steiner_tree_square(const Norm2D& norm, double side) {
    const double h = side / 2;
    std::array<Point, 4> corners = {Point{-h, h}, Point{h, h}, Point{h, -h},
                                    Point{-h, -h}};  // TL TR BR BL

    auto build_vertical = [&](double t) {
        SteinerTopology top;
        top.terminals = corners;
        top.inner = {Point{0, t}, Point{0, -t}};
        top.edges = {{0, 4}, {1, 4}, {4, 5}, {5, 2}, {5, 3}};
        top.length = 0;
        for (auto& [u, v] : top.edges) {
            Point a = top.vertex(u), b = top.vertex(v);
            top.length += norm(b.x - a.x, b.y - a.y);
        }
        return top;
    };
    auto build_horizontal = [&](double t) {
        SteinerTopology top;
        top.terminals = corners;
        top.inner = {Point{-t, 0}, Point{t, 0}};
        top.edges = {{0, 4}, {3, 4}, {4, 5}, {5, 1}, {5, 2}};
        top.length = 0;
        for (auto& [u, v] : top.edges) {
            Point a = top.vertex(u), b = top.vertex(v);
            top.length += norm(b.x - a.x, b.y - a.y);
        }
        return top;
    };

    SteinerResult res;
    double tv = golden_section(0.0, h, 1e-9, [&](double t) {
        return build_vertical(t).length;
    });
    res.vertical = build_vertical(tv);
    double th = golden_section(0.0, h, 1e-9, [&](double t) {
        return build_horizontal(t).length;
    });
    res.horizontal = build_horizontal(th);

    double sx = norm(side, 0), sy = norm(0, side);
    res.three_sides_length = std::min(2 * sx + sy, sx + 2 * sy);
    return res;
}

int face_of(const SteinerTopology& top, const Point& p) {
    const auto& tl = top.terminals[0];
    const auto& tr = top.terminals[1];
    const auto& br = top.terminals[2];
    const auto& bl = top.terminals[3];
    const auto& p1 = top.inner[0];
    const auto& p2 = top.inner[1];
    bool vertical = std::abs(p1.x) < std::abs(p1.y);
    std::array<std::vector<Point>, 4> faces;
    if (vertical) {
        faces[0] = {bl, tl, p1, p2};  // left
        faces[1] = {tl, tr, p1};      // top
        faces[2] = {tr, br, p2, p1};  // right
        faces[3] = {br, bl, p2};      // bottom
    } else {
        faces[0] = {tl, bl, p1};      // left
        faces[1] = {tl, tr, p2, p1};  // top
        faces[2] = {tr, br, p2};      // right
        faces[3] = {bl, br, p2, p1};  // bottom
    }
    for (int f = 0; f < 4; ++f)
        if (point_in_polygon(faces[static_cast<std::size_t>(f)], p)) return f;
    // on a tree edge or the square boundary: nearest face by center
    std::array<Point, 4> centers = {Point{-0.25, 0}, Point{0, 0.25},
                                    Point{0.25, 0}, Point{0, -0.25}};
    double scale = std::abs(tr.x) * 2;
    int best = 0;
    double best_d = 1e300;
    for (int f = 0; f < 4; ++f) {
        double dx = p.x - centers[static_cast<std::size_t>(f)].x * scale;
        double dy = p.y - centers[static_cast<std::size_t>(f)].y * scale;
        double d = dx * dx + dy * dy;
        if (d < best_d) {
            best_d = d;
            best = f;
        }
    }
    return best;
}

RegionMasks symmetric_difference_regions(const SteinerTopology& top_a,
                                         const SteinerTopology& top_b,
                                         const std::array<int, 4>& colors,
                                         int color, int resolution) {
    RegionMasks out;
    double h = std::abs(top_a.terminals[1].x);
    for (int i = 0; i < resolution; ++i)
        for (int j = 0; j < resolution; ++j) {
            Point p{(-0.5 + (i + 0.5) / resolution) * 2 * h,
                    (-0.5 + (j + 0.5) / resolution) * 2 * h};
            int ca = colors[static_cast<std::size_t>(face_of(top_a, p))];
            int cb = colors[static_cast<std::size_t>(face_of(top_b, p))];
            if (ca == color && cb != color) out.a_only.push_back(p);
            if (cb == color && ca != color) out.b_only.push_back(p);
        }
    return out;
}

std::vector<int> site_from_unit(const Box& box, const Point& p) {
    if (box.dimension() != 2)
        throw std::invalid_argument("site_from_unit: d = 2 only");
    std::vector<int> site(2);
    for (int k = 0; k < 2; ++k) {
        double u = (k == 0 ? p.x : p.y) + 0.5;  // [0,1]
        int ext = box.extent(k);
        int off = static_cast<int>(std::lround(u * (ext - 1)));
        site[static_cast<std::size_t>(k)] =
            box.lo(k) + std::clamp(off, 0, ext - 1);
    }
    return site;
}

Point deepest_point(const std::vector<Point>& mask, const SteinerTopology& a,
                    const SteinerTopology& b) {
    if (mask.empty())
        throw std::invalid_argument("deepest_point: empty mask");
    auto dist_to_tree = [](const Point& p, const SteinerTopology& t) {
        double d = 1e300;
        for (auto& [u, v] : t.edges)
            d = std::min(d, point_segment_distance(p, t.vertex(u), t.vertex(v)));
        return d;
    };
    Point best = mask[0];
    double best_d = -1;
    for (const auto& p : mask) {
        double d = std::min(dist_to_tree(p, a), dist_to_tree(p, b));
        if (d > best_d) {
            best_d = d;
            best = p;
        }
    }
    return best;
}

std::string render_svg(const SteinerResult& result,
                       const std::vector<Point>& mask_a,
                       const std::vector<Point>& mask_b) {
    double h = std::abs(result.vertical.terminals[1].x);
    svg::Document doc(-h * 1.2, -h * 1.2, 2.4 * h, 2.4 * h);
    auto draw_y = [](double y) { return -y; };  // svg y grows downward
    // square outline
    doc.line(-h, -h, h, -h, "#444", h * 0.01);
    doc.line(h, -h, h, h, "#444", h * 0.01);
    doc.line(h, h, -h, h, "#444", h * 0.01);
    doc.line(-h, h, -h, -h, "#444", h * 0.01);
    for (const auto& p : mask_a)
        doc.circle(p.x, draw_y(p.y), h * 0.012, "#fddbc7");
    for (const auto& p : mask_b)
        doc.circle(p.x, draw_y(p.y), h * 0.012, "#d1e5f0");
    for (auto& [u, v] : result.vertical.edges) {
        Point a = result.vertical.vertex(u), b = result.vertical.vertex(v);
        doc.line(a.x, draw_y(a.y), b.x, draw_y(b.y), "#b2182b", h * 0.02);
    }
    for (auto& [u, v] : result.horizontal.edges) {
        Point a = result.horizontal.vertex(u), b = result.horizontal.vertex(v);
        doc.line(a.x, draw_y(a.y), b.x, draw_y(b.y), "#2166ac", h * 0.02, true);
    }
    for (const auto& t : result.vertical.terminals)
        doc.circle(t.x, draw_y(t.y), h * 0.03, "#000");
    return doc.str();
}

}  // namespace gibbslab::steiner
