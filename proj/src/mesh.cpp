#include "xhdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "xhdg/error.hpp"

namespace xhdg {

namespace {

double polygon_area(std::span<const Point> p)
{
    double a = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        const Point& q0 = p[i];
        const Point& q1 = p[(i + 1) % p.size()];
        a += q0.x() * q1.y() - q1.x() * q0.y();
    }
    return 0.5 * a;
}

// Clips a convex polygon against the half-plane n.x <= c.
std::vector<Point> clip(const std::vector<Point>& poly, const Point& n, double c)
{
    std::vector<Point> out;
    const size_t m = poly.size();
    for (size_t i = 0; i < m; ++i) {
        const Point& a = poly[i];
        const Point& b = poly[(i + 1) % m];
        const double da = n.dot(a) - c;
        const double db = n.dot(b) - c;
        if (da <= 0.0)
            out.push_back(a);
        if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0))
            out.push_back(a + (b - a) * (da / (da - db)));
    }
    return out;
}

// Radius of the largest disc inside a convex CCW polygon: bisection on the radius,
// testing whether the inward-shifted half-planes still intersect.
double inscribed_radius(const std::vector<Point>& poly, double h)
{
    const size_t m = poly.size();
    auto feasible = [&](double r) {
        std::vector<Point> region = poly;
        for (size_t i = 0; i < m && !region.empty(); ++i) {
            const Point t = poly[(i + 1) % m] - poly[i];
            const double len = t.norm();
            if (len == 0.0)
                return false;
            const Point n(t.y() / len, -t.x() / len);
            region = clip(region, n, n.dot(poly[i]) - r);
        }
        return region.size() >= 3 && std::abs(polygon_area(region)) > 0.0;
    };
    double lo = 0.0, hi = h;
    if (!feasible(0.0))
        return 0.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

} // namespace

Mesh Mesh::from_cells(std::vector<Point> vertices, const std::vector<std::vector<int>>& cells)
{
    if (cells.empty())
        throw InvalidArgument("mesh: no cells");
    Mesh m;
    m.nv_ = static_cast<int>(cells.front().size());
    if (m.nv_ != 3 && m.nv_ != 4)
        throw InvalidArgument("mesh: cells must be triangles or quadrilaterals");
    m.vertices_ = std::move(vertices);

    const int nc = static_cast<int>(cells.size());
    m.cell_vertices_.reserve(static_cast<size_t>(nc) * m.nv_);
    m.cell_faces_.assign(static_cast<size_t>(nc) * m.nv_, -1);
    m.cell_diameter_.resize(nc);
    m.cell_area_.resize(nc);
    m.cell_centroid_.resize(nc);

    std::map<std::pair<int, int>, int> edge_to_face;
    for (int k = 0; k < nc; ++k) {
        const auto& c = cells[k];
        if (static_cast<int>(c.size()) != m.nv_)
            throw InvalidArgument("mesh: mixed cell arities are not supported");
        std::vector<Point> pts;
        for (int v : c) {
            if (v < 0 || v >= static_cast<int>(m.vertices_.size()))
                throw InvalidArgument("mesh: vertex index out of range");
            m.cell_vertices_.push_back(v);
            pts.push_back(m.vertices_[v]);
        }
        double diam = 0.0;
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i + 1; j < pts.size(); ++j)
                diam = std::max(diam, (pts[i] - pts[j]).norm());
        m.cell_diameter_[k] = diam;
        m.cell_area_[k] = polygon_area(pts);

        // Area-weighted centroid (vertex average if degenerate).
        Point cen = Point::Zero();
        if (m.cell_area_[k] != 0.0) {
            for (size_t i = 0; i < pts.size(); ++i) {
                const Point& a = pts[i];
                const Point& b = pts[(i + 1) % pts.size()];
                const double cr = a.x() * b.y() - b.x() * a.y();
                cen += (a + b) * cr;
            }
            cen /= 6.0 * m.cell_area_[k];
        } else {
            for (const auto& p : pts)
                cen += p;
            cen /= static_cast<double>(pts.size());
        }
        m.cell_centroid_[k] = cen;

        for (int e = 0; e < m.nv_; ++e) {
            const int a = c[e];
            const int b = c[(e + 1) % m.nv_];
            const auto key = std::minmax(a, b);
            auto it = edge_to_face.find(key);
            if (it == edge_to_face.end()) {
                Face f;
                f.v = {a, b};
                f.left = k;
                f.local_left = e;
                const Point t = m.vertices_[b] - m.vertices_[a];
                f.length = t.norm();
                f.normal = f.length > 0.0 ? Point(t.y() / f.length, -t.x() / f.length) : Point::Zero();
                const int id = static_cast<int>(m.faces_.size());
                m.faces_.push_back(f);
                edge_to_face.emplace(key, id);
                m.cell_faces_[static_cast<size_t>(k) * m.nv_ + e] = id;
            } else {
                Face& f = m.faces_[it->second];
                if (f.right >= 0)
                    throw InvalidArgument("mesh: edge shared by more than two cells");
                if (f.v[0] != b || f.v[1] != a)
                    throw InvalidArgument("mesh: neighbouring cells must have opposite orientation");
                f.right = k;
                f.local_right = e;
                m.cell_faces_[static_cast<size_t>(k) * m.nv_ + e] = it->second;
            }
        }
    }
    return m;
}

Point Mesh::outward_normal(int k, int e) const
{
    const Face& f = faces_[cell_faces(k)[e]];
    return f.left == k ? f.normal : Point(-f.normal);
}

double Mesh::h() const
{
    return cell_diameter_.empty() ? 0.0 : *std::max_element(cell_diameter_.begin(), cell_diameter_.end());
}

double Mesh::total_area() const
{
    double a = 0.0;
    for (double x : cell_area_)
        a += x;
    return a;
}

Mesh build_structured(const Rectangle& domain, int n, CellType type)
{
    if (n < 1)
        throw InvalidArgument("build_structured: n must be >= 1");
    if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
        throw InvalidArgument("build_structured: degenerate domain [" + std::to_string(domain.xmin) + "," +
                              std::to_string(domain.xmax) + "]x[" + std::to_string(domain.ymin) + "," +
                              std::to_string(domain.ymax) + "]");

    std::vector<Point> verts;
    verts.reserve(static_cast<size_t>(n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            verts.emplace_back(domain.xmin + domain.width() * i / n, domain.ymin + domain.height() * j / n);

    auto id = [n](int i, int j) { return j * (n + 1) + i; };
    std::vector<std::vector<int>> cells;
    cells.reserve(static_cast<size_t>(n) * n * (type == CellType::Triangle ? 2 : 1));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            if (type == CellType::Triangle) {
                cells.push_back({a, b, c});
                cells.push_back({a, c, d});
            } else {
                cells.push_back({a, b, c, d});
            }
        }
    }
    return Mesh::from_cells(std::move(verts), cells);
}

ShapeRegularityReport validate_shape_regularity(const Mesh& mesh)
{
    ShapeRegularityReport rep;
    rep.theta_star = std::numeric_limits<double>::infinity();
    rep.l_star = std::numeric_limits<double>::infinity();
    for (int k = 0; k < mesh.num_cells(); ++k) {
        const auto c = mesh.cell(k);
        std::vector<Point> pts;
        for (int v : c)
            pts.push_back(mesh.vertex(v));
        const double hk = mesh.cell_diameter(k);
        double lmin = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i + 1; j < pts.size(); ++j)
                lmin = std::min(lmin, (pts[i] - pts[j]).norm());
        const double l = hk > 0.0 ? lmin / hk : 0.0;
        const double theta = hk > 0.0 && mesh.cell_area(k) > 0.0 ? inscribed_radius(pts, hk) / hk : 0.0;
        rep.l_star = std::min(rep.l_star, l);
        rep.theta_star = std::min(rep.theta_star, theta);
        if (!(l > 0.0) || !(theta > 0.0))
            rep.violations.push_back(k);
    }
    return rep;
}

void write_vtk(const Mesh& mesh, std::ostream& os)
{
    os << "# vtk DataFile Version 3.0\nxhdg mesh\nASCII\nDATASET POLYDATA\n";
    os << "POINTS " << mesh.num_vertices() << " double\n";
    for (const auto& p : mesh.vertices())
        os << p.x() << ' ' << p.y() << " 0\n";
    const int nc = mesh.num_cells();
    os << "POLYGONS " << nc << ' ' << nc * (mesh.vertices_per_cell() + 1) << '\n';
    for (int k = 0; k < nc; ++k) {
        os << mesh.vertices_per_cell();
        for (int v : mesh.cell(k))
            os << ' ' << v;
        os << '\n';
    }
    os << "CELL_DATA " << nc << "\nSCALARS h_K double 1\nLOOKUP_TABLE default\n";
    for (int k = 0; k < nc; ++k)
        os << mesh.cell_diameter(k) << '\n';
}

} // namespace xhdg
