#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace xhdg {

using Point = Eigen::Vector2d;

struct Rectangle {
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double area() const { return width() * height(); }
};

enum class CellType { Triangle, Rectangle };

/// One mesh edge. `v` is ordered the way the left cell traverses it (counter-clockwise),
/// so `normal` is the outward normal of `left`; `right` sees the negation.
struct Face {
    std::array<int, 2> v{};
    int left = -1;
    int right = -1; ///< -1 on the domain boundary
    int local_left = -1;  ///< edge index inside the left cell
    int local_right = -1; ///< edge index inside the right cell
    Point normal = Point::Zero();
    double length = 0.0;

    bool boundary() const { return right < 0; }
};

/// Conforming 2D mesh of triangles or quadrilaterals. Immutable after construction.
///
/// Cell vertices are stored counter-clockwise; local edge e joins local vertices e and e+1.
class Mesh {
public:
    Mesh() = default;

    /// Builds connectivity from raw cells. Cells must be counter-clockwise and all of the
    /// same arity (3 or 4).
    static Mesh from_cells(std::vector<Point> vertices, const std::vector<std::vector<int>>& cells);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_cells() const { return static_cast<int>(cell_diameter_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    int vertices_per_cell() const { return nv_; }

    const Point& vertex(int i) const { return vertices_[i]; }
    const std::vector<Point>& vertices() const { return vertices_; }
    std::span<const int> cell(int k) const { return {cell_vertices_.data() + nv_ * k, static_cast<size_t>(nv_)}; }
    std::span<const int> cell_faces(int k) const { return {cell_faces_.data() + nv_ * k, static_cast<size_t>(nv_)}; }
    const Face& face(int f) const { return faces_[f]; }
    const std::vector<Face>& faces() const { return faces_; }

    /// Outward normal of local edge e of cell k.
    Point outward_normal(int k, int e) const;

    double cell_diameter(int k) const { return cell_diameter_[k]; }
    double cell_area(int k) const { return cell_area_[k]; }
    const Point& cell_centroid(int k) const { return cell_centroid_[k]; }
    /// max_K h_K
    double h() const;
    double total_area() const;

private:
    std::vector<Point> vertices_;
    std::vector<int> cell_vertices_;
    std::vector<int> cell_faces_;
    std::vector<Face> faces_;
    std::vector<double> cell_diameter_;
    std::vector<double> cell_area_;
    std::vector<Point> cell_centroid_;
    int nv_ = 0;
};

/// n x n structured mesh of a rectangle. Triangle mode splits every square along the
/// bottom-left to top-right diagonal.
Mesh build_structured(const Rectangle& domain, int n, CellType type);

struct ShapeRegularityReport {
    double theta_star = 0.0; ///< min over cells of (largest inscribed radius) / h_K
    double l_star = 0.0;     ///< min over cells of (shortest vertex distance) / h_K
    std::vector<int> violations; ///< cells with a vanishing constant
    bool ok() const { return violations.empty(); }
};

ShapeRegularityReport validate_shape_regularity(const Mesh& mesh);

/// Legacy VTK (ASCII POLYDATA) dump of the mesh polygons.
void write_vtk(const Mesh& mesh, std::ostream& os);

} // namespace xhdg
