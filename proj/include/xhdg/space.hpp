#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "xhdg/cut_geometry.hpp"

namespace xhdg {

/// P1 basis {1, (x - x_K)/h_K, (y - y_K)/h_K} shared by every piece of cell K.
struct CellBasis {
    Point center = Point::Zero();
    double h = 1.0;

    CellBasis() = default;
    CellBasis(const Point& c, double hk) : center(c), h(hk) {}
    CellBasis(const Mesh& mesh, int cell) : center(mesh.cell_centroid(cell)), h(mesh.cell_diameter(cell)) {}

    Eigen::Vector3d operator()(const Point& x) const
    {
        return {1.0, (x.x() - center.x()) / h, (x.y() - center.y()) / h};
    }
    /// Gradient of the field sum_j c_j phi_j.
    Point gradient(const Eigen::Vector3d& c) const { return Point(c[1], c[2]) / h; }
};

/// Basis {1, (s - s_mid)/|S|} on a segment, truncated to degree r.
struct SegmentBasis {
    Point a = Point::Zero(), b = Point::Zero();
    int degree = 0;

    SegmentBasis() = default;
    SegmentBasis(const Point& a_, const Point& b_, int r) : a(a_), b(b_), degree(r) {}

    int size() const { return degree + 1; }
    Eigen::Vector2d operator()(const Point& x) const
    {
        const Point t = b - a;
        const double s = (x - a).dot(t) / t.squaredNorm() - 0.5;
        return {1.0, degree > 0 ? s : 0.0};
    }
};

/// Global unknown layout.
///
/// Condensed block: [p (one per piece) | uhat (2 per face piece) | utilde (2(m+1) per chord) | multiplier].
/// Monolithic extension: 10 interior unknowns per piece follow, 4 for L (row-major) then
/// 6 for u (component-major).
class DofMap {
public:
    DofMap(const CutMesh& cut, int m);

    int trace_degree() const { return m_; }
    int num_pieces() const { return np_; }
    int num_face_pieces() const { return nf_; }
    int num_chords() const { return nc_; }
    int chord_block() const { return 2 * (m_ + 1); }

    int p(int piece) const { return piece; }
    int uhat(int face_piece, int comp) const { return np_ + 2 * face_piece + comp; }
    int utilde(int chord, int comp, int k) const { return np_ + 2 * nf_ + chord * chord_block() + comp * (m_ + 1) + k; }
    int multiplier() const { return np_ + 2 * nf_ + nc_ * chord_block(); }
    int condensed_size() const { return multiplier() + 1; }

    int L(int piece, int a, int b) const { return condensed_size() + 10 * piece + 2 * a + b; }
    int u(int piece, int comp, int j) const { return condensed_size() + 10 * piece + 4 + 3 * comp + j; }
    int monolithic_size() const { return condensed_size() + 10 * np_; }

    /// Entries fixed by data: boundary uhat, and utilde on fictitious-domain chords.
    bool essential(int dof) const { return dof < static_cast<int>(essential_.size()) && essential_[dof]; }
    int num_essential() const;

private:
    int m_, np_, nf_, nc_;
    std::vector<char> essential_;
};

using ScalarField = std::function<double(const Point&)>;

/// Coefficients of the L2(piece) projection onto P_r, r in {0, 1}, in `basis`.
/// For r = 0 the result has one entry (the piece average).
Eigen::VectorXd project_Qr_cell(const ScalarField& f, std::span<const Point> polygon, const CellBasis& basis, int r,
                                int degree = 8);

/// Coefficients of the L2(segment) projection onto P_r in SegmentBasis(a, b, r).
Eigen::VectorXd project_Qrb_face(const ScalarField& f, const Point& a, const Point& b, int r, int degree = 8);

} // namespace xhdg
