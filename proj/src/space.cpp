#include "xhdg/space.hpp"

#include <algorithm>

#include <Eigen/Dense>

#include "xhdg/error.hpp"

namespace xhdg {

DofMap::DofMap(const CutMesh& cut, int m)
    : m_(m), np_(cut.num_pieces()), nf_(cut.num_face_pieces()), nc_(cut.num_chords())
{
    if (m != 0 && m != 1)
        throw InvalidArgument("trace degree m must be 0 or 1");
    essential_.assign(condensed_size(), 0);
    for (int f = 0; f < nf_; ++f)
        if (cut.face_piece(f).boundary)
            essential_[uhat(f, 0)] = essential_[uhat(f, 1)] = 1;
    if (cut.curved())
        for (int c = 0; c < nc_; ++c)
            for (int a = 0; a < 2; ++a)
                for (int k = 0; k <= m_; ++k)
                    essential_[utilde(c, a, k)] = 1;
}

int DofMap::num_essential() const
{
    return static_cast<int>(std::count(essential_.begin(), essential_.end(), 1));
}

Eigen::VectorXd project_Qr_cell(const ScalarField& f, std::span<const Point> polygon, const CellBasis& basis, int r,
                                int degree)
{
    if (r != 0 && r != 1)
        throw InvalidArgument("project_Qr_cell: r must be 0 or 1");
    const QuadRule q = polygon_rule(polygon, degree);
    const int n = r == 0 ? 1 : 3;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (size_t i = 0; i < q.size(); ++i) {
        const Eigen::VectorXd phi = basis(q.points[i]).head(n);
        M += q.weights[i] * phi * phi.transpose();
        rhs += q.weights[i] * f(q.points[i]) * phi;
    }
    if (!(M(0, 0) > 0.0))
        throw InvalidArgument("project_Qr_cell: zero-measure piece");
    return M.ldlt().solve(rhs);
}

Eigen::VectorXd project_Qrb_face(const ScalarField& f, const Point& a, const Point& b, int r, int degree)
{
    if (r != 0 && r != 1)
        throw InvalidArgument("project_Qrb_face: r must be 0 or 1");
    if ((b - a).norm() == 0.0)
        throw InvalidArgument("project_Qrb_face: zero-length segment");
    const QuadRule q = segment_rule(a, b, degree);
    const SegmentBasis basis(a, b, r);
    const int n = r + 1;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (size_t i = 0; i < q.size(); ++i) {
        const Eigen::VectorXd psi = basis(q.points[i]).head(n);
        M += q.weights[i] * psi * psi.transpose();
        rhs += q.weights[i] * f(q.points[i]) * psi;
    }
    return M.ldlt().solve(rhs);
}

} // namespace xhdg
