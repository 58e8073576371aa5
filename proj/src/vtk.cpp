#include <ostream>

#include "xhdg/study.hpp"

namespace xhdg {

void write_solution_vtk(const CutMesh& cut, const Solution& sol, std::ostream& os)
{
    size_t npts = 0, conn = 0;
    for (const auto& p : cut.pieces()) {
        npts += p.polygon.size();
        conn += p.polygon.size() + 1;
    }
    os.precision(10);
    os << "# vtk DataFile Version 3.0\nxhdg solution\nASCII\nDATASET POLYDATA\n";
    os << "POINTS " << npts << " double\n";
    for (const auto& p : cut.pieces())
        for (const auto& v : p.polygon)
            os << v.x() << ' ' << v.y() << " 0\n";
    os << "POLYGONS " << cut.num_pieces() << ' ' << conn << '\n';
    size_t k = 0;
    for (const auto& p : cut.pieces()) {
        os << p.polygon.size();
        for (size_t i = 0; i < p.polygon.size(); ++i)
            os << ' ' << k++;
        os << '\n';
    }
    os << "POINT_DATA " << npts << "\nVECTORS velocity double\n";
    for (int i = 0; i < cut.num_pieces(); ++i)
        for (const auto& v : cut.piece(i).polygon) {
            const Point u = eval_velocity(sol, cut, i, v);
            os << u.x() << ' ' << u.y() << " 0\n";
        }
    os << "CELL_DATA " << cut.num_pieces() << "\nSCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < cut.num_pieces(); ++i)
        os << sol.p(i) << '\n';
    os << "SCALARS side int 1\nLOOKUP_TABLE default\n";
    for (const auto& p : cut.pieces())
        os << p.side + 1 << '\n';
}

} // namespace xhdg
