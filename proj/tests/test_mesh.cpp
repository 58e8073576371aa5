#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "xhdg/error.hpp"
#include "xhdg/mesh.hpp"

using namespace xhdg;

namespace {

int boundary_faces(const Mesh& m)
{
    int n = 0;
    for (const Face& f : m.faces())
        n += f.boundary() ? 1 : 0;
    return n;
}

} // namespace

TEST_CASE("single rectangle cell")
{
    const Mesh m = build_structured({0, 1, 0, 1}, 1, CellType::Rectangle);
    CHECK(m.num_cells() == 1);
    CHECK(m.num_vertices() == 4);
    CHECK(m.num_faces() == 4);
    CHECK(boundary_faces(m) == 4);
}

TEST_CASE("2x2 triangulation counts")
{
    const Mesh m = build_structured({0, 1, 0, 1}, 2, CellType::Triangle);
    CHECK(m.num_cells() == 8);
    CHECK(m.num_vertices() == 9);
    CHECK(m.num_faces() == 16);
    CHECK(boundary_faces(m) == 8);
}

TEST_CASE("16x16 triangulation of [-1,1]^2 has equal diameters")
{
    const Mesh m = build_structured({-1, 1, -1, 1}, 16, CellType::Triangle);
    CHECK(m.num_cells() == 512);
    for (int k = 0; k < m.num_cells(); ++k)
        CHECK(m.cell_diameter(k) == doctest::Approx(std::sqrt(2.0) * 2.0 / 16).epsilon(1e-14));
    CHECK(m.h() == doctest::Approx(std::sqrt(2.0) / 8));
}

TEST_CASE("degenerate domains and counts are rejected")
{
    CHECK_THROWS_AS(build_structured({0, 0, 0, 1}, 4, CellType::Triangle), InvalidArgument);
    CHECK_THROWS_AS(build_structured({0, 1, 0, 1}, 0, CellType::Rectangle), InvalidArgument);
}

TEST_CASE("structural invariants over many meshes")
{
    for (CellType type : {CellType::Triangle, CellType::Rectangle})
        for (int n = 1; n <= 12; ++n) {
            const Rectangle box{-0.3, 1.7, 2.0, 2.5};
            const Mesh m = build_structured(box, n, type);
            CAPTURE(n);
            // Euler: V - E + F = 1 for a disc.
            CHECK(m.num_vertices() - m.num_faces() + m.num_cells() == 1);
            double area = 0.0;
            for (int k = 0; k < m.num_cells(); ++k)
                area += m.cell_area(k);
            CHECK(area == doctest::Approx(box.area()).epsilon(1e-12));
            CHECK(m.total_area() == doctest::Approx(box.area()).epsilon(1e-12));

            std::vector<int> incidence(m.num_faces(), 0);
            for (int k = 0; k < m.num_cells(); ++k)
                for (int f : m.cell_faces(k))
                    ++incidence[f];
            for (int f = 0; f < m.num_faces(); ++f) {
                const Face& face = m.face(f);
                CHECK(incidence[f] == (face.boundary() ? 1 : 2));
                const Point mid = 0.5 * (m.vertex(face.v[0]) + m.vertex(face.v[1]));
                CHECK(face.normal.dot(mid - m.cell_centroid(face.left)) > 0.0);
                CHECK(face.normal.norm() == doctest::Approx(1.0));
                if (!face.boundary()) {
                    CHECK(face.normal.dot(mid - m.cell_centroid(face.right)) < 0.0);
                    // The right cell traverses the face in the opposite direction.
                    const auto cv = m.cell(face.right);
                    const int e = face.local_right;
                    CHECK(cv[e] == face.v[1]);
                    CHECK(cv[(e + 1) % cv.size()] == face.v[0]);
                }
            }
            const double step = box.width() / n;
            for (int k = 0; k < m.num_cells(); ++k)
                CHECK(m.cell_diameter(k) ==
                      doctest::Approx(std::hypot(step, box.height() / n)).epsilon(1e-12));
        }
}

TEST_CASE("shape regularity constants")
{
    const ShapeRegularityReport sq = validate_shape_regularity(build_structured({0, 1, 0, 1}, 4, CellType::Rectangle));
    CHECK(sq.ok());
    CHECK(sq.theta_star == doctest::Approx(0.5 / std::sqrt(2.0)));
    CHECK(sq.l_star == doctest::Approx(1.0 / std::sqrt(2.0)));
    const ShapeRegularityReport tri = validate_shape_regularity(build_structured({0, 1, 0, 1}, 4, CellType::Triangle));
    CHECK(tri.ok());
    CHECK(tri.l_star == doctest::Approx(1.0 / std::sqrt(2.0)));

    const Mesh degenerate = Mesh::from_cells({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 1}});
    const ShapeRegularityReport bad = validate_shape_regularity(degenerate);
    CHECK_FALSE(bad.ok());
    CHECK(bad.violations == std::vector<int>{0});
}

TEST_CASE("vtk output lists every cell")
{
    const Mesh m = build_structured({0, 1, 0, 1}, 3, CellType::Triangle);
    std::ostringstream os;
    write_vtk(m, os);
    const std::string s = os.str();
    CHECK(s.rfind("# vtk DataFile Version", 0) == 0);
    CHECK(s.find("POLYGONS 18 ") != std::string::npos);
}
