#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "xhdg/cut_geometry.hpp"
#include "xhdg/error.hpp"
#include "xhdg/problems.hpp"

using namespace xhdg;

namespace {

const Mesh& unit_triangle()
{
    static const Mesh m = Mesh::from_cells({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
    return m;
}

const Mesh& unit_square()
{
    static const Mesh m = Mesh::from_cells({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}});
    return m;
}

LevelSet line(double a, double b, double c) { return levelsets::halfplane(a, b, c); }

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

double integrate(const QuadRule& q, const std::function<double(const Point&)>& f)
{
    double s = 0.0;
    for (size_t i = 0; i < q.size(); ++i)
        s += q.weights[i] * f(q.points[i]);
    return s;
}

} // namespace

TEST_CASE("classification")
{
    CHECK(classify_element(unit_triangle(), line(1, 0, -0.5), 0) == CellClass::Cut);
    CHECK(classify_element(unit_triangle(), levelsets::circle({0, 0}, 5.0), 0) == CellClass::Pure2);
    CHECK(classify_element(unit_triangle(), levelsets::circle({10, 10}, 1.0), 0) == CellClass::Pure1);

    // A vertex 1e-15 away from the interface is snapped into subdomain 1.
    const LevelSet tiny("tiny", [](const Point& x) { return x.x() + x.y() + 1e-15; },
                        [](const Point&) { return Point(1, 1); });
    CHECK(classify_element(unit_triangle(), tiny, 0) == CellClass::Pure1);
    CHECK(snapped_value(1e-15, 1.0) > 0.0);
    CHECK(snapped_value(-1e-15, 1.0) > 0.0);
    CHECK(snapped_value(-1e-3, 1.0) == -1e-3);

    const LevelSet zero("zero", [](const Point&) { return 0.0; }, [](const Point&) { return Point(1, 0); });
    CHECK_THROWS_AS(classify_element(unit_triangle(), zero, 0), AssumptionViolation);
}

TEST_CASE("edge intersections")
{
    const Point a = intersect_edge(line(1, 0, -0.5), {0, 0}, {1, 0}, 1.0);
    CHECK(a.x() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(a.y() == 0.0);

    const LevelSet circle("c", [](const Point& x) { return x.squaredNorm() - 0.3; },
                          [](const Point& x) { return Point(2 * x); });
    const Point b = intersect_edge(circle, {0, 0.4}, {1, 0.4}, 1.0);
    CHECK(b.x() == doctest::Approx(std::sqrt(0.14)).epsilon(1e-11));

    const Point c = intersect_edge(line(0, 1, -0.4031), {0.4, 0.40}, {0.4, 0.41}, 0.01);
    CHECK(c.y() == doctest::Approx(0.4031).epsilon(1e-12));
    CHECK(c.x() == 0.4);

    CHECK_THROWS_AS(intersect_edge(line(1, 0, -2.0), {0, 0}, {1, 0}, 1.0), InvalidArgument);
}

TEST_CASE("cut triangle by x = 0.5")
{
    const CutTopology t = build_cut_topology(unit_triangle(), line(1, 0, -0.5), 0);
    REQUIRE(t.cls == CellClass::Cut);
    REQUIRE(t.pieces.size() == 2);
    // phi = x - 0.5 > 0 is subdomain 1: the triangle right of the line.
    CHECK(t.piece(Side1)->area == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(t.piece(Side2)->area == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(t.chord_length == doctest::Approx(0.5));
    const double ys[2] = {t.points[0].y(), t.points[1].y()};
    CHECK(std::min(ys[0], ys[1]) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(std::max(ys[0], ys[1]) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(t.points[0].x() == doctest::Approx(0.5));
    // Normal from subdomain 1 into subdomain 2 points towards -x.
    CHECK(t.chord_normal.x() == doctest::Approx(-1.0));

    // Quadrature on the pieces.
    CHECK(piece_quadrature(*t.piece(Side1), 4).measure() == doctest::Approx(0.125).epsilon(1e-14));
    const QuadRule chord = piece_quadrature(Point(0.5, 0), Point(0.5, 0.5), 4);
    CHECK(integrate(chord, [](const Point& x) { return x.x(); }) == doctest::Approx(0.25).epsilon(1e-14));
    const QuadRule tri = triangle_rule({0.5, 0}, {1, 0}, {0.5, 0.5}, 2);
    CHECK(integrate(tri, [](const Point& x) { return x.x() * x.y(); }) ==
          doctest::Approx(5.0 / 384.0).epsilon(1e-14));
    CHECK(integrate(piece_quadrature(*t.piece(Side1), 2), [](const Point& x) { return x.x() * x.y(); }) ==
          doctest::Approx(5.0 / 384.0).epsilon(1e-14));
}

TEST_CASE("cut unit square")
{
    const CutTopology h = build_cut_topology(unit_square(), line(0, 1, -0.25), 0);
    CHECK(h.piece(Side2)->area == doctest::Approx(0.25));
    CHECK(h.piece(Side1)->area == doctest::Approx(0.75));
    CHECK(h.chord_length == doctest::Approx(1.0));

    const CutTopology d = build_cut_topology(unit_square(), line(1, 1, -0.5), 0);
    CHECK(d.piece(Side2)->area == doctest::Approx(0.125));
    CHECK(d.piece(Side2)->vertices.size() == 3);
    CHECK(d.piece(Side1)->vertices.size() == 5);
}

TEST_CASE("quadrature exactness")
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int deg = 0; deg <= max_quadrature_degree; ++deg)
        for (int a = 0; a <= deg; ++a) {
            const int b = deg - a;
            // Reference triangle: int x^a y^b = a! b! / (a + b + 2)!
            const QuadRule q = triangle_rule({0, 0}, {1, 0}, {0, 1}, deg);
            const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
            CHECK(integrate(q, [&](const Point& x) { return std::pow(x.x(), a) * std::pow(x.y(), b); }) ==
                  doctest::Approx(exact).epsilon(1e-13));
            for (double w : q.weights)
                CHECK(w > 0.0);
        }
    for (int deg = 0; deg <= max_quadrature_degree; ++deg) {
        const Point p(u(rng), u(rng)), r(u(rng), u(rng));
        const QuadRule q = segment_rule(p, r, deg);
        // int_0^1 t^deg dt along the segment, times its length
        const double exact = (r - p).norm() / (deg + 1);
        CHECK(integrate(q, [&](const Point& x) { return std::pow((x - p).dot(r - p) / (r - p).squaredNorm(), deg); }) ==
              doctest::Approx(exact).epsilon(1e-13));
    }
    CHECK_THROWS_AS(triangle_rule({0, 0}, {1, 0}, {0, 1}, max_quadrature_degree + 1), InvalidArgument);

    const std::vector<Point> square{{0, 0}, {2, 0}, {2, 1}, {0, 1}};
    const QuadRule q = polygon_rule(square, 4);
    CHECK(q.measure() == doctest::Approx(2.0));
    CHECK(integrate(q, [](const Point& x) { return x.x() * x.x() * x.y(); }) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("piece areas add up and chord endpoints lie on the interface")
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> c(-0.3, 0.3), r(0.2, 0.7);
    for (int trial = 0; trial < 12; ++trial) {
        const Point center(c(rng), c(rng));
        const double radius = r(rng);
        const LevelSet ls = levelsets::circle(center, radius);
        for (CellType type : {CellType::Triangle, CellType::Rectangle}) {
            const Mesh mesh = build_structured({-1, 1, -1, 1}, 24, type);
            CutMesh cut = [&] {
                try {
                    return CutMesh(mesh, ls);
                } catch (const AssumptionViolation&) {
                    return CutMesh(mesh);
                }
            }();
            if (!cut.has_interface())
                continue;
            for (int k = 0; k < mesh.num_cells(); ++k) {
                double sum = 0.0;
                for (int p : cut.cell_pieces(k))
                    sum += cut.piece(p).area;
                CHECK(std::abs(sum - mesh.cell_area(k)) <= 1e-12 * mesh.cell_area(k));
            }
            for (const Chord& ch : cut.chords()) {
                const double h = mesh.cell_diameter(ch.cell);
                CHECK(std::abs(ls(ch.a)) <= 1e-10 * h);
                CHECK(std::abs(ls(ch.b)) <= 1e-10 * h);
                // Orientation agrees with the level-set normal up to O(h).
                CHECK(ch.n1.dot(ls.normal(0.5 * (ch.a + ch.b))) > 0.9);
            }
        }
    }
}

TEST_CASE("straight interface: chord normal is exact")
{
    const ProblemSpec ex3 = builtin("ex3");
    const Mesh mesh = build_structured(ex3.domain, 8, CellType::Triangle);
    const CutMesh cut(mesh, ex3.levelset);
    REQUIRE(cut.num_chords() > 0);
    for (const Chord& ch : cut.chords()) {
        CHECK(ch.n1.x() == doctest::Approx(0.0));
        CHECK(ch.n1.y() == doctest::Approx(-1.0));
        CHECK(ch.a.y() == doctest::Approx(0.4031).epsilon(1e-13));
    }
}

TEST_CASE("circle area converges at second order")
{
    const double r0 = std::sqrt(0.3), exact = std::numbers::pi * 0.3;
    std::vector<double> err;
    for (int n : {16, 32, 64, 128}) {
        const Mesh mesh = build_structured({-1, 1, -1, 1}, n, CellType::Triangle);
        const CutMesh cut(mesh, levelsets::circle({0, 0}, r0));
        double inner = 0.0;
        for (const ElementPiece& p : cut.pieces())
            inner += p.side == Side2 ? p.area : 0.0;
        err.push_back(exact - inner);
        CHECK(inner < exact); // chords cut inside a convex region
    }
    CHECK(std::log2(err[2] / err[3]) >= 1.9);
}

TEST_CASE("interface assumption report")
{
    const Mesh m16 = build_structured({-1, 1, -1, 1}, 16, CellType::Triangle);
    const InterfaceReport circle = validate_interface_assumptions(m16, levelsets::circle({0, 0}, std::sqrt(0.3)));
    CHECK(circle.a1_holds);
    CHECK(circle.num_cut_cells > 0);
    CHECK(circle.gamma > 0.0);

    const ProblemSpec ex3 = builtin("ex3");
    const InterfaceReport straight =
        validate_interface_assumptions(build_structured(ex3.domain, 8, CellType::Triangle), ex3.levelset);
    CHECK(straight.a1_holds);
    CHECK(straight.gamma == doctest::Approx(0.0));

    const InterfaceReport star = validate_interface_assumptions(m16, levelsets::five_star());
    CHECK_FALSE(star.a1_holds);
    CHECK_FALSE(star.violating_cells.empty());
    CHECK_THROWS_AS(CutMesh(m16, levelsets::five_star()), AssumptionViolation);

    const Mesh coarse = build_structured({-1, 1, -1, 1}, 4, CellType::Rectangle);
    CHECK_FALSE(validate_interface_assumptions(coarse, levelsets::five_star()).a1_holds);
}

TEST_CASE("curved mode keeps only the active side")
{
    const ProblemSpec ex4 = builtin("ex4");
    const Mesh mesh = build_structured(ex4.domain, 8, CellType::Triangle);
    CutMeshOptions opts;
    opts.curved = true;
    const CutMesh cut(mesh, ex4.levelset, opts);
    for (const ElementPiece& p : cut.pieces())
        CHECK(p.side == Side2);
    for (int k = 0; k < mesh.num_cells(); ++k) {
        if (cut.cell_class(k) == CellClass::Pure1)
            CHECK(cut.cell_pieces(k).empty());
        else
            CHECK(cut.cell_pieces(k).size() == 1);
    }
    for (const Chord& ch : cut.chords()) {
        CHECK(ch.piece[Side1] == -1);
        CHECK(ch.piece[Side2] >= 0);
    }
}

TEST_CASE("level-set builtins")
{
    const LevelSet star = levelsets::five_star();
    // rho(r, theta) = r - sqrt(3)/4 - sin(5 theta + pi/2)/10 at theta = 0, r = 1
    CHECK(star(Point(1, 0)) == doctest::Approx(1.0 - std::sqrt(3.0) / 4 - 0.1));
    const LevelSet c = levelsets::by_name("circle", {0.5, 0.5, 0.25});
    CHECK(c(Point(0.5, 0.5)) == doctest::Approx(-0.25));
    CHECK(c.normal(Point(0.75, 0.5)).x() == doctest::Approx(-1.0));
    CHECK(levelsets::halfplane(0, 2, -1).affine());
    CHECK_THROWS_AS(levelsets::by_name("ellipse", {}), InvalidArgument);
    const LevelSet moved = c.translated(Point(1, 0));
    CHECK(moved(Point(1.5, 0.5)) == doctest::Approx(-0.25));
}
