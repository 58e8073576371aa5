#include "xhdg/problems.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "xhdg/error.hpp"

namespace xhdg {

using Eigen::Matrix2d;

Matrix2d ProblemSpec::stress(const Point& x, int side) const
{
    return nu[side] * exact.grad_u(x, side) - exact.p(x, side) * Matrix2d::Identity();
}

Point ProblemSpec::traction(const Point& x) const
{
    const Point n = levelset.normal(x);
    return (stress(x, Side1) - stress(x, Side2)) * n;
}

ProblemData ProblemSpec::data() const
{
    ProblemData d;
    d.nu = nu;
    d.alpha = alpha;
    d.force = force;
    auto u = exact.u;
    d.dirichlet = [u](const Point& x, int side) { return u(x, side); };
    if (!curved) {
        const ProblemSpec self = *this;
        d.traction = [self](const Point& x) { return self.traction(x); };
    }
    d.straight_interface = levelset.affine();
    return d;
}

namespace {

constexpr double pi = std::numbers::pi;

/// Fields of the rotating profile (y s, -x s) with s = |x - c|^2 - r2, scaled by 1/nu on
/// ex1 and unscaled on ex4.
struct Swirl {
    Point c;
    double r2;

    Point u(const Point& x) const
    {
        const double X = x.x() - c.x(), Y = x.y() - c.y(), s = X * X + Y * Y - r2;
        return {Y * s, -X * s};
    }
    Matrix2d grad(const Point& x) const
    {
        const double X = x.x() - c.x(), Y = x.y() - c.y(), s = X * X + Y * Y - r2;
        Matrix2d g;
        g << 2 * X * Y, s + 2 * Y * Y, -s - 2 * X * X, -2 * X * Y;
        return g;
    }
    /// -laplacian of u
    Point neg_laplacian(const Point& x) const { return {-8.0 * (x.y() - c.y()), 8.0 * (x.x() - c.x())}; }
};

ProblemSpec ex1()
{
    ProblemSpec s;
    s.name = "ex1";
    s.description = "square with circular interface, zero traction jump";
    s.domain = {-1, 1, -1, 1};
    s.levelset = levelsets::circle(Point(0, 0), std::sqrt(0.3));
    s.nu = {1.0, 1e-3};
    return s;
}

void finish_ex1(ProblemSpec& s)
{
    const Swirl w{Point(0, 0), 0.3};
    const auto nu = s.nu;
    const auto alpha = s.alpha;
    s.exact.u = [w, nu](const Point& x, int i) -> Point { return w.u(x) / nu[i]; };
    s.exact.grad_u = [w, nu](const Point& x, int i) -> Matrix2d { return w.grad(x) / nu[i]; };
    s.exact.p = [](const Point& x, int) { return (std::pow(x.x(), 3) - std::pow(x.y(), 3)) / 10.0; };
    s.force = [w, nu, alpha](const Point& x, int i) -> Point {
        const Point gp(0.3 * x.x() * x.x(), -0.3 * x.y() * x.y());
        return w.neg_laplacian(x) + gp + alpha[i] * w.u(x) / nu[i];
    };
}

ProblemSpec ex2()
{
    ProblemSpec s;
    s.name = "ex2";
    s.description = "square with circular interface, nonzero traction jump";
    s.domain = {-1, 1, -1, 1};
    s.levelset = levelsets::circle(Point(0, 0), std::sqrt(0.3));
    s.nu = {1.0, 1e-3};
    return s;
}

void finish_ex2(ProblemSpec& s)
{
    constexpr double shift = 1.3798535909816816;
    const auto nu = s.nu;
    const auto alpha = s.alpha;
    auto u = [nu](const Point& x, int i) -> Point {
        const double sn = std::sin(x.squaredNorm() - 0.3);
        return {1.0 + x.y() * sn / nu[i], 2.0 - x.x() * sn / nu[i]};
    };
    s.exact.u = u;
    s.exact.grad_u = [nu](const Point& x, int i) -> Matrix2d {
        const double q = x.squaredNorm() - 0.3, sn = std::sin(q), cs = std::cos(q);
        const double X = x.x(), Y = x.y();
        Matrix2d g;
        g << 2 * X * Y * cs, sn + 2 * Y * Y * cs, -sn - 2 * X * X * cs, -2 * X * Y * cs;
        return g / nu[i];
    };
    s.exact.p = [](const Point& x, int i) {
        return i == Side1 ? std::exp(x.x() + x.y()) - shift : std::sqrt(1.0 + x.squaredNorm()) - shift;
    };
    s.force = [u, alpha](const Point& x, int i) -> Point {
        const double r2 = x.squaredNorm(), q = r2 - 0.3, sn = std::sin(q), cs = std::cos(q);
        const double X = x.x(), Y = x.y();
        // -laplacian of (y sin q, -x sin q); nu cancels against the 1/nu scaling.
        const Point lap(-(8 * Y * cs - 4 * Y * r2 * sn), 8 * X * cs - 4 * X * r2 * sn);
        Point gp;
        if (i == Side1) {
            const double e = std::exp(X + Y);
            gp = Point(e, e);
        } else {
            gp = x / std::sqrt(1.0 + r2);
        }
        return lap + gp + alpha[i] * u(x, i);
    };
}

constexpr double b0 = 0.4031;

ProblemSpec ex3()
{
    ProblemSpec s;
    s.name = "ex3";
    s.description = "laminar flow across a straight interface";
    s.domain = {0, 1, 0, 1};
    s.levelset = levelsets::halfplane(0.0, 1.0, -b0);
    s.nu = {1.0, 1e-2};
    return s;
}

void finish_ex3(ProblemSpec& s)
{
    const auto nu = s.nu;
    const auto alpha = s.alpha;
    std::array<double, 2> lam{};
    for (int i = 0; i < 2; ++i)
        lam[i] = 1.0 / (2.0 * nu[i]) - std::sqrt(1.0 / (4.0 * nu[i] * nu[i]) + 4.0 * pi * pi);
    const double k = pi / b0;
    // Constant that makes the pressure mean-zero over the unit square.
    const double pshift =
        -b0 * (std::exp(2 * lam[1]) - 1.0) / (4 * lam[1]) - (1.0 - b0) * (std::exp(2 * lam[0]) - 1.0) / (4 * lam[0]);
    s.exact.u = [lam, k](const Point& x, int i) -> Point {
        return {1.0 - std::exp(lam[i]) * std::sin(k * x.y()), 0.0};
    };
    s.exact.grad_u = [lam, k](const Point& x, int i) -> Matrix2d {
        Matrix2d g = Matrix2d::Zero();
        g(0, 1) = -std::exp(lam[i]) * k * std::cos(k * x.y());
        return g;
    };
    s.exact.p = [lam, pshift](const Point& x, int i) { return 0.5 * std::exp(2 * lam[i] * x.x()) + pshift; };
    s.force = [lam, k, nu, alpha](const Point& x, int i) -> Point {
        const double e = std::exp(lam[i]);
        const double u1 = 1.0 - e * std::sin(k * x.y());
        return {-nu[i] * e * k * k * std::sin(k * x.y()) + lam[i] * std::exp(2 * lam[i] * x.x()) + alpha[i] * u1, 0.0};
    };
}

ProblemSpec ex4()
{
    ProblemSpec s;
    s.name = "ex4";
    s.description = "disc domain embedded in the unit square";
    s.domain = {0, 1, 0, 1};
    s.levelset = levelsets::circle(Point(0.5, 0.5), std::sqrt(3.0) / 4.0);
    s.curved = true;
    s.nu = {1.0, 1.0};
    return s;
}

void finish_swirl_disc(ProblemSpec& s, const Swirl& w)
{
    const auto nu = s.nu;
    const auto alpha = s.alpha;
    s.exact.u = [w](const Point& x, int) -> Point { return w.u(x); };
    s.exact.grad_u = [w](const Point& x, int) -> Matrix2d { return w.grad(x); };
    s.exact.p = [](const Point& x, int) { return (std::pow(x.x(), 3) - std::pow(x.y(), 3)) / 10.0; };
    s.force = [w, nu, alpha](const Point& x, int i) -> Point {
        const Point gp(0.3 * x.x() * x.x(), -0.3 * x.y() * x.y());
        return nu[i] * w.neg_laplacian(x) + gp + alpha[i] * w.u(x);
    };
}

// The swirl is centred on the disc so that it vanishes on the boundary circle.
void finish_ex4(ProblemSpec& s) { finish_swirl_disc(s, Swirl{Point(0.5, 0.5), 3.0 / 16.0}); }

// Swirl centred at the origin: same disc, nonzero boundary velocity.
void finish_ex4_offset(ProblemSpec& s) { finish_swirl_disc(s, Swirl{Point(0, 0), 3.0 / 16.0}); }

ProblemSpec ex5()
{
    ProblemSpec s;
    s.name = "ex5";
    s.description = "five-petal star domain embedded in [-1,1]^2";
    s.domain = {-1, 1, -1, 1};
    s.levelset = levelsets::five_star();
    s.curved = true;
    s.nu = {1.0, 1.0};
    return s;
}

void finish_ex5(ProblemSpec& s)
{
    const auto nu = s.nu;
    const auto alpha = s.alpha;
    auto u = [](const Point& x, int) -> Point { return {x.x() * x.x() * x.y(), -x.x() * x.y() * x.y()}; };
    s.exact.u = u;
    s.exact.grad_u = [](const Point& x, int) -> Matrix2d {
        const double X = x.x(), Y = x.y();
        Matrix2d g;
        g << 2 * X * Y, X * X, -Y * Y, -2 * X * Y;
        return g;
    };
    s.exact.p = [](const Point& x, int) { return (std::pow(x.x(), 3) - std::pow(x.y(), 3)) / 3.0; };
    s.force = [u, nu, alpha](const Point& x, int i) -> Point {
        const double X = x.x(), Y = x.y();
        return nu[i] * Point(-2 * Y, 2 * X) + Point(X * X, -Y * Y) + alpha[i] * u(x, i);
    };
}

} // namespace

std::vector<std::string> builtin_names() { return {"ex1", "ex2", "ex3", "ex4", "ex4-offset", "ex5"}; }

ProblemSpec builtin(const std::string& name, const CoefficientOverrides& o)
{
    ProblemSpec s;
    void (*finish)(ProblemSpec&) = nullptr;
    if (name == "ex1") {
        s = ex1();
        finish = finish_ex1;
    } else if (name == "ex2") {
        s = ex2();
        finish = finish_ex2;
    } else if (name == "ex3") {
        s = ex3();
        finish = finish_ex3;
    } else if (name == "ex4") {
        s = ex4();
        finish = finish_ex4;
    } else if (name == "ex4-offset") {
        s = ex4();
        s.name = name;
        s.description = "disc domain embedded in the unit square, swirl centred at the origin";
        finish = finish_ex4_offset;
    } else if (name == "ex5") {
        s = ex5();
        finish = finish_ex5;
    } else {
        throw InvalidArgument("unknown problem '" + name + "' (expected ex1..ex5 or ex4-offset)");
    }
    if (o.nu1)
        s.nu[0] = *o.nu1;
    if (o.nu2)
        s.nu[1] = *o.nu2;
    if (o.alpha1)
        s.alpha[0] = *o.alpha1;
    if (o.alpha2)
        s.alpha[1] = *o.alpha2;
    for (int i = 0; i < 2; ++i) {
        if (!(s.nu[i] > 0.0))
            throw InvalidArgument("viscosity must be positive");
        if (!(s.alpha[i] >= 0.0))
            throw InvalidArgument("alpha must be non-negative");
    }
    finish(s);
    return s;
}

ProblemSpec shifted(const ProblemSpec& spec, const Point& shift)
{
    ProblemSpec s = spec;
    s.levelset = spec.levelset.translated(shift);
    const ExactSolution e = spec.exact;
    s.exact.u = [e, shift](const Point& x, int i) { return e.u(x - shift, i); };
    s.exact.grad_u = [e, shift](const Point& x, int i) { return e.grad_u(x - shift, i); };
    s.exact.p = [e, shift](const Point& x, int i) { return e.p(x - shift, i); };
    const VectorField f = spec.force;
    s.force = [f, shift](const Point& x, int i) { return f(x - shift, i); };
    return s;
}

std::function<Point(const Point&)> derive_interface_data(const ProblemSpec& spec, const Chord& chord)
{
    std::function<Point(const Point&)> g;
    if (spec.curved) {
        auto u = spec.exact.u;
        g = [u](const Point& x) { return u(x, Side2); };
    } else {
        const ProblemSpec self = spec;
        g = [self](const Point& x) { return self.traction(x); };
    }
    return chord_data(g, chord, spec.levelset.affine());
}

SpecReport verify_spec(const ProblemSpec& spec, int samples, unsigned seed)
{
    SpecReport rep;
    rep.samples = samples;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(spec.domain.xmin, spec.domain.xmax);
    std::uniform_real_distribution<double> uy(spec.domain.ymin, spec.domain.ymax);
    const double h = 1e-5;
    const Point ex(h, 0), ey(0, h);

    int taken = 0;
    for (int it = 0; taken < samples && it < 100 * samples; ++it) {
        const Point x(ux(rng), uy(rng));
        const double phi = spec.levelset(x);
        if (std::abs(phi) < 10 * h)
            continue;
        const int i = phi > 0.0 ? Side1 : Side2;
        if (spec.curved && i != Side2)
            continue;
        ++taken;
        // div(nu grad u) from central differences of the analytic gradient.
        const Matrix2d gxp = spec.exact.grad_u(x + ex, i), gxm = spec.exact.grad_u(x - ex, i);
        const Matrix2d gyp = spec.exact.grad_u(x + ey, i), gym = spec.exact.grad_u(x - ey, i);
        const Point div_grad = ((gxp.col(0) - gxm.col(0)) + (gyp.col(1) - gym.col(1))) / (2 * h);
        const Point grad_p((spec.exact.p(x + ex, i) - spec.exact.p(x - ex, i)) / (2 * h),
                           (spec.exact.p(x + ey, i) - spec.exact.p(x - ey, i)) / (2 * h));
        const Point f = spec.force(x, i);
        const Point lhs = -spec.nu[i] * div_grad + grad_p + spec.alpha[i] * spec.exact.u(x, i);
        rep.pde_residual = std::max(rep.pde_residual, (f - lhs).norm() / (1.0 + f.norm()));

        const Matrix2d g = spec.exact.grad_u(x, i);
        Matrix2d fd;
        fd.col(0) = (spec.exact.u(x + ex, i) - spec.exact.u(x - ex, i)) / (2 * h);
        fd.col(1) = (spec.exact.u(x + ey, i) - spec.exact.u(x - ey, i)) / (2 * h);
        rep.gradient_mismatch = std::max(rep.gradient_mismatch, (g - fd).norm() / (1.0 + g.norm()));
        rep.divergence = std::max(rep.divergence, std::abs(g.trace()));
    }

    if (!spec.curved) {
        // Interface points by bisection between random points on opposite sides.
        int found = 0;
        for (int it = 0; found < std::max(1, samples / 10) && it < 100 * samples; ++it) {
            Point a(ux(rng), uy(rng)), b(ux(rng), uy(rng));
            if ((spec.levelset(a) > 0.0) == (spec.levelset(b) > 0.0))
                continue;
            if (spec.levelset(a) < 0.0)
                std::swap(a, b);
            for (int k = 0; k < 80; ++k) {
                const Point m = 0.5 * (a + b);
                (spec.levelset(m) > 0.0 ? a : b) = m;
            }
            const Point x = 0.5 * (a + b);
            rep.velocity_jump = std::max(rep.velocity_jump, (spec.exact.u(x, Side1) - spec.exact.u(x, Side2)).norm());
            ++found;
        }
        // Compatibility over the four sides of the rectangle.
        const Rectangle& d = spec.domain;
        const std::array<Point, 4> c{Point(d.xmin, d.ymin), Point(d.xmax, d.ymin), Point(d.xmax, d.ymax),
                                     Point(d.xmin, d.ymax)};
        constexpr int sub = 256;
        for (int e = 0; e < 4; ++e) {
            const Point p0 = c[e], p1 = c[(e + 1) % 4];
            const Point t = p1 - p0;
            const Point n = Point(t.y(), -t.x()).normalized();
            for (int k = 0; k < sub; ++k) {
                const QuadRule q = segment_rule(p0 + (double(k) / sub) * t, p0 + (double(k + 1) / sub) * t, 10);
                for (size_t j = 0; j < q.size(); ++j)
                    rep.compatibility += q.weights[j] * spec.exact.u(q.points[j], spec.side_at(q.points[j])).dot(n);
            }
        }
    }

    // Mean pressure and, for fictitious domains, boundary flux on a fine chord approximation.
    const Mesh mesh = build_structured(spec.domain, 128, CellType::Rectangle);
    CutMeshOptions copts;
    copts.curved = spec.curved;
    const CutMesh cut(mesh, spec.levelset, copts);
    double pint = 0.0, area = 0.0;
    for (const auto& piece : cut.pieces()) {
        const QuadRule q = piece_quadrature(piece, 8);
        for (size_t j = 0; j < q.size(); ++j)
            pint += q.weights[j] * spec.exact.p(q.points[j], piece.side);
        area += piece.area;
    }
    rep.pressure_mean = pint / area;
    if (spec.curved) {
        for (const auto& ch : cut.chords()) {
            const QuadRule q = segment_rule(ch.a, ch.b, 8);
            for (size_t j = 0; j < q.size(); ++j)
                rep.compatibility += q.weights[j] * spec.exact.u(q.points[j], Side2).dot(-ch.n1);
        }
    }
    return rep;
}

} // namespace xhdg
