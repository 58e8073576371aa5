#include "xhdg/levelset.hpp"

#include <cmath>
#include <numbers>

#include "xhdg/error.hpp"

namespace xhdg {

Point LevelSet::normal(const Point& x) const
{
    const Point g = gradient(x);
    const double n = g.norm();
    return n > 0.0 ? Point(-g / n) : Point::Zero();
}

LevelSet LevelSet::composed(const Eigen::Matrix2d& A, const Point& b) const
{
    auto v = value_;
    auto g = gradient_;
    return LevelSet(
        name_ + "@affine", [v, A, b](const Point& x) { return v(A * x + b); },
        [g, A, b](const Point& x) { return Point(A.transpose() * g(A * x + b)); }, affine_);
}

LevelSet LevelSet::translated(const Point& shift) const
{
    return composed(Eigen::Matrix2d::Identity(), -shift);
}

namespace levelsets {

LevelSet circle(const Point& center, double r)
{
    return LevelSet(
        "circle", [center, r](const Point& x) { return (x - center).norm() - r; },
        [center](const Point& x) {
            const Point d = x - center;
            const double n = d.norm();
            return n > 0.0 ? Point(d / n) : Point::Zero();
        });
}

LevelSet halfplane(double a, double b, double c)
{
    if (a == 0.0 && b == 0.0)
        throw InvalidArgument("halfplane: zero normal");
    return LevelSet(
        "halfplane", [a, b, c](const Point& x) { return a * x.x() + b * x.y() + c; },
        [a, b](const Point&) { return Point(a, b); }, true);
}

LevelSet five_star()
{
    constexpr double r0 = 0.4330127018922193; // sqrt(3)/4
    return LevelSet(
        "five_star",
        [](const Point& x) {
            const double r = x.norm();
            const double th = std::atan2(x.y(), x.x());
            return r - r0 - 0.1 * std::sin(5.0 * th + 0.5 * std::numbers::pi);
        },
        [](const Point& x) {
            const double r2 = x.squaredNorm();
            const double r = std::sqrt(r2);
            if (r == 0.0)
                return Point(Point::Zero());
            const double th = std::atan2(x.y(), x.x());
            const double dth = -0.5 * std::cos(5.0 * th + 0.5 * std::numbers::pi); // d(phi)/d(theta)
            // grad r = x/r, grad theta = (-y, x)/r^2
            return Point(x / r + dth * Point(-x.y(), x.x()) / r2);
        });
}

LevelSet by_name(const std::string& name, const std::vector<double>& params)
{
    auto need = [&](size_t n) {
        if (params.size() != n)
            throw InvalidArgument("level set '" + name + "' expects " + std::to_string(n) + " parameters");
    };
    if (name == "circle") {
        need(3);
        return circle(Point(params[0], params[1]), params[2]);
    }
    if (name == "halfplane") {
        need(3);
        return halfplane(params[0], params[1], params[2]);
    }
    if (name == "five_star") {
        need(0);
        return five_star();
    }
    throw InvalidArgument("unknown level set '" + name + "'");
}

} // namespace levelsets

} // namespace xhdg
