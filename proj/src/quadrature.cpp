#include "xhdg/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "xhdg/error.hpp"

namespace xhdg {

double QuadRule::measure() const
{
    double s = 0.0;
    for (double w : weights)
        s += w;
    return s;
}

void QuadRule::append(const QuadRule& other)
{
    points.insert(points.end(), other.points.begin(), other.points.end());
    weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

namespace {

GaussLegendre compute_gauss_legendre(int n)
{
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton on P_n starting from the Chebyshev-like guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            const double pn = n == 0 ? 1.0 : (n == 1 ? x : p1);
            const double pnm1 = n == 1 ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        gl.nodes[i] = x;
        gl.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return gl;
}

void check_degree(int degree)
{
    if (degree < 0 || degree > max_quadrature_degree)
        throw InvalidArgument("quadrature: unsupported degree " + std::to_string(degree) + " (max " +
                              std::to_string(max_quadrature_degree) + ")");
}

} // namespace

const GaussLegendre& gauss_legendre(int npoints)
{
    static std::mutex mtx;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard lock(mtx);
    auto it = cache.find(npoints);
    if (it == cache.end())
        it = cache.emplace(npoints, compute_gauss_legendre(npoints)).first;
    return it->second;
}

QuadRule segment_rule(const Point& a, const Point& b, int degree)
{
    check_degree(degree);
    const int n = degree / 2 + 1;
    const auto& gl = gauss_legendre(n);
    const double len = (b - a).norm();
    QuadRule q;
    q.points.reserve(n);
    q.weights.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double t = 0.5 * (gl.nodes[i] + 1.0);
        q.points.push_back(a + t * (b - a));
        q.weights.push_back(0.5 * gl.weights[i] * len);
    }
    return q;
}

QuadRule triangle_rule(const Point& p0, const Point& p1, const Point& p2, int degree)
{
    check_degree(degree);
    // The collapsed map adds one degree in the first direction.
    const int n = (degree + 2) / 2 + ((degree + 2) % 2);
    const auto& gl = gauss_legendre(n);
    const Point e1 = p1 - p0, e2 = p2 - p0;
    const double jac = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
    QuadRule q;
    q.points.reserve(static_cast<size_t>(n) * n);
    q.weights.reserve(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        const double xi = 0.5 * (gl.nodes[i] + 1.0);
        const double wi = 0.5 * gl.weights[i];
        for (int j = 0; j < n; ++j) {
            const double eta = 0.5 * (gl.nodes[j] + 1.0);
            const double wj = 0.5 * gl.weights[j];
            const double s = xi, t = eta * (1.0 - xi);
            q.points.push_back(p0 + s * e1 + t * e2);
            q.weights.push_back(wi * wj * (1.0 - xi) * jac);
        }
    }
    return q;
}

QuadRule polygon_rule(std::span<const Point> polygon, int degree)
{
    check_degree(degree);
    QuadRule q;
    for (size_t i = 1; i + 1 < polygon.size(); ++i)
        q.append(triangle_rule(polygon[0], polygon[i], polygon[i + 1], degree));
    return q;
}

} // namespace xhdg
