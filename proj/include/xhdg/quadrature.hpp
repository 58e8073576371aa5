#pragma once

#include <span>
#include <vector>

#include "xhdg/mesh.hpp"

namespace xhdg {

/// Quadrature on a segment or planar region: physical points and positive weights
/// summing to the measure of the piece.
struct QuadRule {
    std::vector<Point> points;
    std::vector<double> weights;

    size_t size() const { return weights.size(); }
    double measure() const;
    void append(const QuadRule& other);
};

inline constexpr int max_quadrature_degree = 10;

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int npoints);

/// Gauss-Legendre rule on the segment [a, b], exact for polynomials of `degree`.
QuadRule segment_rule(const Point& a, const Point& b, int degree);

/// Collapsed (Duffy) Gauss rule on a triangle, exact for polynomials of `degree`.
QuadRule triangle_rule(const Point& p0, const Point& p1, const Point& p2, int degree);

/// Composite rule on a convex polygon, fan-triangulated from its first vertex.
QuadRule polygon_rule(std::span<const Point> polygon, int degree);

} // namespace xhdg
