#pragma once

#include <functional>
#include <string>

#include <Eigen/Core>

#include "xhdg/mesh.hpp"

namespace xhdg {

/// Scalar level-set description of an interface. phi > 0 is subdomain 1, phi < 0 is
/// subdomain 2, and the interface normal -grad(phi)/|grad(phi)| points from 1 into 2.
class LevelSet {
public:
    using ValueFn = std::function<double(const Point&)>;
    using GradientFn = std::function<Point(const Point&)>;

    LevelSet() = default;
    LevelSet(std::string name, ValueFn value, GradientFn gradient, bool affine = false)
        : name_(std::move(name)), value_(std::move(value)), gradient_(std::move(gradient)), affine_(affine) {}

    double operator()(const Point& x) const { return value_(x); }
    Point gradient(const Point& x) const { return gradient_(x); }
    /// Unit normal pointing from subdomain 1 into subdomain 2.
    Point normal(const Point& x) const;

    /// True when the zero set is a straight line, so chords coincide with the interface.
    bool affine() const { return affine_; }
    const std::string& name() const { return name_; }

    /// x -> phi(A x + b)
    LevelSet composed(const Eigen::Matrix2d& A, const Point& b) const;
    LevelSet translated(const Point& shift) const;

private:
    std::string name_;
    ValueFn value_;
    GradientFn gradient_;
    bool affine_ = false;
};

namespace levelsets {

/// |x - center| - r : subdomain 1 outside the circle.
LevelSet circle(const Point& center, double r);
/// a x + b y + c
LevelSet halfplane(double a, double b, double c);
/// r - sqrt(3)/4 - sin(5 theta + pi/2)/10 : the five-petal star, negative inside.
LevelSet five_star();

/// Selects a built-in by name ("circle", "halfplane", "five_star"); `params` holds the
/// constructor arguments in order.
LevelSet by_name(const std::string& name, const std::vector<double>& params);

} // namespace levelsets

} // namespace xhdg
