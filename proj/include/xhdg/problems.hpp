#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "xhdg/assembly.hpp"
#include "xhdg/cut_geometry.hpp"
#include "xhdg/levelset.hpp"

namespace xhdg {

/// Closed-form fields per subdomain. grad_u(x, i)(a, b) = d u_a / d x_b.
struct ExactSolution {
    std::function<Point(const Point&, int side)> u;
    std::function<Eigen::Matrix2d(const Point&, int side)> grad_u;
    std::function<double(const Point&, int side)> p;
};

/// A manufactured-solution configuration: geometry, coefficients, exact fields and the
/// data derived from them.
struct ProblemSpec {
    std::string name;
    std::string description;
    Rectangle domain;
    LevelSet levelset;
    /// Fictitious-domain mode: the physical domain is the side-2 region inside `domain`.
    bool curved = false;
    std::array<double, 2> nu{1.0, 1.0};
    std::array<double, 2> alpha{0.0, 0.0};
    ExactSolution exact;
    /// f = -div(nu grad u) + grad p + alpha u, hand-derived.
    VectorField force;

    /// Side index of a point (phi > 0 is side 1).
    int side_at(const Point& x) const { return levelset(x) > 0.0 ? Side1 : Side2; }
    Point dirichlet(const Point& x, int side) const { return exact.u(x, side); }
    /// (nu grad u - p I) n on side 1 minus the same on side 2, n the level-set normal at x.
    Point traction(const Point& x) const;
    /// Cauchy-like stress nu grad u - p I of one side.
    Eigen::Matrix2d stress(const Point& x, int side) const;
    ProblemData data() const;
};

struct CoefficientOverrides {
    std::optional<double> nu1, nu2, alpha1, alpha2;
};

/// Built-in configurations "ex1" ... "ex5", plus "ex4-offset" (the disc of ex4 with a swirl
/// centred at the origin, so the boundary data is nonzero). Throws InvalidArgument for
/// unknown names.
ProblemSpec builtin(const std::string& name, const CoefficientOverrides& overrides = {});
std::vector<std::string> builtin_names();

/// The same configuration with geometry and exact fields translated by `shift`; the
/// computational box is unchanged.
ProblemSpec shifted(const ProblemSpec& spec, const Point& shift);

/// Traction (interface problems) or boundary velocity (fictitious-domain problems) along a
/// chord: exact on straight interfaces, otherwise linear between the chord endpoints.
std::function<Point(const Point&)> derive_interface_data(const ProblemSpec& spec, const Chord& chord);

struct SpecReport {
    double pde_residual = 0.0;      ///< max |f - (-div(nu grad u) + grad p + alpha u)| / (1 + |f|)
    double gradient_mismatch = 0.0; ///< max |grad_u - FD(u)| / (1 + |grad_u|)
    double divergence = 0.0;        ///< max |div u|
    double velocity_jump = 0.0;     ///< max |u1 - u2| on the interface (interface problems)
    double compatibility = 0.0;     ///< integral of g_D . n over the outer boundary
    double pressure_mean = 0.0;     ///< mean of p over the physical domain
    int samples = 0;

    bool ok(double tol = 1e-8) const
    {
        return pde_residual <= tol && gradient_mismatch <= 1e-6 && divergence <= 1e-10 && velocity_jump <= 1e-10;
    }
};

/// Randomized residual checks of the exact fields against the derived data (report only).
SpecReport verify_spec(const ProblemSpec& spec, int samples = 10000, unsigned seed = 12345);

} // namespace xhdg
