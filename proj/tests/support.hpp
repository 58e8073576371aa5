#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "xhdg/study.hpp"

namespace xhdg::testing {

/// u = (x, -y), p = 0 with per-side viscosities on the geometry of `base`. The
/// scheme reproduces it exactly when the chords coincide with the interface.
inline ProblemSpec patch_spec(const ProblemSpec& base, std::array<double, 2> nu)
{
    ProblemSpec s = base;
    s.name = base.name + "-patch";
    s.nu = nu;
    s.alpha = {0.0, 0.0};
    s.exact.u = [](const Point& x, int) -> Point { return {x.x(), -x.y()}; };
    s.exact.grad_u = [](const Point&, int) -> Eigen::Matrix2d {
        return Eigen::Vector2d(1.0, -1.0).asDiagonal();
    };
    s.exact.p = [](const Point&, int) { return 0.0; };
    s.force = [](const Point&, int) -> Point { return Point::Zero(); };
    return s;
}

/// Every field and datum vanishes.
inline ProblemSpec zero_spec(const ProblemSpec& base)
{
    ProblemSpec s = base;
    s.name = base.name + "-zero";
    s.exact.u = [](const Point&, int) -> Point { return Point::Zero(); };
    s.exact.grad_u = [](const Point&, int) -> Eigen::Matrix2d { return Eigen::Matrix2d::Zero(); };
    s.exact.p = [](const Point&, int) { return 0.0; };
    s.force = [](const Point&, int) -> Point { return Point::Zero(); };
    return s;
}

/// Condensed and monolithic solutions of one configuration.
struct OraclePair {
    std::unique_ptr<Mesh> mesh;
    std::unique_ptr<CutMesh> cut;
    std::optional<Solution> condensed, monolithic;
};

inline OraclePair solve_both(const ProblemSpec& spec, int n, CellType type, bool with_interface, int m = 0,
                             GlobalSolver method = GlobalSolver::Block)
{
    OraclePair r;
    r.mesh = std::make_unique<Mesh>(build_structured(spec.domain, n, type));
    if (with_interface) {
        CutMeshOptions copts;
        copts.curved = spec.curved;
        r.cut = std::make_unique<CutMesh>(*r.mesh, spec.levelset, copts);
    } else {
        r.cut = std::make_unique<CutMesh>(*r.mesh);
    }
    const DofMap dofs(*r.cut, m);
    ProblemData data = spec.data();
    if (!with_interface)
        data.nu = {spec.nu[0], spec.nu[0]};
    const auto locals = assemble_all(*r.cut, dofs, data);
    const Eigen::VectorXd ess = essential_values(*r.cut, dofs, data);
    r.condensed.emplace(solve(condense(locals, dofs, ess), dofs, method));
    r.monolithic.emplace(monolithic_solve(locals, dofs, ess));
    return r;
}

/// Largest componentwise difference over every unknown.
inline double max_difference(const Solution& a, const Solution& b)
{
    const double dc = (a.condensed() - b.condensed()).lpNorm<Eigen::Infinity>();
    const double di = (a.interior() - b.interior()).lpNorm<Eigen::Infinity>();
    return std::max(dc, di);
}

inline double max_abs(const Solution& s)
{
    return std::max(s.condensed().lpNorm<Eigen::Infinity>(), s.interior().lpNorm<Eigen::Infinity>());
}

/// Orders between the last two rows; nullopt when orders were omitted.
inline std::optional<std::array<double, 4>> finest_orders(const ConvergenceTable& t)
{
    if (t.orders.empty())
        return std::nullopt;
    return t.orders.back();
}

} // namespace xhdg::testing
