#include <cmath>

#include <Eigen/SparseCore>

#include "doctest.h"
#include "support.hpp"
#include "xhdg/error.hpp"

using namespace xhdg;
using namespace xhdg::testing;

TEST_CASE("single uncut triangle with zero data")
{
    const Mesh mesh = Mesh::from_cells({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
    const CutMesh cut(mesh);
    const DofMap dofs(cut, 0);
    ProblemData data;
    const auto locals = assemble_all(cut, dofs, data);
    const Solution sol = solve(condense(locals, dofs, essential_values(cut, dofs, data)), dofs);
    CHECK(sol.condensed().lpNorm<Eigen::Infinity>() <= 1e-14);
    CHECK(sol.interior().lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("patch test reproduces a linear velocity")
{
    const ProblemSpec spec = patch_spec(builtin("ex3"), {1.0, 0.01});
    for (CellType type : {CellType::Triangle, CellType::Rectangle})
        for (int m : {0, 1}) {
            StudyOptions opts;
            opts.cell_type = type;
            opts.m = m;
            const LevelResult r = run_level(spec, 8, opts);
            CHECK(r.row.err_u <= 1e-10);
            CHECK(r.row.err_L <= 1e-10);
            CHECK(r.row.err_p <= 1e-10);
        }
}

TEST_CASE("condensation agrees with the monolithic system")
{
    const ProblemSpec spec = builtin("ex1", {.nu1 = 1.0, .nu2 = 1.0});
    for (CellType type : {CellType::Triangle, CellType::Rectangle}) {
        const OraclePair r = solve_both(spec, 16, type, true);
        CHECK(max_difference(*r.condensed, *r.monolithic) <= 1e-9);
    }
    const OraclePair uncut = solve_both(spec, 4, CellType::Triangle, false);
    CHECK(max_difference(*uncut.condensed, *uncut.monolithic) <= 1e-10);
}

TEST_CASE("block and direct global solvers agree")
{
    for (const char* name : {"ex1", "ex5"}) {
        const ProblemSpec spec = builtin(name);
        const int n = std::string(name) == "ex5" ? 32 : 16;
        const Mesh mesh = build_structured(spec.domain, n, CellType::Triangle);
        const CutMesh cut(mesh, spec.levelset);
        const DofMap dofs(cut, 0);
        const ProblemData data = spec.data();
        const CondensedSystem sys = condense(assemble_all(cut, dofs, data), dofs, essential_values(cut, dofs, data));
        const Solution a = solve(sys, dofs, GlobalSolver::Block);
        const Solution b = solve(sys, dofs, GlobalSolver::DirectLU);
        CHECK(max_difference(a, b) <= 1e-9 * max_abs(b));
        CHECK(a.relative_residual <= 1e-10);
    }
}

TEST_CASE("recovered interior unknowns satisfy the local equations")
{
    const ProblemSpec spec = builtin("ex1");
    const Mesh mesh = build_structured(spec.domain, 16, CellType::Triangle);
    const CutMesh cut(mesh, spec.levelset);
    const DofMap dofs(cut, 1);
    const ProblemData data = spec.data();
    const auto locals = assemble_all(cut, dofs, data);
    const CondensedSystem sys = condense(locals, dofs, essential_values(cut, dofs, data));
    const Solution sol = solve(sys, dofs);
    REQUIRE(sys.cells.size() == locals.size());
    for (size_t c = 0; c < locals.size(); ++c) {
        const LocalSystem& ls = locals[c];
        Eigen::VectorXd x(ls.size());
        for (int lp = 0; lp < ls.num_pieces(); ++lp)
            x.segment(10 * lp, 10) = sol.interior().segment(10 * ls.pieces[lp], 10);
        for (int e = 0; e < ls.exterior_size(); ++e)
            x[ls.interior_size() + e] = sol.condensed()[ls.dofs[e]];
        const Eigen::VectorXd r = (ls.K * x - ls.F).head(ls.interior_size());
        CHECK(r.norm() <= 1e-9 * (1.0 + ls.F.norm() + ls.K.norm() * x.norm()));
    }
}

TEST_CASE("pressure constraint and essential entries")
{
    const ProblemSpec spec = builtin("ex2");
    StudyOptions opts;
    const LevelResult r = run_level(spec, 16, opts);
    const Solution& sol = *r.solution;
    double mean = 0.0, area = 0.0;
    for (int i = 0; i < r.cut->num_pieces(); ++i) {
        mean += sol.p(i) * r.cut->piece(i).area;
        area += r.cut->piece(i).area;
    }
    CHECK(std::abs(mean / area) <= 1e-12);
    CHECK(std::abs(sol.multiplier()) <= 1e-8);
    const ProblemData data = spec.data();
    const Eigen::VectorXd ess = essential_values(*r.cut, sol.dofs(), data);
    for (int d = 0; d < sol.dofs().condensed_size(); ++d)
        if (sol.dofs().essential(d))
            CHECK(sol.condensed()[d] == ess[d]);
}

TEST_CASE("local conservation")
{
    for (const char* name : {"ex1", "ex3", "ex4"}) {
        const LevelResult r = run_level(builtin(name), 16);
        CHECK(r.max_piece_flux <= 1e-9);
    }
}

TEST_CASE("sparse solvers report failures")
{
    Eigen::SparseMatrix<double> singular(2, 2);
    singular.insert(0, 0) = 1.0;
    singular.insert(1, 0) = 1.0;
    singular.makeCompressed();
    double res = 0.0;
    CHECK_THROWS_AS(sparse_direct_solve(singular, Eigen::Vector2d(1.0, 2.0), res), SolverFailure);

    // A general nonsymmetric matrix leaves the block path and still solves.
    Eigen::SparseMatrix<double> A(3, 3);
    A.insert(0, 0) = 2.0;
    A.insert(0, 1) = 1.0;
    A.insert(1, 2) = 3.0;
    A.insert(2, 0) = 1.0;
    A.insert(2, 2) = 1.0;
    A.makeCompressed();
    const Eigen::Vector3d b(1.0, 2.0, 3.0);
    const Eigen::VectorXd x = condensed_solve(A, b, 1, res);
    CHECK((A * x - b).norm() <= 1e-12);
}

TEST_CASE("reference value on the coarsest level")
{
    StudyOptions opts;
    opts.assembly.tau_length = TauLength::ShortestEdge;
    opts.error_degree = 8;
    const LevelResult grid = run_level(builtin("ex1"), 16, opts);
    CHECK(grid.row.err_u == doctest::Approx(1.4633e-1).epsilon(1e-3));
    const LevelResult diameter = run_level(builtin("ex1"), 16);
    CHECK(diameter.row.err_u <= 2.0 * 1.4633e-1);
    CHECK(diameter.row.err_u >= 0.5 * 1.4633e-1);
}
