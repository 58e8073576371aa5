#include "xhdg/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace xhdg {

LevelResult run_level(const ProblemSpec& spec, int n, const StudyOptions& opts)
{
    const auto start = std::chrono::steady_clock::now();
    LevelResult r;
    r.mesh = std::make_unique<Mesh>(build_structured(spec.domain, n, opts.cell_type));
    CutMeshOptions copts;
    copts.geometry = opts.geometry;
    copts.curved = spec.curved;
    copts.active_side = Side2;
    r.cut = std::make_unique<CutMesh>(*r.mesh, spec.levelset, copts);

    const DofMap dofs(*r.cut, opts.m);
    const ProblemData data = spec.data();
    const auto locals = assemble_all(*r.cut, dofs, data, opts.assembly);
    const Eigen::VectorXd ess = essential_values(*r.cut, dofs, data, opts.assembly);
    const CondensedSystem sys = condense(locals, dofs, ess);
    r.solution.emplace(solve(sys, dofs, opts.solver));

    r.row = compute_errors(*r.solution, *r.cut, spec, opts.error_degree, opts.assembly.tau_length);
    r.row.n = n;
    for (double f : piece_fluxes(*r.solution, *r.cut))
        r.max_piece_flux = std::max(r.max_piece_flux, std::abs(f));
    r.multiplier = r.solution->multiplier();
    r.residual = r.solution->relative_residual;
    if (opts.timing)
        r.row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

ConvergenceTable run_convergence(const ProblemSpec& spec, const std::vector<int>& levels, const StudyOptions& opts,
                                 std::vector<LevelResult>* details)
{
    std::vector<ErrorRow> rows;
    for (int n : levels) {
        LevelResult r = run_level(spec, n, opts);
        rows.push_back(r.row);
        if (details) {
            details->push_back(std::move(r));
        }
    }
    return convergence_orders(std::move(rows));
}

} // namespace xhdg
