#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "xhdg/postprocess.hpp"
#include "xhdg/problems.hpp"
#include "xhdg/solver.hpp"

namespace xhdg {

struct StudyOptions {
    CellType cell_type = CellType::Triangle;
    int m = 0;
    AssemblyOptions assembly;
    int error_degree = 8;
    GeometryOptions geometry;
    GlobalSolver solver = GlobalSolver::Block;
    /// Record wall-clock time in ErrorRow::seconds; off gives reproducible tables.
    bool timing = true;
};

/// Everything produced by one solve. The mesh and cut mesh live on the heap so the
/// result can be moved freely.
struct LevelResult {
    std::unique_ptr<Mesh> mesh;
    std::unique_ptr<CutMesh> cut;
    std::optional<Solution> solution;
    ErrorRow row;
    double max_piece_flux = 0.0;
    double multiplier = 0.0;
    double residual = 0.0;
};

/// Builds the n x n mesh, cuts it, assembles, condenses, solves and measures errors.
LevelResult run_level(const ProblemSpec& spec, int n, const StudyOptions& opts = {});

/// run_level over `levels` followed by convergence_orders.
ConvergenceTable run_convergence(const ProblemSpec& spec, const std::vector<int>& levels,
                                 const StudyOptions& opts = {}, std::vector<LevelResult>* details = nullptr);

/// Legacy VTK (ASCII POLYDATA) of the discrete velocity and pressure, one polygon per
/// element piece with the velocity sampled at the polygon vertices.
void write_solution_vtk(const CutMesh& cut, const Solution& sol, std::ostream& os);

} // namespace xhdg
