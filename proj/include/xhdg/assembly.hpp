#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "xhdg/cut_geometry.hpp"
#include "xhdg/space.hpp"

namespace xhdg {

using VectorField = std::function<Point(const Point&, int side)>;
using TractionField = std::function<Point(const Point&)>;

/// Coefficients and data of one interface (or fictitious-domain) problem.
struct ProblemData {
    std::array<double, 2> nu{1.0, 1.0};
    std::array<double, 2> alpha{0.0, 0.0};
    VectorField force;      ///< f, evaluated with the side of the piece; empty means zero
    VectorField dirichlet;  ///< g_D, evaluated with the side of the face piece; empty means zero
    TractionField traction; ///< interface traction at a point of the interface; empty means zero
    /// Chords lie on the interface, so chord data is evaluated exactly instead of
    /// interpolated between chord endpoints.
    bool straight_interface = false;

    void check() const;
};

/// Length used for h_K in the stabilization nu_i / h_K.
enum class TauLength {
    Diameter,    ///< cell diameter (largest vertex distance)
    ShortestEdge ///< shortest cell edge; the grid step on the structured meshes
};

struct AssemblyOptions {
    int degree = 4;      ///< bilinear forms
    int load_degree = 4; ///< (f, v), traction and boundary data
    TauLength tau_length = TauLength::Diameter;
    /// Fictitious-domain mode: shift the interpolated boundary data on the chords by a
    /// constant normal component so that its net outflow vanishes.
    bool compatible_boundary_data = true;
};

/// nu_i / h_K for the piece of cell `cell` on `side`.
double stabilization_tau(const Mesh& mesh, const ProblemData& data, int cell, int side,
                         TauLength length = TauLength::Diameter);

/// Interface or boundary data along a chord: the field itself on straight interfaces, its
/// linear interpolant between the chord endpoints otherwise.
std::function<Point(const Point&)> chord_data(const std::function<Point(const Point&)>& g, const Chord& chord,
                                              bool straight);

/// Dense local equations of one cell.
///
/// Local ordering: per active piece 10 interior unknowns (L row-major, then u component-major),
/// then one pressure per piece, then the trace unknowns met on the cell boundary. `dofs`
/// lists the global condensed index of every non-interior entry in that order.
struct LocalSystem {
    int cell = -1;
    std::vector<int> pieces;
    std::vector<double> areas;
    std::vector<int> dofs;
    Eigen::MatrixXd K;
    Eigen::VectorXd F;

    int num_pieces() const { return static_cast<int>(pieces.size()); }
    int interior_size() const { return 10 * num_pieces(); }
    int exterior_size() const { return static_cast<int>(dofs.size()); }
    int size() const { return interior_size() + exterior_size(); }

    int L_index(int lp, int a, int b) const { return 10 * lp + 2 * a + b; }
    int u_index(int lp, int comp, int j) const { return 10 * lp + 4 + 3 * comp + j; }
    int p_index(int lp) const { return interior_size() + lp; }
    int trace_index(int t) const { return interior_size() + num_pieces() + t; }
    int num_traces() const { return exterior_size() - num_pieces(); }

    /// Rows/columns of L and u of piece lp.
    Eigen::MatrixXd A_LL(int lp) const { return K.block(10 * lp, 10 * lp, 4, 4); }
    Eigen::MatrixXd A_uu(int lp) const { return K.block(10 * lp + 4, 10 * lp + 4, 6, 6); }
    Eigen::MatrixXd A_Lu(int lp) const { return K.block(10 * lp, 10 * lp + 4, 4, 6); }
    Eigen::VectorXd b_u(int lp) const { return F.segment(10 * lp + 4, 6); }
};

/// Local matrix and load of one cell. The cell must carry at least one active piece.
LocalSystem assemble_local(const CutMesh& cut, const DofMap& dofs, const ProblemData& data, int cell,
                           const AssemblyOptions& opts = {});

/// Load vector only, ordered like assemble_local's system.
Eigen::VectorXd assemble_rhs(const CutMesh& cut, const DofMap& dofs, const ProblemData& data, int cell,
                             const AssemblyOptions& opts = {});

/// Fictitious-domain variant; `cut` must be built in curved mode.
LocalSystem assemble_local_curved(const CutMesh& cut, const DofMap& dofs, const ProblemData& data, int cell,
                                  const AssemblyOptions& opts = {});

/// Local systems of every cell with active pieces, in cell order.
std::vector<LocalSystem> assemble_all(const CutMesh& cut, const DofMap& dofs, const ProblemData& data,
                                      const AssemblyOptions& opts = {});

/// Prescribed values of the essential entries (zero elsewhere), size condensed_size().
Eigen::VectorXd essential_values(const CutMesh& cut, const DofMap& dofs, const ProblemData& data,
                                 const AssemblyOptions& opts = {});

/// Worker count from XHDG_THREADS, defaulting to the hardware concurrency.
int worker_threads();

/// Runs body(i) for i in [0, n) on worker_threads() threads.
void parallel_for(int n, const std::function<void(int)>& body);

} // namespace xhdg
