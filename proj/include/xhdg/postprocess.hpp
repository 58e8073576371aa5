#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "xhdg/cut_geometry.hpp"
#include "xhdg/problems.hpp"
#include "xhdg/solver.hpp"

namespace xhdg {

/// Values of a discrete solution on one element piece.
Point eval_velocity(const Solution& sol, const CutMesh& cut, int piece, const Point& x);
/// Broken gradient of the P1 velocity; (a, b) = d u_a / d x_b.
Eigen::Matrix2d eval_gradient(const Solution& sol, const CutMesh& cut, int piece);

struct EnergyTerms {
    double flux = 0.0;      ///< || nu^{-1/2} (L_h - Q0 L) ||^2
    double reaction = 0.0;  ///< || alpha^{1/2} (u_h - Q1 u) ||^2
    double skeleton = 0.0;  ///< tau-weighted trace mismatch on mesh faces
    double interface = 0.0; ///< tau-weighted trace mismatch on chords, both sides

    double squared() const { return flux + reaction + skeleton + interface; }
    double value() const;
};

/// One level of a convergence study.
struct ErrorRow {
    int n = 0;
    double err_u = 0.0, err_L = 0.0, err_gradu = 0.0, err_p = 0.0;
    double energy = 0.0;
    long dofs = 0;
    double seconds = 0.0;
    /// || L_h - nu grad_h u_h ||, the slack between the L and grad u columns.
    double consistency_slack = 0.0;
};

/// Relative L2 errors against the exact fields. Pressures are compared after removing
/// their means over the discrete domain. Errors are absolute when an exact norm vanishes.
ErrorRow compute_errors(const Solution& sol, const CutMesh& cut, const ProblemSpec& spec, int degree = 8,
                        TauLength tau_length = TauLength::Diameter);

/// Discrete energy seminorm of (L_h - Q0 L, u_h - Q1 u, uhat - Q0b u, utilde - Qmb u).
/// On chords of interface problems the exact trace is the average of both sides.
EnergyTerms energy_seminorm(const Solution& sol, const CutMesh& cut, const ProblemSpec& spec, int degree = 8,
                            TauLength tau_length = TauLength::Diameter);

/// Both sides of the discrete energy identity obtained by testing the scheme with the
/// solution itself; they agree when the Dirichlet data is homogeneous.
struct EnergyBalance {
    double lhs = 0.0, rhs = 0.0;
    double relative_residual() const;
};
EnergyBalance energy_identity(const Solution& sol, const CutMesh& cut, const ProblemData& data,
                              const AssemblyOptions& opts = {});

/// Per-piece sum of the normal trace fluxes; zero for locally conservative solutions.
std::vector<double> piece_fluxes(const Solution& sol, const CutMesh& cut);

struct ConvergenceTable {
    std::vector<ErrorRow> rows;
    /// orders[i][c] between rows i-1 and i for columns u, L, grad u, p; empty for i = 0.
    std::vector<std::optional<std::array<double, 4>>> orders;
    std::string note;
};

/// log2 of successive error ratios. Orders are omitted, with a note, unless every level
/// doubles the previous one.
ConvergenceTable convergence_orders(std::vector<ErrorRow> rows);

void write_csv(const ConvergenceTable& table, std::ostream& os);
void write_markdown(const ConvergenceTable& table, std::ostream& os, const std::string& title = {});

} // namespace xhdg
