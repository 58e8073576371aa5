#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "xhdg/assembly.hpp"
#include "xhdg/space.hpp"

namespace xhdg {

/// Interior unknowns of one cell as an affine function of its exterior unknowns:
/// x_I = offset - recovery * x_E.
struct CellRecovery {
    int cell = -1;
    std::vector<int> pieces;
    std::vector<int> dofs; ///< global condensed indices of the exterior entries
    Eigen::MatrixXd recovery;
    Eigen::VectorXd offset;
};

/// Global system over [p | uhat | utilde | multiplier] after eliminating L and u.
/// Essential rows are identities carrying their prescribed values.
struct CondensedSystem {
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
    std::vector<CellRecovery> cells;
};

/// Coefficients of every discrete field.
class Solution {
public:
    Solution(const DofMap& dofs, Eigen::VectorXd condensed, Eigen::VectorXd interior)
        : dofs_(dofs), condensed_(std::move(condensed)), interior_(std::move(interior)) {}

    const DofMap& dofs() const { return dofs_; }
    const Eigen::VectorXd& condensed() const { return condensed_; }
    const Eigen::VectorXd& interior() const { return interior_; }

    Eigen::Matrix2d L(int piece) const;
    /// Row c holds the cell-basis coefficients of velocity component c.
    Eigen::Matrix<double, 2, 3> u(int piece) const;
    double p(int piece) const { return condensed_[dofs_.p(piece)]; }
    Eigen::Vector2d uhat(int face_piece) const;
    /// Row c holds the chord-basis coefficients of component c.
    Eigen::MatrixXd utilde(int chord) const;
    double multiplier() const { return condensed_[dofs_.multiplier()]; }

    double relative_residual = 0.0;

private:
    DofMap dofs_;
    Eigen::VectorXd condensed_;
    Eigen::VectorXd interior_;
};

/// Static condensation of the local systems plus the mean-zero pressure constraint.
/// Throws SingularLocalVelocityBlock when a local interior block is not positive definite.
CondensedSystem condense(std::span<const LocalSystem> locals, const DofMap& dofs, const Eigen::VectorXd& essential);

enum class GlobalSolver {
    Block,   ///< condensed_solve
    DirectLU ///< sparse_direct_solve on the whole condensed matrix
};

/// Global solve followed by reconstruction of L and u.
Solution solve(const CondensedSystem& system, const DofMap& dofs, GlobalSolver method = GlobalSolver::Block);

/// Solves the same equations with every unknown kept; reference for condense + solve.
Solution monolithic_solve(std::span<const LocalSystem> locals, const DofMap& dofs, const Eigen::VectorXd& essential);

/// LU solve of a square sparse system; throws SolverFailure on a singular factorization or
/// when the relative residual exceeds `tolerance`. Returns the achieved residual in `residual`.
Eigen::VectorXd sparse_direct_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                                    double& residual, double tolerance = 1e-10);

/// Solve of a condensed system laid out as [p | traces | mean multiplier]. Uses a Cholesky
/// factorization of the trace block with conjugate gradients on the pressure Schur
/// complement, and falls back to sparse_direct_solve when the block structure does not hold
/// or the residual target is missed.
Eigen::VectorXd condensed_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b, int num_pressure,
                                double& residual, double tolerance = 1e-10);

} // namespace xhdg
