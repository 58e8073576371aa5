#include "xhdg/solver.hpp"

#include <cmath>
#include <memory>
#include <optional>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <Eigen/SparseCholesky>

#include "xhdg/error.hpp"

namespace xhdg {

Eigen::Matrix2d Solution::L(int piece) const
{
    const int o = dofs_.L(piece, 0, 0) - dofs_.condensed_size();
    Eigen::Matrix2d m;
    m << interior_[o], interior_[o + 1], interior_[o + 2], interior_[o + 3];
    return m;
}

Eigen::Matrix<double, 2, 3> Solution::u(int piece) const
{
    const int o = dofs_.u(piece, 0, 0) - dofs_.condensed_size();
    Eigen::Matrix<double, 2, 3> m;
    for (int c = 0; c < 2; ++c)
        for (int j = 0; j < 3; ++j)
            m(c, j) = interior_[o + 3 * c + j];
    return m;
}

Eigen::Vector2d Solution::uhat(int face_piece) const
{
    return {condensed_[dofs_.uhat(face_piece, 0)], condensed_[dofs_.uhat(face_piece, 1)]};
}

Eigen::MatrixXd Solution::utilde(int chord) const
{
    const int nb = dofs_.trace_degree() + 1;
    Eigen::MatrixXd m(2, nb);
    for (int a = 0; a < 2; ++a)
        for (int k = 0; k < nb; ++k)
            m(a, k) = condensed_[dofs_.utilde(chord, a, k)];
    return m;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

/// Adds a dense block with essential rows dropped and essential columns moved to the load.
void scatter(const Eigen::MatrixXd& A, const Eigen::VectorXd& f, std::span<const int> map, const DofMap& dofs,
             const Eigen::VectorXd& essential, Triplets& trip, Eigen::VectorXd& rhs)
{
    const int n = static_cast<int>(map.size());
    for (int i = 0; i < n; ++i) {
        const int r = map[i];
        if (dofs.essential(r))
            continue;
        rhs[r] += f[i];
        for (int j = 0; j < n; ++j) {
            const double v = A(i, j);
            if (v == 0.0)
                continue;
            const int c = map[j];
            if (dofs.essential(c))
                rhs[r] -= v * essential[c];
            else
                trip.emplace_back(r, c, v);
        }
    }
}

void add_constraints(std::span<const LocalSystem> locals, const DofMap& dofs, const Eigen::VectorXd& essential,
                     Triplets& trip, Eigen::VectorXd& rhs)
{
    const int lam = dofs.multiplier();
    for (const auto& ls : locals)
        for (int lp = 0; lp < ls.num_pieces(); ++lp) {
            const int p = dofs.p(ls.pieces[lp]);
            trip.emplace_back(p, lam, ls.areas[lp]);
            trip.emplace_back(lam, p, ls.areas[lp]);
        }
    for (int r = 0; r < dofs.condensed_size(); ++r)
        if (dofs.essential(r)) {
            trip.emplace_back(r, r, 1.0);
            rhs[r] = essential[r];
        }
}

struct Eliminated {
    Eigen::MatrixXd schur;
    Eigen::VectorXd load;
    CellRecovery rec;
};

Eliminated eliminate(const LocalSystem& ls)
{
    const int ni = ls.interior_size(), ne = ls.exterior_size();
    const Eigen::MatrixXd KII = ls.K.topLeftCorner(ni, ni);
    const Eigen::LLT<Eigen::MatrixXd> llt(KII);
    if (llt.info() != Eigen::Success) {
        std::ostringstream os;
        os << "cell " << ls.cell << ": local (L, u) block is not positive definite";
        throw SingularLocalVelocityBlock(ls.cell, os.str());
    }
    Eliminated e;
    e.rec.cell = ls.cell;
    e.rec.pieces = ls.pieces;
    e.rec.dofs = ls.dofs;
    e.rec.recovery = llt.solve(ls.K.topRightCorner(ni, ne));
    e.rec.offset = llt.solve(ls.F.head(ni));
    e.schur = ls.K.bottomRightCorner(ne, ne) - ls.K.bottomLeftCorner(ne, ni) * e.rec.recovery;
    e.load = ls.F.tail(ne) - ls.K.bottomLeftCorner(ne, ni) * e.rec.offset;
    return e;
}

} // namespace

CondensedSystem condense(std::span<const LocalSystem> locals, const DofMap& dofs, const Eigen::VectorXd& essential)
{
    const int n = dofs.condensed_size();
    std::vector<Eliminated> elim(locals.size());
    parallel_for(static_cast<int>(locals.size()), [&](int i) { elim[i] = eliminate(locals[i]); });

    CondensedSystem sys;
    sys.rhs = Eigen::VectorXd::Zero(n);
    Triplets trip;
    for (auto& e : elim) {
        scatter(e.schur, e.load, e.rec.dofs, dofs, essential, trip, sys.rhs);
        sys.cells.push_back(std::move(e.rec));
    }
    add_constraints(locals, dofs, essential, trip, sys.rhs);
    sys.matrix.resize(n, n);
    sys.matrix.setFromTriplets(trip.begin(), trip.end());
    return sys;
}

namespace {

class LuFactorization {
public:
    explicit LuFactorization(const Eigen::SparseMatrix<double>& A)
    {
        lu_.compute(A);
        if (lu_.info() != Eigen::Success)
            throw SolverFailure("sparse factorization failed (singular system; check the interface resolution "
                                "and the pressure constraint)");
    }
    Eigen::VectorXd solve(const Eigen::VectorXd& b)
    {
        Eigen::VectorXd x = lu_.solve(b);
        if (lu_.info() != Eigen::Success)
            throw SolverFailure("sparse solve failed");
        return x;
    }

private:
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

/// Applies `step` (an approximate inverse) with residual correction until the relative
/// residual stops improving or reaches round-off level.
template <class Step>
Eigen::VectorXd refine(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b, Step&& step, double& residual,
                       double tolerance)
{
    const double bn = b.norm();
    Eigen::VectorXd x = step(b);
    residual = (A * x - b).norm() / bn;
    for (int k = 0; k < 3 && residual > 1e-3 * tolerance; ++k) {
        const Eigen::VectorXd trial = x + step(Eigen::VectorXd(b - A * x));
        const double r = (A * trial - b).norm() / bn;
        if (!(r < residual))
            break;
        x = trial;
        residual = r;
    }
    return x;
}

void check_residual(double residual, double tolerance)
{
    if (!(residual <= tolerance)) {
        std::ostringstream os;
        os << "relative residual " << residual << " exceeds " << tolerance;
        throw SolverFailure(os.str());
    }
}

/// Block solver for the condensed layout [p | traces | multiplier]:
///
///   [ A   -B^T  0 ] [t]   [f]
///   [ B    0    w ] [p] = [g]
///   [ 0    v^T  0 ] [l]   [s]
///
/// A is the symmetric positive definite trace block and constants span the kernel of B^T.
/// The multiplier follows from that kernel, the pressure from projected conjugate gradients
/// on B A^-1 B^T, and the traces from one more Cholesky solve. Direct LU on the whole
/// matrix fills badly because every locally constant pressure makes a leading block singular.
class SaddlePointSolver {
public:
    static std::optional<SaddlePointSolver> create(const Eigen::SparseMatrix<double>& K, int num_pressure)
    {
        const int n = static_cast<int>(K.rows());
        const int np = num_pressure, nt = n - np - 1;
        if (np < 1 || nt < 1)
            return std::nullopt;
        SaddlePointSolver s;
        s.np_ = np;
        s.nt_ = nt;
        s.A_ = K.block(np, np, nt, nt);
        s.B_ = K.block(0, np, np, nt);
        const Eigen::SparseMatrix<double> G = K.block(np, 0, nt, np);
        s.w_ = Eigen::VectorXd(K.block(0, n - 1, np, 1));
        s.v_ = Eigen::VectorXd(Eigen::SparseMatrix<double>(K.block(n - 1, 0, 1, np)).transpose());

        const double scale = s.B_.norm();
        const Eigen::SparseMatrix<double> Bt = s.B_.transpose();
        const Eigen::SparseMatrix<double> At = s.A_.transpose();
        if (scale == 0.0 || K.block(0, 0, np, np).norm() != 0.0 || K.block(np, n - 1, nt, 1).norm() != 0.0 ||
            K.block(n - 1, np, 1, nt + 1).norm() != 0.0 || (G + Bt).norm() > 1e-12 * scale ||
            (At - s.A_).norm() > 1e-12 * s.A_.norm() ||
            (Bt * Eigen::VectorXd::Ones(np)).norm() > 1e-12 * scale * std::sqrt(double(np)) || s.w_.sum() == 0.0 ||
            s.v_.sum() == 0.0)
            return std::nullopt;

        s.llt_ = std::make_shared<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>(s.A_);
        if (s.llt_->info() != Eigen::Success)
            return std::nullopt;
        // Diagonal of B diag(A)^-1 B^T as preconditioner.
        const Eigen::VectorXd dA = s.A_.diagonal();
        s.precond_ = Eigen::VectorXd::Zero(np);
        for (int t = 0; t < nt; ++t)
            for (Eigen::SparseMatrix<double>::InnerIterator it(s.B_, t); it; ++it)
                s.precond_[it.row()] += it.value() * it.value() / dA[t];
        if ((s.precond_.array() <= 0.0).any())
            return std::nullopt;
        return s;
    }

    Eigen::VectorXd operator()(const Eigen::VectorXd& b) const
    {
        const Eigen::VectorXd f = b.segment(np_, nt_);
        const Eigen::VectorXd g = b.head(np_);
        const double s = b[np_ + nt_];
        const Eigen::VectorXd h = g - B_ * llt_->solve(f);
        const double lambda = h.sum() / w_.sum();
        Eigen::VectorXd p = pressure(h - lambda * w_);
        p.array() += (s - v_.dot(p)) / v_.sum();
        Eigen::VectorXd x(b.size());
        x.head(np_) = p;
        x.segment(np_, nt_) = llt_->solve(Eigen::VectorXd(f + B_.transpose() * p));
        x[np_ + nt_] = lambda;
        return x;
    }

private:
    static void project(Eigen::VectorXd& r) { r.array() -= r.mean(); }

    /// Projected preconditioned CG for B A^-1 B^T p = rhs, rhs orthogonal to constants.
    Eigen::VectorXd pressure(Eigen::VectorXd r) const
    {
        project(r);
        Eigen::VectorXd p = Eigen::VectorXd::Zero(np_);
        const double stop = 1e-14 * r.norm();
        if (stop == 0.0)
            return p;
        Eigen::VectorXd z = r.cwiseQuotient(precond_);
        project(z);
        Eigen::VectorXd d = z;
        double rz = r.dot(z);
        for (int it = 0; it < 5000 && r.norm() > stop; ++it) {
            const Eigen::VectorXd q = B_ * llt_->solve(Eigen::VectorXd(B_.transpose() * d));
            const double dq = d.dot(q);
            if (!(dq > 0.0))
                break;
            const double a = rz / dq;
            p += a * d;
            r -= a * q;
            project(r);
            z = r.cwiseQuotient(precond_);
            project(z);
            const double rz_next = r.dot(z);
            d = z + (rz_next / rz) * d;
            rz = rz_next;
        }
        return p;
    }

    int np_ = 0, nt_ = 0;
    Eigen::SparseMatrix<double> A_, B_;
    Eigen::VectorXd w_, v_, precond_;
    std::shared_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> llt_;
};

} // namespace

Eigen::VectorXd sparse_direct_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b, double& residual,
                                    double tolerance)
{
    if (b.norm() == 0.0) {
        residual = 0.0;
        return Eigen::VectorXd::Zero(b.size());
    }
    LuFactorization lu(A);
    Eigen::VectorXd x = refine(A, b, [&](const Eigen::VectorXd& r) { return lu.solve(r); }, residual, tolerance);
    check_residual(residual, tolerance);
    return x;
}

Eigen::VectorXd condensed_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b, int num_pressure,
                                double& residual, double tolerance)
{
    if (b.norm() == 0.0) {
        residual = 0.0;
        return Eigen::VectorXd::Zero(b.size());
    }
    if (const auto block = SaddlePointSolver::create(A, num_pressure)) {
        Eigen::VectorXd x = refine(A, b, *block, residual, tolerance);
        if (residual <= tolerance)
            return x;
    }
    return sparse_direct_solve(A, b, residual, tolerance);
}

Solution solve(const CondensedSystem& system, const DofMap& dofs, GlobalSolver method)
{
    double res = 0.0;
    Eigen::VectorXd x = method == GlobalSolver::Block
                            ? condensed_solve(system.matrix, system.rhs, dofs.num_pieces(), res)
                            : sparse_direct_solve(system.matrix, system.rhs, res);
    Eigen::VectorXd interior = Eigen::VectorXd::Zero(10 * dofs.num_pieces());
    parallel_for(static_cast<int>(system.cells.size()), [&](int i) {
        const CellRecovery& rec = system.cells[i];
        Eigen::VectorXd xe(rec.dofs.size());
        for (size_t j = 0; j < rec.dofs.size(); ++j)
            xe[j] = x[rec.dofs[j]];
        const Eigen::VectorXd xi = rec.offset - rec.recovery * xe;
        for (size_t lp = 0; lp < rec.pieces.size(); ++lp)
            interior.segment(10 * rec.pieces[lp], 10) = xi.segment(10 * lp, 10);
    });
    Solution sol(dofs, std::move(x), std::move(interior));
    sol.relative_residual = res;
    return sol;
}

Solution monolithic_solve(std::span<const LocalSystem> locals, const DofMap& dofs, const Eigen::VectorXd& essential)
{
    const int nc = dofs.condensed_size();
    const int n = dofs.monolithic_size();
    Eigen::VectorXd full_ess = Eigen::VectorXd::Zero(n);
    full_ess.head(nc) = essential;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    Triplets trip;
    for (const auto& ls : locals) {
        std::vector<int> map(ls.size());
        for (int lp = 0; lp < ls.num_pieces(); ++lp)
            for (int k = 0; k < 10; ++k)
                map[10 * lp + k] = nc + 10 * ls.pieces[lp] + k;
        for (int j = 0; j < ls.exterior_size(); ++j)
            map[ls.interior_size() + j] = ls.dofs[j];
        scatter(ls.K, ls.F, map, dofs, full_ess, trip, rhs);
    }
    add_constraints(locals, dofs, essential, trip, rhs);
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    double res = 0.0;
    const Eigen::VectorXd x = sparse_direct_solve(A, rhs, res);
    Solution sol(dofs, x.head(nc), x.tail(n - nc));
    sol.relative_residual = res;
    return sol;
}

} // namespace xhdg
