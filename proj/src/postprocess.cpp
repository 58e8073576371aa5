#include "xhdg/postprocess.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <Eigen/Dense>

namespace xhdg {

using Eigen::Matrix2d;

Point eval_velocity(const Solution& sol, const CutMesh& cut, int piece, const Point& x)
{
    const CellBasis basis(cut.mesh(), cut.piece(piece).cell);
    return sol.u(piece) * basis(x);
}

Matrix2d eval_gradient(const Solution& sol, const CutMesh& cut, int piece)
{
    const double h = cut.mesh().cell_diameter(cut.piece(piece).cell);
    const Eigen::Matrix<double, 2, 3> c = sol.u(piece);
    Matrix2d g;
    g << c(0, 1), c(0, 2), c(1, 1), c(1, 2);
    return g / h;
}

double EnergyTerms::value() const { return std::sqrt(squared()); }

double EnergyBalance::relative_residual() const
{
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
}

namespace {

double ratio(double err2, double ref2)
{
    return ref2 < 1e-28 ? std::sqrt(err2) : std::sqrt(err2 / ref2);
}

/// Exact velocity seen by the trace unknowns of a chord.
Point chord_exact(const ProblemSpec& spec, const CutMesh& cut, const Point& x)
{
    if (cut.curved())
        return spec.exact.u(x, cut.active_side());
    return 0.5 * (spec.exact.u(x, Side1) + spec.exact.u(x, Side2));
}

} // namespace

ErrorRow compute_errors(const Solution& sol, const CutMesh& cut, const ProblemSpec& spec, int degree,
                        TauLength tau_length)
{
    const int np = cut.num_pieces();
    // Pass 1: pressure means.
    std::vector<double> pint(np), parea(np);
    parallel_for(np, [&](int i) {
        const ElementPiece& piece = cut.piece(i);
        const QuadRule q = piece_quadrature(piece, degree);
        double s = 0.0;
        for (size_t j = 0; j < q.size(); ++j)
            s += q.weights[j] * spec.exact.p(q.points[j], piece.side);
        pint[i] = s;
        parea[i] = piece.area;
    });
    double pi_sum = 0.0, ph_sum = 0.0, area = 0.0;
    for (int i = 0; i < np; ++i) {
        pi_sum += pint[i];
        ph_sum += parea[i] * sol.p(i);
        area += parea[i];
    }
    const double pmean = pi_sum / area, phmean = ph_sum / area;

    // Pass 2: squared errors and norms, reduced in piece order.
    std::vector<std::array<double, 9>> acc(np);
    parallel_for(np, [&](int i) {
        const ElementPiece& piece = cut.piece(i);
        const int side = piece.side;
        const double nu = spec.nu[side];
        const QuadRule q = piece_quadrature(piece, degree);
        const Matrix2d Lh = sol.L(i);
        const Matrix2d Gh = eval_gradient(sol, cut, i);
        const double ph = sol.p(i) - phmean;
        std::array<double, 9> a{};
        for (size_t j = 0; j < q.size(); ++j) {
            const Point& x = q.points[j];
            const double w = q.weights[j];
            const Point u = spec.exact.u(x, side);
            const Matrix2d G = spec.exact.grad_u(x, side);
            const double p = spec.exact.p(x, side) - pmean;
            a[0] += w * (u - eval_velocity(sol, cut, i, x)).squaredNorm();
            a[1] += w * u.squaredNorm();
            a[2] += w * (nu * G - Lh).squaredNorm();
            a[3] += w * (nu * G).squaredNorm();
            a[4] += w * (G - Gh).squaredNorm();
            a[5] += w * G.squaredNorm();
            a[6] += w * (p - ph) * (p - ph);
            a[7] += w * p * p;
        }
        a[8] = piece.area * (Lh - nu * Gh).squaredNorm();
        acc[i] = a;
    });
    std::array<double, 9> s{};
    for (const auto& a : acc)
        for (int k = 0; k < 9; ++k)
            s[k] += a[k];

    ErrorRow row;
    row.n = 0;
    row.err_u = ratio(s[0], s[1]);
    row.err_L = ratio(s[2], s[3]);
    row.err_gradu = ratio(s[4], s[5]);
    row.err_p = ratio(s[6], s[7]);
    row.consistency_slack = ratio(s[8], s[3]);
    row.energy = energy_seminorm(sol, cut, spec, degree, tau_length).value();
    row.dofs = sol.dofs().condensed_size();
    return row;
}

EnergyTerms energy_seminorm(const Solution& sol, const CutMesh& cut, const ProblemSpec& spec, int degree,
                            TauLength tau_length)
{
    const int np = cut.num_pieces();
    const int m = sol.dofs().trace_degree();
    const ProblemData data = spec.data();
    std::vector<EnergyTerms> acc(np);
    parallel_for(np, [&](int i) {
        const ElementPiece& piece = cut.piece(i);
        const int side = piece.side;
        const double nu = spec.nu[side];
        const double tau = stabilization_tau(cut.mesh(), data, piece.cell, side, tau_length);
        const CellBasis basis(cut.mesh(), piece.cell);
        EnergyTerms t;

        // Q1 u per component and Q0 L.
        Eigen::Matrix<double, 2, 3> q1u;
        for (int c = 0; c < 2; ++c)
            q1u.row(c) = project_Qr_cell([&](const Point& x) { return spec.exact.u(x, side)[c]; }, piece.polygon,
                                         basis, 1, degree)
                             .transpose();
        const QuadRule q = piece_quadrature(piece, degree);
        Matrix2d Lavg = Matrix2d::Zero();
        for (size_t j = 0; j < q.size(); ++j)
            Lavg += q.weights[j] * nu * spec.exact.grad_u(q.points[j], side);
        Lavg /= piece.area;
        t.flux = piece.area * (sol.L(i) - Lavg).squaredNorm() / nu;

        const Eigen::Matrix<double, 2, 3> du = sol.u(i) - q1u;
        if (spec.alpha[side] != 0.0)
            for (size_t j = 0; j < q.size(); ++j)
                t.reaction += spec.alpha[side] * q.weights[j] * (du * basis(q.points[j])).squaredNorm();

        for (const auto& seg : piece.boundary) {
            if (!seg.chord) {
                const QuadRule qs = segment_rule(seg.a, seg.b, degree);
                Point mean_du = Point::Zero(), mean_u = Point::Zero();
                for (size_t j = 0; j < qs.size(); ++j) {
                    mean_du += qs.weights[j] * (du * basis(qs.points[j]));
                    mean_u += qs.weights[j] * spec.exact.u(qs.points[j], side);
                }
                mean_du /= seg.length;
                mean_u /= seg.length;
                const Point e = mean_du - (sol.uhat(seg.index) - mean_u);
                t.skeleton += tau * seg.length * e.squaredNorm();
            } else {
                const Chord& ch = cut.chord(seg.index);
                const Eigen::MatrixXd ut = sol.utilde(seg.index);
                const SegmentBasis sb(ch.a, ch.b, m);
                const QuadRule qs = segment_rule(ch.a, ch.b, degree);
                Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m + 1, m + 1);
                for (size_t j = 0; j < qs.size(); ++j) {
                    const Eigen::VectorXd psi = sb(qs.points[j]).head(m + 1);
                    G += qs.weights[j] * psi * psi.transpose();
                }
                for (int c = 0; c < 2; ++c) {
                    const Eigen::VectorXd a = project_Qrb_face(
                        [&](const Point& x) { return (du * basis(x))[c]; }, ch.a, ch.b, m, degree);
                    const Eigen::VectorXd b = project_Qrb_face(
                        [&](const Point& x) { return chord_exact(spec, cut, x)[c]; }, ch.a, ch.b, m, degree);
                    const Eigen::VectorXd d = a - (ut.row(c).transpose() - b);
                    t.interface += tau * d.dot(G * d);
                }
            }
        }
        acc[i] = t;
    });
    EnergyTerms total;
    for (const auto& t : acc) {
        total.flux += t.flux;
        total.reaction += t.reaction;
        total.skeleton += t.skeleton;
        total.interface += t.interface;
    }
    return total;
}

EnergyBalance energy_identity(const Solution& sol, const CutMesh& cut, const ProblemData& data,
                              const AssemblyOptions& opts)
{
    const int m = sol.dofs().trace_degree();
    EnergyBalance bal;
    for (int i = 0; i < cut.num_pieces(); ++i) {
        const ElementPiece& piece = cut.piece(i);
        const int side = piece.side;
        const double nu = data.nu[side];
        const double tau = stabilization_tau(cut.mesh(), data, piece.cell, side, opts.tau_length);
        const CellBasis basis(cut.mesh(), piece.cell);
        const Eigen::Matrix<double, 2, 3> uc = sol.u(i);
        bal.lhs += piece.area * sol.L(i).squaredNorm() / nu;

        const QuadRule qa = piece_quadrature(piece, opts.degree);
        for (size_t j = 0; j < qa.size(); ++j)
            bal.lhs += data.alpha[side] * qa.weights[j] * (uc * basis(qa.points[j])).squaredNorm();
        if (data.force) {
            const QuadRule ql = piece_quadrature(piece, opts.load_degree);
            for (size_t j = 0; j < ql.size(); ++j)
                bal.rhs += ql.weights[j] * data.force(ql.points[j], side).dot(uc * basis(ql.points[j]));
        }

        for (const auto& seg : piece.boundary) {
            if (!seg.chord) {
                const Point mean = uc * basis(0.5 * (seg.a + seg.b)); // exact for P1
                bal.lhs += tau * seg.length * (mean - sol.uhat(seg.index)).squaredNorm();
            } else {
                const Chord& ch = cut.chord(seg.index);
                const SegmentBasis sb(ch.a, ch.b, m);
                const QuadRule qs = segment_rule(ch.a, ch.b, opts.degree);
                const Eigen::MatrixXd ut = sol.utilde(seg.index);
                for (int c = 0; c < 2; ++c) {
                    const Eigen::VectorXd pu = project_Qrb_face(
                        [&](const Point& x) { return (uc * basis(x))[c]; }, ch.a, ch.b, m, opts.degree);
                    for (size_t j = 0; j < qs.size(); ++j) {
                        const Eigen::VectorXd psi = sb(qs.points[j]).head(m + 1);
                        const double e = psi.dot(pu - ut.row(c).transpose());
                        bal.lhs += tau * qs.weights[j] * e * e;
                    }
                }
            }
        }
    }
    if (!cut.curved() && data.traction) {
        for (int c = 0; c < cut.num_chords(); ++c) {
            const Chord& ch = cut.chord(c);
            const auto g = chord_data(data.traction, ch, data.straight_interface);
            const SegmentBasis sb(ch.a, ch.b, m);
            const QuadRule qs = segment_rule(ch.a, ch.b, opts.load_degree);
            const Eigen::MatrixXd ut = sol.utilde(c);
            for (size_t j = 0; j < qs.size(); ++j) {
                const Eigen::VectorXd psi = sb(qs.points[j]).head(m + 1);
                const Eigen::Vector2d uval = ut * psi;
                bal.rhs += qs.weights[j] * g(qs.points[j]).dot(uval);
            }
        }
    }
    return bal;
}

std::vector<double> piece_fluxes(const Solution& sol, const CutMesh& cut)
{
    std::vector<double> flux(cut.num_pieces(), 0.0);
    for (int i = 0; i < cut.num_pieces(); ++i)
        for (const auto& seg : cut.piece(i).boundary) {
            // Higher chord modes integrate to zero over the chord.
            const Point trace = seg.chord ? Point(sol.utilde(seg.index).col(0)) : Point(sol.uhat(seg.index));
            flux[i] += seg.length * trace.dot(seg.normal);
        }
    return flux;
}

ConvergenceTable convergence_orders(std::vector<ErrorRow> rows)
{
    ConvergenceTable t;
    t.rows = std::move(rows);
    t.orders.assign(t.rows.size(), std::nullopt);
    bool halving = t.rows.size() >= 2;
    for (size_t i = 1; i < t.rows.size(); ++i)
        halving = halving && t.rows[i].n == 2 * t.rows[i - 1].n;
    if (!halving) {
        t.note = t.rows.size() < 2 ? "fewer than two levels; orders omitted"
                                   : "levels do not double; orders omitted";
        return t;
    }
    auto order = [](double coarse, double fine) {
        if (coarse == fine)
            return 0.0;
        return std::log2(coarse / fine);
    };
    for (size_t i = 1; i < t.rows.size(); ++i) {
        const ErrorRow& a = t.rows[i - 1];
        const ErrorRow& b = t.rows[i];
        t.orders[i] = std::array<double, 4>{order(a.err_u, b.err_u), order(a.err_L, b.err_L),
                                            order(a.err_gradu, b.err_gradu), order(a.err_p, b.err_p)};
    }
    return t;
}

namespace {

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

} // namespace

void write_csv(const ConvergenceTable& t, std::ostream& os)
{
    os << "n,err_u,ord_u,err_L,ord_L,err_gradu,ord_gradu,err_p,ord_p,energy,dofs,seconds\n";
    for (size_t i = 0; i < t.rows.size(); ++i) {
        const ErrorRow& r = t.rows[i];
        const auto& o = t.orders[i];
        const std::array<double, 4> e{r.err_u, r.err_L, r.err_gradu, r.err_p};
        os << r.n;
        for (int c = 0; c < 4; ++c)
            os << ',' << fmt("%.6e", e[c]) << ',' << (o ? fmt("%.4f", (*o)[c]) : std::string());
        os << ',' << fmt("%.6e", r.energy) << ',' << r.dofs << ',' << fmt("%.3f", r.seconds) << '\n';
    }
}

void write_markdown(const ConvergenceTable& t, std::ostream& os, const std::string& title)
{
    if (!title.empty())
        os << "### " << title << "\n\n";
    os << "| mesh | u error | order | L error | order | grad u error | order | p error | order |\n";
    os << "|---|---|---|---|---|---|---|---|---|\n";
    for (size_t i = 0; i < t.rows.size(); ++i) {
        const ErrorRow& r = t.rows[i];
        const auto& o = t.orders[i];
        const std::array<double, 4> e{r.err_u, r.err_L, r.err_gradu, r.err_p};
        os << "| " << r.n << "x" << r.n;
        for (int c = 0; c < 4; ++c)
            os << " | " << fmt("%.4E", e[c]) << " | " << (o ? fmt("%.2f", (*o)[c]) : std::string("--"));
        os << " |\n";
    }
    if (!t.note.empty())
        os << "\n" << t.note << "\n";
}

} // namespace xhdg
