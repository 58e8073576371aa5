#include "xhdg/assembly.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include <Eigen/Dense>

#include "xhdg/error.hpp"

namespace xhdg {

void ProblemData::check() const
{
    for (int i = 0; i < 2; ++i) {
        if (!(nu[i] > 0.0))
            throw InvalidArgument("viscosity nu" + std::to_string(i + 1) + " must be positive");
        if (!(alpha[i] >= 0.0))
            throw InvalidArgument("alpha" + std::to_string(i + 1) + " must be non-negative");
    }
}

double stabilization_tau(const Mesh& mesh, const ProblemData& data, int cell, int side, TauLength length)
{
    if (length == TauLength::Diameter)
        return data.nu[side] / mesh.cell_diameter(cell);
    const auto v = mesh.cell(cell);
    double edge = std::numeric_limits<double>::infinity();
    for (size_t e = 0; e < v.size(); ++e)
        edge = std::min(edge, (mesh.vertex(v[(e + 1) % v.size()]) - mesh.vertex(v[e])).norm());
    return data.nu[side] / edge;
}

std::function<Point(const Point&)> chord_data(const std::function<Point(const Point&)>& g, const Chord& chord,
                                              bool straight)
{
    if (!g)
        return [](const Point&) { return Point(Point::Zero()); };
    if (straight)
        return g;
    const Point ga = g(chord.a), gb = g(chord.b);
    const Point a = chord.a, t = chord.b - chord.a;
    const double t2 = t.squaredNorm();
    return [=](const Point& x) {
        const double s = std::clamp((x - a).dot(t) / t2, 0.0, 1.0);
        return Point((1.0 - s) * ga + s * gb);
    };
}

namespace {

struct TraceRef {
    std::array<std::array<int, 2>, 2> dof{}; ///< [comp][basis] global index
    int nb = 1;
    SegmentBasis basis;
};

TraceRef trace_of(const CutMesh& cut, const DofMap& dofs, const PieceSegment& seg)
{
    TraceRef r;
    if (seg.chord) {
        const Chord& c = cut.chord(seg.index);
        r.nb = dofs.trace_degree() + 1;
        r.basis = SegmentBasis(c.a, c.b, dofs.trace_degree());
        for (int a = 0; a < 2; ++a)
            for (int k = 0; k < r.nb; ++k)
                r.dof[a][k] = dofs.utilde(seg.index, a, k);
    } else {
        r.nb = 1;
        r.basis = SegmentBasis(seg.a, seg.b, 0);
        for (int a = 0; a < 2; ++a)
            r.dof[a][0] = dofs.uhat(seg.index, a);
    }
    return r;
}

/// Collects the pieces and trace unknowns of a cell in local order.
LocalSystem layout(const CutMesh& cut, const DofMap& dofs, int cell)
{
    LocalSystem ls;
    ls.cell = cell;
    ls.pieces = cut.cell_pieces(cell);
    if (ls.pieces.empty())
        throw InvalidArgument("cell " + std::to_string(cell) + " has no active piece");
    for (int pid : ls.pieces) {
        ls.areas.push_back(cut.piece(pid).area);
        ls.dofs.push_back(dofs.p(pid));
    }
    for (int pid : ls.pieces)
        for (const auto& seg : cut.piece(pid).boundary) {
            const TraceRef tr = trace_of(cut, dofs, seg);
            for (int a = 0; a < 2; ++a)
                for (int k = 0; k < tr.nb; ++k)
                    if (std::find(ls.dofs.begin(), ls.dofs.end(), tr.dof[a][k]) == ls.dofs.end())
                        ls.dofs.push_back(tr.dof[a][k]);
        }
    ls.K = Eigen::MatrixXd::Zero(ls.size(), ls.size());
    ls.F = Eigen::VectorXd::Zero(ls.size());
    return ls;
}

int local_of(const LocalSystem& ls, int global)
{
    const auto it = std::find(ls.dofs.begin(), ls.dofs.end(), global);
    return ls.interior_size() + static_cast<int>(it - ls.dofs.begin());
}

void fill_rhs(const CutMesh& cut, const DofMap& dofs, const ProblemData& data, const AssemblyOptions& opts,
              LocalSystem& ls)
{
    const CellBasis basis(cut.mesh(), ls.cell);
    for (int lp = 0; lp < ls.num_pieces(); ++lp) {
        const ElementPiece& piece = cut.piece(ls.pieces[lp]);
        if (data.force) {
            const QuadRule q = piece_quadrature(piece, opts.load_degree);
            for (size_t i = 0; i < q.size(); ++i) {
                const Point f = data.force(q.points[i], piece.side);
                const Eigen::Vector3d phi = basis(q.points[i]);
                for (int c = 0; c < 2; ++c)
                    for (int j = 0; j < 3; ++j)
                        ls.F[ls.u_index(lp, c, j)] += q.weights[i] * f[c] * phi[j];
            }
        }
    }

    // Interface traction, once per chord.
    const int ch = cut.cell_chord(ls.cell);
    if (ch < 0 || cut.curved() || !data.traction)
        return;
    const Chord& chord = cut.chord(ch);
    const auto g = chord_data(data.traction, chord, data.straight_interface);
    const SegmentBasis sb(chord.a, chord.b, dofs.trace_degree());
    const QuadRule q = segment_rule(chord.a, chord.b, opts.load_degree);
    for (size_t i = 0; i < q.size(); ++i) {
        const Point gv = g(q.points[i]);
        const Eigen::Vector2d psi = sb(q.points[i]);
        for (int a = 0; a < 2; ++a)
            for (int k = 0; k < sb.size(); ++k)
                ls.F[local_of(ls, dofs.utilde(ch, a, k))] += q.weights[i] * gv[a] * psi[k];
    }
}

} // namespace

LocalSystem assemble_local(const CutMesh& cut, const DofMap& dofs, const ProblemData& data, int cell,
                           const AssemblyOptions& opts)
{
    LocalSystem ls = layout(cut, dofs, cell);
    const Mesh& mesh = cut.mesh();
    const CellBasis basis(mesh, cell);
    Eigen::MatrixXd& K = ls.K;

    for (int lp = 0; lp < ls.num_pieces(); ++lp) {
        const ElementPiece& piece = cut.piece(ls.pieces[lp]);
        const int side = piece.side;
        const double nu = data.nu[side];
        const double tau = stabilization_tau(mesh, data, cell, side, opts.tau_length);
        const int prow = ls.p_index(lp);

        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                K(ls.L_index(lp, a, b), ls.L_index(lp, a, b)) = piece.area / nu;

        if (data.alpha[side] != 0.0) {
            const QuadRule q = piece_quadrature(piece, opts.degree);
            Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
            for (size_t i = 0; i < q.size(); ++i) {
                const Eigen::Vector3d phi = basis(q.points[i]);
                M += q.weights[i] * phi * phi.transpose();
            }
            for (int c = 0; c < 2; ++c)
                K.block(ls.u_index(lp, c, 0), ls.u_index(lp, c, 0), 3, 3) += data.alpha[side] * M;
        }

        for (const auto& seg : piece.boundary) {
            const TraceRef tr = trace_of(cut, dofs, seg);
            const int nb = tr.nb;
            const QuadRule q = segment_rule(seg.a, seg.b, opts.degree);
            Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nb, 3);
            Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nb, nb);
            Eigen::VectorXd psi_int = Eigen::VectorXd::Zero(nb);
            for (size_t i = 0; i < q.size(); ++i) {
                const Eigen::Vector3d phi = basis(q.points[i]);
                const Eigen::VectorXd psi = tr.basis(q.points[i]).head(nb);
                B += q.weights[i] * psi * phi.transpose();
                G += q.weights[i] * psi * psi.transpose();
                psi_int += q.weights[i] * psi;
            }
            const Eigen::MatrixXd GinvB = G.ldlt().solve(B);
            const Eigen::Matrix3d S = tau * B.transpose() * GinvB;
            const Point& n = seg.normal;

            for (int a = 0; a < 2; ++a) {
                std::array<int, 2> lt{};
                for (int t = 0; t < nb; ++t)
                    lt[t] = local_of(ls, tr.dof[a][t]);
                const int u0 = ls.u_index(lp, a, 0);
                K.block(u0, u0, 3, 3) += S;
                for (int t = 0; t < nb; ++t) {
                    for (int b = 0; b < 2; ++b) {
                        K(ls.L_index(lp, a, b), lt[t]) -= n[b] * psi_int[t];
                        K(lt[t], ls.L_index(lp, a, b)) += n[b] * psi_int[t];
                    }
                    K(prow, lt[t]) += n[a] * psi_int[t];
                    K(lt[t], prow) -= n[a] * psi_int[t];
                    for (int j = 0; j < 3; ++j) {
                        K(u0 + j, lt[t]) -= tau * B(t, j);
                        K(lt[t], u0 + j) -= tau * B(t, j);
                    }
                    for (int s = 0; s < nb; ++s)
                        K(lt[t], lt[s]) += tau * G(t, s);
                }
            }
        }
    }
    fill_rhs(cut, dofs, data, opts, ls);
    return ls;
}

Eigen::VectorXd assemble_rhs(const CutMesh& cut, const DofMap& dofs, const ProblemData& data, int cell,
                             const AssemblyOptions& opts)
{
    LocalSystem ls = layout(cut, dofs, cell);
    fill_rhs(cut, dofs, data, opts, ls);
    return ls.F;
}

LocalSystem assemble_local_curved(const CutMesh& cut, const DofMap& dofs, const ProblemData& data, int cell,
                                  const AssemblyOptions& opts)
{
    if (!cut.curved())
        throw InvalidArgument("assemble_local_curved: cut mesh is not in fictitious-domain mode");
    return assemble_local(cut, dofs, data, cell, opts);
}

std::vector<LocalSystem> assemble_all(const CutMesh& cut, const DofMap& dofs, const ProblemData& data,
                                      const AssemblyOptions& opts)
{
    data.check();
    std::vector<int> cells;
    for (int k = 0; k < cut.mesh().num_cells(); ++k)
        if (!cut.cell_pieces(k).empty())
            cells.push_back(k);
    std::vector<LocalSystem> out(cells.size());
    parallel_for(static_cast<int>(cells.size()),
                 [&](int i) { out[i] = assemble_local(cut, dofs, data, cells[i], opts); });
    return out;
}

Eigen::VectorXd essential_values(const CutMesh& cut, const DofMap& dofs, const ProblemData& data,
                                 const AssemblyOptions& opts)
{
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dofs.condensed_size());
    if (!data.dirichlet)
        return v;
    for (int f = 0; f < cut.num_face_pieces(); ++f) {
        const FacePiece& fp = cut.face_piece(f);
        if (!fp.boundary)
            continue;
        for (int a = 0; a < 2; ++a) {
            const auto g = [&](const Point& x) { return data.dirichlet(x, fp.side)[a]; };
            v[dofs.uhat(f, a)] = project_Qrb_face(g, fp.a, fp.b, 0, opts.load_degree)[0];
        }
    }
    if (cut.curved()) {
        const int side = cut.active_side();
        const std::function<Point(const Point&)> gd = [&](const Point& x) { return data.dirichlet(x, side); };
        // Outward normal of the physical domain on a chord.
        const auto outward = [&](const Chord& chord) { return side == Side1 ? chord.n1 : Point(-chord.n1); };
        std::vector<std::function<Point(const Point&)>> gh(cut.num_chords());
        double defect = 0.0, perimeter = 0.0;
        for (int c = 0; c < cut.num_chords(); ++c) {
            const Chord& chord = cut.chord(c);
            gh[c] = chord_data(gd, chord, data.straight_interface);
            const QuadRule q = segment_rule(chord.a, chord.b, opts.load_degree);
            for (size_t i = 0; i < q.size(); ++i)
                defect += q.weights[i] * gh[c](q.points[i]).dot(outward(chord));
            perimeter += chord.length;
        }
        for (int f = 0; f < cut.num_face_pieces(); ++f) {
            const FacePiece& fp = cut.face_piece(f);
            if (fp.boundary)
                defect += fp.length * Point(v[dofs.uhat(f, 0)], v[dofs.uhat(f, 1)]).dot(fp.normal);
        }
        // Interpolated chord data leaves an O(h^2) net outflow; a constant normal shift
        // spread over the chords restores discrete compatibility.
        const double shift = opts.compatible_boundary_data && perimeter > 0.0 ? defect / perimeter : 0.0;
        for (int c = 0; c < cut.num_chords(); ++c) {
            const Chord& chord = cut.chord(c);
            const Point dn = shift * outward(chord);
            for (int a = 0; a < 2; ++a) {
                const auto g = [&](const Point& x) { return gh[c](x)[a] - dn[a]; };
                const Eigen::VectorXd coef =
                    project_Qrb_face(g, chord.a, chord.b, dofs.trace_degree(), opts.load_degree);
                for (int k = 0; k <= dofs.trace_degree(); ++k)
                    v[dofs.utilde(c, a, k)] = coef[k];
            }
        }
    }
    return v;
}

int worker_threads()
{
    if (const char* env = std::getenv("XHDG_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, const std::function<void(int)>& body)
{
    const int nt = std::min(worker_threads(), std::max(n, 1));
    if (nt <= 1) {
        for (int i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mtx;
    std::vector<std::jthread> pool;
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mtx);
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    pool.clear();
    if (error)
        std::rethrow_exception(error);
}

} // namespace xhdg
