#include "xhdg/cut_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "xhdg/error.hpp"

namespace xhdg {

namespace {

double shoelace(const std::vector<Point>& p)
{
    double a = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        const Point& q0 = p[i];
        const Point& q1 = p[(i + 1) % p.size()];
        a += q0.x() * q1.y() - q1.x() * q0.y();
    }
    return 0.5 * a;
}

int side_of(double snapped) { return snapped > 0.0 ? Side1 : Side2; }

std::string describe(const Point& p)
{
    std::ostringstream os;
    os.precision(17);
    os << '(' << p.x() << ", " << p.y() << ')';
    return os.str();
}

} // namespace

double snapped_value(double phi, double h_K, const GeometryOptions& opts)
{
    const double tol = opts.snap_tolerance * h_K;
    return std::abs(phi) < tol ? tol : phi;
}

CellClass classify_element(const Mesh& mesh, const LevelSet& ls, int cell, const GeometryOptions& opts)
{
    const double hk = mesh.cell_diameter(cell);
    bool pos = false, neg = false, all_on = true;
    for (int v : mesh.cell(cell)) {
        const double raw = ls(mesh.vertex(v));
        if (std::abs(raw) >= opts.snap_tolerance * hk)
            all_on = false;
        (snapped_value(raw, hk, opts) > 0.0 ? pos : neg) = true;
    }
    if (all_on)
        throw AssumptionViolation("cell " + std::to_string(cell) +
                                  ": every vertex lies on the interface; refine the mesh");
    if (pos && neg)
        return CellClass::Cut;
    return pos ? CellClass::Pure1 : CellClass::Pure2;
}

Point intersect_edge(const LevelSet& ls, const Point& p0, const Point& p1, double h_K, const GeometryOptions& opts)
{
    const double f0 = snapped_value(ls(p0), h_K, opts);
    const double f1 = snapped_value(ls(p1), h_K, opts);
    if ((f0 > 0.0) == (f1 > 0.0))
        throw InvalidArgument("intersect_edge: no sign change on edge " + describe(p0) + " - " + describe(p1));
    Point pos = f0 > 0.0 ? p0 : p1;
    Point neg = f0 > 0.0 ? p1 : p0;
    const double tol = opts.root_tolerance * h_K;
    Point mid = 0.5 * (pos + neg);
    for (int it = 0; it < opts.max_bisection_steps; ++it) {
        mid = 0.5 * (pos + neg);
        const double v = ls(mid);
        if (std::abs(v) <= tol)
            return mid;
        (v > 0.0 ? pos : neg) = mid;
    }
    if (std::abs(ls(mid)) <= tol)
        return mid;
    throw Error("intersect_edge: bisection did not converge on edge " + describe(p0) + " - " + describe(p1));
}

std::vector<std::array<Point, 3>> PiecePolygon::triangles() const
{
    std::vector<std::array<Point, 3>> t;
    for (size_t i = 1; i + 1 < vertices.size(); ++i)
        t.push_back({vertices[0], vertices[i], vertices[i + 1]});
    return t;
}

const PiecePolygon* CutTopology::piece(int side) const
{
    for (const auto& p : pieces)
        if (p.side == side)
            return &p;
    return nullptr;
}

CutTopology build_cut_topology(const Mesh& mesh, const LevelSet& ls, int cell, const GeometryOptions& opts)
{
    const auto verts = mesh.cell(cell);
    const int nv = static_cast<int>(verts.size());
    const double hk = mesh.cell_diameter(cell);

    // classify_element also rejects the all-vertices-on-interface case.
    const CellClass cls = classify_element(mesh, ls, cell, opts);

    std::vector<int> side(nv);
    for (int i = 0; i < nv; ++i)
        side[i] = side_of(snapped_value(ls(mesh.vertex(verts[i])), hk, opts));

    std::vector<std::optional<Point>> cut(nv);
    int ncut = 0;
    for (int e = 0; e < nv; ++e) {
        int ga = verts[e], gb = verts[(e + 1) % nv];
        // Canonical direction makes both neighbours compute bit-identical roots.
        if (ga > gb)
            std::swap(ga, gb);
        const Point& pa = mesh.vertex(ga);
        const Point& pb = mesh.vertex(gb);
        int prev = side_of(snapped_value(ls(pa), hk, opts));
        const int last = side_of(snapped_value(ls(pb), hk, opts));
        int changes = 0;
        for (int s = 1; s <= opts.edge_samples; ++s) {
            const double t = static_cast<double>(s) / (opts.edge_samples + 1);
            const int cur = side_of(ls(pa + t * (pb - pa)) >= 0.0 ? 1.0 : -1.0);
            changes += cur != prev;
            prev = cur;
        }
        changes += last != prev;
        if (changes > 1)
            throw AssumptionViolation("cell " + std::to_string(cell) + ": edge " + describe(pa) + " - " +
                                      describe(pb) + " is crossed " + std::to_string(changes) +
                                      " times by the interface; refine the mesh");
        if (side[e] != side[(e + 1) % nv]) {
            cut[e] = intersect_edge(ls, pa, pb, hk, opts);
            ++ncut;
        }
    }
    if (ncut != 0 && ncut != 2)
        throw AssumptionViolation("cell " + std::to_string(cell) + ": interface crosses " + std::to_string(ncut) +
                                  " edges; refine the mesh");

    CutTopology topo;
    topo.cls = cls;
    if (ncut == 0) {
        PiecePolygon p;
        p.side = cls == CellClass::Pure1 ? Side1 : Side2;
        for (int i = 0; i < nv; ++i) {
            p.vertices.push_back(mesh.vertex(verts[i]));
            p.edge_tag.push_back(i);
            topo.edge_pieces.push_back({i, p.side, mesh.vertex(verts[i]), mesh.vertex(verts[(i + 1) % nv])});
        }
        p.area = shoelace(p.vertices);
        topo.pieces.push_back(std::move(p));
        return topo;
    }

    for (int s : {static_cast<int>(Side1), static_cast<int>(Side2)}) {
        PiecePolygon p;
        p.side = s;
        for (int i = 0; i < nv; ++i) {
            const int j = (i + 1) % nv;
            if (side[i] == s) {
                p.vertices.push_back(mesh.vertex(verts[i]));
                p.edge_tag.push_back(i);
            }
            if (cut[i]) {
                p.vertices.push_back(*cut[i]);
                p.edge_tag.push_back(side[j] == s ? i : -1);
            }
        }
        p.area = shoelace(p.vertices);
        topo.pieces.push_back(std::move(p));
    }

    const PiecePolygon& p1 = topo.pieces[0];
    for (size_t i = 0; i < p1.vertices.size(); ++i) {
        if (p1.edge_tag[i] == -1) {
            topo.points = {p1.vertices[i], p1.vertices[(i + 1) % p1.vertices.size()]};
            break;
        }
    }
    const Point t = topo.points[1] - topo.points[0];
    topo.chord_length = t.norm();
    topo.chord_normal = Point(t.y(), -t.x()) / topo.chord_length;

    int k = 0;
    for (int e = 0; e < nv; ++e) {
        const Point& a = mesh.vertex(verts[e]);
        const Point& b = mesh.vertex(verts[(e + 1) % nv]);
        if (cut[e]) {
            topo.cut_edges[k++] = e;
            topo.edge_pieces.push_back({e, side[e], a, *cut[e]});
            topo.edge_pieces.push_back({e, side[(e + 1) % nv], *cut[e], b});
        } else {
            topo.edge_pieces.push_back({e, side[e], a, b});
        }
    }
    return topo;
}

CutMesh::CutMesh(const Mesh& mesh) : mesh_(&mesh)
{
    topo_.resize(mesh.num_cells());
    for (int k = 0; k < mesh.num_cells(); ++k) {
        const auto verts = mesh.cell(k);
        auto& t = topo_[k];
        PiecePolygon p;
        for (int i = 0; i < static_cast<int>(verts.size()); ++i) {
            p.vertices.push_back(mesh.vertex(verts[i]));
            p.edge_tag.push_back(i);
            t.edge_pieces.push_back(
                {i, Side1, mesh.vertex(verts[i]), mesh.vertex(verts[(i + 1) % verts.size()])});
        }
        p.area = shoelace(p.vertices);
        t.pieces.push_back(std::move(p));
    }
    assemble(opts_);
}

CutMesh::CutMesh(const Mesh& mesh, const LevelSet& ls, const CutMeshOptions& opts)
    : mesh_(&mesh), has_interface_(true), opts_(opts)
{
    topo_.resize(mesh.num_cells());
    for (int k = 0; k < mesh.num_cells(); ++k)
        topo_[k] = build_cut_topology(mesh, ls, k, opts.geometry);
    assemble(opts);
}

void CutMesh::assemble(const CutMeshOptions& opts)
{
    const Mesh& mesh = *mesh_;
    cell_pieces_.assign(mesh.num_cells(), {});
    cell_chord_.assign(mesh.num_cells(), -1);
    std::vector<std::array<int, 2>> face_piece_of(mesh.num_faces(), {-1, -1});

    for (int k = 0; k < mesh.num_cells(); ++k) {
        const CutTopology& t = topo_[k];
        std::array<int, 2> piece_of_side{-1, -1};
        for (const auto& poly : t.pieces) {
            if (opts.curved && poly.side != opts.active_side)
                continue;
            ElementPiece ep;
            ep.cell = k;
            ep.side = poly.side;
            ep.polygon = poly.vertices;
            ep.area = poly.area;
            piece_of_side[poly.side] = static_cast<int>(pieces_.size());
            cell_pieces_[k].push_back(static_cast<int>(pieces_.size()));
            pieces_.push_back(std::move(ep));
        }
        if (t.cls == CellClass::Cut && (piece_of_side[0] >= 0 || piece_of_side[1] >= 0)) {
            Chord c;
            c.cell = k;
            c.a = t.points[0];
            c.b = t.points[1];
            c.n1 = t.chord_normal;
            c.length = t.chord_length;
            c.piece = piece_of_side;
            cell_chord_[k] = static_cast<int>(chords_.size());
            chords_.push_back(c);
        }

        for (const auto& poly : t.pieces) {
            const int pid = piece_of_side[poly.side];
            if (pid < 0)
                continue;
            ElementPiece& ep = pieces_[pid];
            const size_t n = poly.vertices.size();
            for (size_t i = 0; i < n; ++i) {
                PieceSegment seg;
                seg.a = poly.vertices[i];
                seg.b = poly.vertices[(i + 1) % n];
                seg.length = (seg.b - seg.a).norm();
                const int tag = poly.edge_tag[i];
                if (tag < 0) {
                    seg.chord = true;
                    seg.index = cell_chord_[k];
                    seg.normal = poly.side == Side1 ? t.chord_normal : Point(-t.chord_normal);
                } else {
                    const int f = mesh.cell_faces(k)[tag];
                    const Face& face = mesh.face(f);
                    seg.normal = mesh.outward_normal(k, tag);
                    int& fp = face_piece_of[f][poly.side];
                    if (fp < 0) {
                        FacePiece piece;
                        piece.face = f;
                        piece.side = poly.side;
                        piece.a = face.left == k ? seg.a : seg.b;
                        piece.b = face.left == k ? seg.b : seg.a;
                        piece.length = seg.length;
                        piece.normal = face.normal;
                        piece.boundary = face.boundary();
                        fp = static_cast<int>(face_pieces_.size());
                        face_pieces_.push_back(piece);
                    }
                    (face.left == k ? face_pieces_[fp].left_piece : face_pieces_[fp].right_piece) = pid;
                    seg.index = fp;
                }
                ep.boundary.push_back(seg);
            }
        }
    }
}

double CutMesh::active_area() const
{
    double a = 0.0;
    for (const auto& p : pieces_)
        a += p.area;
    return a;
}

QuadRule piece_quadrature(const ElementPiece& piece, int degree) { return polygon_rule(piece.polygon, degree); }

QuadRule piece_quadrature(const PiecePolygon& piece, int degree) { return polygon_rule(piece.vertices, degree); }

QuadRule piece_quadrature(const Point& a, const Point& b, int degree) { return segment_rule(a, b, degree); }

InterfaceReport validate_interface_assumptions(const Mesh& mesh, const LevelSet& ls, const GeometryOptions& opts)
{
    InterfaceReport rep;
    for (int k = 0; k < mesh.num_cells(); ++k) {
        CutTopology t;
        try {
            t = build_cut_topology(mesh, ls, k, opts);
        } catch (const AssumptionViolation& e) {
            rep.a1_holds = false;
            rep.violating_cells.push_back(k);
            rep.messages.emplace_back(e.what());
            continue;
        }
        if (t.cls != CellClass::Cut)
            continue;
        ++rep.num_cut_cells;
        const double area = mesh.cell_area(k);
        for (const auto& p : t.pieces)
            rep.min_volume_fraction = std::min(rep.min_volume_fraction, p.area / area);

        // Sample the curved interface by projecting chord points onto the zero set.
        constexpr int ns = 5;
        std::vector<Point> normals;
        for (int s = 0; s < ns; ++s) {
            Point x = t.points[0] + (static_cast<double>(s) / (ns - 1)) * (t.points[1] - t.points[0]);
            for (int it = 0; it < 8; ++it) {
                const Point g = ls.gradient(x);
                const double g2 = g.squaredNorm();
                if (g2 == 0.0)
                    break;
                x -= ls(x) * g / g2;
            }
            normals.push_back(ls.normal(x));
        }
        const double hk = mesh.cell_diameter(k);
        for (size_t i = 0; i < normals.size(); ++i)
            for (size_t j = i + 1; j < normals.size(); ++j)
                rep.gamma = std::max(rep.gamma, (normals[i] - normals[j]).norm() / hk);
    }
    return rep;
}

} // namespace xhdg
