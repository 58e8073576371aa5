#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "xhdg/levelset.hpp"
#include "xhdg/mesh.hpp"
#include "xhdg/quadrature.hpp"

namespace xhdg {

/// Subdomain index: 0 is where phi > 0, 1 is where phi < 0.
enum Side : int { Side1 = 0, Side2 = 1 };

enum class CellClass { Pure1, Pure2, Cut };

struct GeometryOptions {
    double snap_tolerance = 1e-10; ///< relative to h_K
    double root_tolerance = 1e-12; ///< relative to h_K
    int max_bisection_steps = 60;
    int edge_samples = 16; ///< interior samples per edge for detecting double crossings
};

/// Level-set value with vertices closer than snap_tolerance * h_K pushed to subdomain 1.
double snapped_value(double phi, double h_K, const GeometryOptions& opts = {});

CellClass classify_element(const Mesh& mesh, const LevelSet& ls, int cell, const GeometryOptions& opts = {});

/// Root of the level set on the segment [p0, p1] by bracketed bisection. The snapped
/// signs at the endpoints must differ.
Point intersect_edge(const LevelSet& ls, const Point& p0, const Point& p1, double h_K,
                     const GeometryOptions& opts = {});

/// One side of a cell: a convex counter-clockwise polygon. `edge_tag[i]` names the
/// segment vertices[i] -> vertices[i+1]: a local cell edge index, or -1 for the chord.
struct PiecePolygon {
    int side = Side1;
    std::vector<Point> vertices;
    std::vector<int> edge_tag;
    double area = 0.0;

    /// Fan triangulation from the first vertex.
    std::vector<std::array<Point, 3>> triangles() const;
};

/// Portion of a cell edge lying in one subdomain, in the cell's counter-clockwise sense.
struct EdgePiece {
    int local_edge = -1;
    int side = Side1;
    Point a = Point::Zero(), b = Point::Zero();
    double length() const { return (b - a).norm(); }
};

/// Interface geometry inside one cell.
struct CutTopology {
    CellClass cls = CellClass::Pure1;
    /// Chord endpoints, ordered so that the side-1 polygon traverses the chord from
    /// points[0] to points[1]; only meaningful for Cut.
    std::array<Point, 2> points{Point::Zero(), Point::Zero()};
    std::array<int, 2> cut_edges{-1, -1};
    Point chord_normal = Point::Zero(); ///< unit normal from subdomain 1 into subdomain 2
    double chord_length = 0.0;
    std::vector<PiecePolygon> pieces; ///< one for pure cells, [side 1, side 2] for cut cells
    std::vector<EdgePiece> edge_pieces;

    const PiecePolygon* piece(int side) const;
};

/// Full interface geometry of one cell. Throws AssumptionViolation when an edge is
/// crossed twice, more than two edges are crossed, or all vertices lie on the interface.
CutTopology build_cut_topology(const Mesh& mesh, const LevelSet& ls, int cell, const GeometryOptions& opts = {});

/// Outward normal and length of one boundary segment of an element piece. `index` is a
/// face-piece id or a chord id.
struct PieceSegment {
    Point a = Point::Zero(), b = Point::Zero();
    Point normal = Point::Zero();
    double length = 0.0;
    bool chord = false;
    int index = -1;
};

struct ElementPiece {
    int cell = -1;
    int side = Side1;
    std::vector<Point> polygon;
    double area = 0.0;
    std::vector<PieceSegment> boundary;
};

/// F cap closure(Omega_i) for a mesh face F. Endpoints follow the face orientation.
struct FacePiece {
    int face = -1;
    int side = Side1;
    Point a = Point::Zero(), b = Point::Zero();
    double length = 0.0;
    Point normal = Point::Zero(); ///< outward normal of the left piece
    int left_piece = -1;
    int right_piece = -1;
    bool boundary = false;
};

/// Straight approximation of the interface inside a cut cell.
struct Chord {
    int cell = -1;
    Point a = Point::Zero(), b = Point::Zero();
    Point n1 = Point::Zero(); ///< unit normal from subdomain 1 into subdomain 2
    double length = 0.0;
    std::array<int, 2> piece{-1, -1}; ///< element piece on each side (-1 when inactive)
};

struct CutMeshOptions {
    GeometryOptions geometry;
    /// Fictitious-domain mode: only pieces on `active_side` carry unknowns.
    bool curved = false;
    int active_side = Side2;
};

/// Interface geometry over the whole mesh: element pieces, face pieces and chords.
/// Immutable after construction.
class CutMesh {
public:
    /// No interface: every cell is a single side-1 piece.
    explicit CutMesh(const Mesh& mesh);
    CutMesh(const Mesh& mesh, const LevelSet& ls, const CutMeshOptions& opts = {});

    const Mesh& mesh() const { return *mesh_; }
    bool has_interface() const { return has_interface_; }
    bool curved() const { return opts_.curved; }
    int active_side() const { return opts_.active_side; }

    int num_pieces() const { return static_cast<int>(pieces_.size()); }
    int num_face_pieces() const { return static_cast<int>(face_pieces_.size()); }
    int num_chords() const { return static_cast<int>(chords_.size()); }

    const ElementPiece& piece(int i) const { return pieces_[i]; }
    const FacePiece& face_piece(int i) const { return face_pieces_[i]; }
    const Chord& chord(int i) const { return chords_[i]; }
    const std::vector<ElementPiece>& pieces() const { return pieces_; }
    const std::vector<FacePiece>& face_pieces() const { return face_pieces_; }
    const std::vector<Chord>& chords() const { return chords_; }

    CellClass cell_class(int k) const { return topo_[k].cls; }
    const CutTopology& topology(int k) const { return topo_[k]; }
    /// Active pieces of cell k (0, 1 or 2 entries).
    const std::vector<int>& cell_pieces(int k) const { return cell_pieces_[k]; }
    /// Chord id of cell k or -1.
    int cell_chord(int k) const { return cell_chord_[k]; }

    double active_area() const;

private:
    void assemble(const CutMeshOptions& opts);

    const Mesh* mesh_;
    bool has_interface_ = false;
    CutMeshOptions opts_;
    std::vector<CutTopology> topo_;
    std::vector<ElementPiece> pieces_;
    std::vector<FacePiece> face_pieces_;
    std::vector<Chord> chords_;
    std::vector<std::vector<int>> cell_pieces_;
    std::vector<int> cell_chord_;
};

/// Composite rule over one element piece (fan sub-triangles).
QuadRule piece_quadrature(const ElementPiece& piece, int degree);
QuadRule piece_quadrature(const PiecePolygon& piece, int degree);
/// Gauss-Legendre rule over a segment piece (face piece, chord, or edge piece).
QuadRule piece_quadrature(const Point& a, const Point& b, int degree);

struct InterfaceReport {
    bool a1_holds = true;
    std::vector<int> violating_cells;
    std::vector<std::string> messages;
    double gamma = 0.0;                ///< estimated curvature constant in |n(x)-n(y)| <= gamma h_K
    double min_volume_fraction = 1.0;  ///< smallest |K_i| / |K| over cut cells
    int num_cut_cells = 0;
};

/// Report-only check of the interface-resolution assumptions.
InterfaceReport validate_interface_assumptions(const Mesh& mesh, const LevelSet& ls, const GeometryOptions& opts = {});

} // namespace xhdg
