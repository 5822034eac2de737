#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "mamix/geometry.hpp"

namespace mamix {

/// Axis-aligned rectangle [ax,bx] x [ay,by].
struct Rect {
    double ax = 0.0;
    double bx = 1.0;
    double ay = 0.0;
    double by = 1.0;

    double area() const { return (bx - ax) * (by - ay); }
};

enum class Side { Left, Right, Bottom, Top };

const char* to_string(Side side);
Vec2 outward_normal(Side side);

/// How each grid cell is split into two triangles.
enum class DiagonalPattern {
    Forward,      // "/" : lower-left to upper-right
    Backward,     // "\" : lower-right to upper-left
    Alternating,  // "/" on even (i+j) cells, "\" on odd ones
};

struct BoundaryEdge {
    std::array<int, 2> nodes{};  // counterclockwise with respect to the owner
    int element = -1;
    Vec2 normal;   // unit outward
    Vec2 tangent;  // (-normal.y, normal.x)
    Side side = Side::Bottom;
};

/// Affine map x = origin + jacobian * xhat from the reference triangle
/// {(0,0),(1,0),(0,1)}.
struct ElementGeometry {
    Point origin;
    Mat2 jacobian;
    double det = 0.0;
    Mat2 inverse_transpose;

    Point map(Point ref) const { return origin + jacobian * ref; }
    Point inverse_map(Point x) const { return inverse_transpose.transpose() * (x - origin); }
};

/// Structured triangulation of a rectangle. Immutable after construction.
class Mesh {
public:
    Mesh(Rect rect, int nx, int ny, std::vector<Point> nodes,
         std::vector<std::array<int, 3>> elements, std::vector<BoundaryEdge> boundary_edges);

    const Rect& rect() const { return rect_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }

    const std::vector<Point>& nodes() const { return nodes_; }
    const std::vector<std::array<int, 3>>& elements() const { return elements_; }
    const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }

    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int num_elements() const { return static_cast<int>(elements_.size()); }

    /// Grid indices (i, j) of a vertex; node = j * (nx + 1) + i.
    std::array<int, 2> grid_index(int node) const { return {node % (nx_ + 1), node / (nx_ + 1)}; }

    double element_area(int e) const;

private:
    Rect rect_;
    int nx_;
    int ny_;
    std::vector<Point> nodes_;
    std::vector<std::array<int, 3>> elements_;
    std::vector<BoundaryEdge> boundary_edges_;
};

Mesh build_rect_mesh(const Rect& rect, int nx, int ny,
                     DiagonalPattern pattern = DiagonalPattern::Forward);

/// Maximum element diameter.
double mesh_size(const Mesh& mesh);

/// Largest grid spacing max((bx-ax)/nx, (by-ay)/ny).
double grid_spacing(const Mesh& mesh);

ElementGeometry element_geometry(const Mesh& mesh, int e);

/// Plain-text listing: "node <id> <x> <y>", "element <id> <a> <b> <c>",
/// "bedge <a> <b> <element> <side>", one entity per line.
void write_mesh(const Mesh& mesh, std::ostream& out);

}  // namespace mamix
