#include "mamix/mesh.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <utility>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace mamix {

const char* to_string(Side side)
{
    switch (side) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Bottom: return "bottom";
    case Side::Top: return "top";
    }
    return "?";
}

Vec2 outward_normal(Side side)
{
    switch (side) {
    case Side::Left: return {-1.0, 0.0};
    case Side::Right: return {1.0, 0.0};
    case Side::Bottom: return {0.0, -1.0};
    case Side::Top: return {0.0, 1.0};
    }
    return {};
}

Mesh::Mesh(Rect rect, int nx, int ny, std::vector<Point> nodes,
           std::vector<std::array<int, 3>> elements, std::vector<BoundaryEdge> boundary_edges)
    : rect_(rect), nx_(nx), ny_(ny), nodes_(std::move(nodes)), elements_(std::move(elements)),
      boundary_edges_(std::move(boundary_edges))
{
}

double Mesh::element_area(int e) const
{
    const auto& t = elements_[static_cast<std::size_t>(e)];
    const Point a = nodes_[t[0]], b = nodes_[t[1]], c = nodes_[t[2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

namespace {

// Which side a boundary edge lies on, from the grid indices of its endpoints.
bool classify_side(std::array<int, 2> p, std::array<int, 2> q, int nx, int ny, Side& side)
{
    if (p[0] == 0 && q[0] == 0) { side = Side::Left; return true; }
    if (p[0] == nx && q[0] == nx) { side = Side::Right; return true; }
    if (p[1] == 0 && q[1] == 0) { side = Side::Bottom; return true; }
    if (p[1] == ny && q[1] == ny) { side = Side::Top; return true; }
    return false;
}

}  // namespace

Mesh build_rect_mesh(const Rect& rect, int nx, int ny, DiagonalPattern pattern)
{
    if (nx < 1 || ny < 1) {
        throw InvalidInput(fmt::format("build_rect_mesh: nx={} ny={} must be >= 1", nx, ny));
    }
    if (!(rect.bx > rect.ax) || !(rect.by > rect.ay)) {
        throw InvalidInput(fmt::format("build_rect_mesh: degenerate rectangle [{},{}]x[{},{}]",
                                       rect.ax, rect.bx, rect.ay, rect.by));
    }

    const int stride = nx + 1;
    std::vector<Point> nodes;
    nodes.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            // Endpoints exactly on the rectangle sides.
            const double x = i == nx ? rect.bx : rect.ax + (rect.bx - rect.ax) * i / nx;
            const double y = j == ny ? rect.by : rect.ay + (rect.by - rect.ay) * j / ny;
            nodes.push_back({x, y});
        }
    }

    std::vector<std::array<int, 3>> elements;
    elements.reserve(static_cast<std::size_t>(2 * nx * ny));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int n00 = j * stride + i;
            const int n10 = n00 + 1;
            const int n01 = n00 + stride;
            const int n11 = n01 + 1;
            bool forward = pattern == DiagonalPattern::Forward;
            if (pattern == DiagonalPattern::Alternating) forward = (i + j) % 2 == 0;
            if (forward) {
                elements.push_back({n00, n10, n11});
                elements.push_back({n00, n11, n01});
            } else {
                elements.push_back({n00, n10, n01});
                elements.push_back({n10, n11, n01});
            }
        }
    }

    // Edges seen once are boundary edges; each appears with its owner's
    // counterclockwise orientation.
    std::map<std::pair<int, int>, std::pair<int, int>> edge_owner;  // sorted edge -> (element, count)
    std::vector<std::array<int, 3>> directed;                        // (a, b, element)
    for (int e = 0; e < static_cast<int>(elements.size()); ++e) {
        const auto& t = elements[static_cast<std::size_t>(e)];
        for (int l = 0; l < 3; ++l) {
            const int a = t[l], b = t[(l + 1) % 3];
            auto [it, inserted] = edge_owner.try_emplace({std::min(a, b), std::max(a, b)}, e, 0);
            ++it->second.second;
            directed.push_back({a, b, e});
        }
    }

    std::vector<BoundaryEdge> boundary;
    for (const auto& [a, b, e] : directed) {
        if (edge_owner.at({std::min(a, b), std::max(a, b)}).second != 1) continue;
        BoundaryEdge edge;
        edge.nodes = {a, b};
        edge.element = e;
        const auto ga = std::array<int, 2>{a % stride, a / stride};
        const auto gb = std::array<int, 2>{b % stride, b / stride};
        if (!classify_side(ga, gb, nx, ny, edge.side)) {
            throw std::logic_error("build_rect_mesh: boundary edge not on a rectangle side");
        }
        edge.normal = outward_normal(edge.side);
        edge.tangent = {-edge.normal.y, edge.normal.x};
        boundary.push_back(edge);
    }

    return Mesh(rect, nx, ny, std::move(nodes), std::move(elements), std::move(boundary));
}

double mesh_size(const Mesh& mesh)
{
    double h = 0.0;
    const auto& p = mesh.nodes();
    for (const auto& t : mesh.elements()) {
        for (int l = 0; l < 3; ++l) {
            h = std::max(h, norm(p[t[l]] - p[t[(l + 1) % 3]]));
        }
    }
    return h;
}

double grid_spacing(const Mesh& mesh)
{
    const Rect& r = mesh.rect();
    return std::max((r.bx - r.ax) / mesh.nx(), (r.by - r.ay) / mesh.ny());
}

ElementGeometry element_geometry(const Mesh& mesh, int e)
{
    if (e < 0 || e >= mesh.num_elements()) {
        throw InvalidInput(fmt::format("element_geometry: element {} out of range", e));
    }
    const auto& t = mesh.elements()[static_cast<std::size_t>(e)];
    const Point p0 = mesh.nodes()[t[0]];
    const Point p1 = mesh.nodes()[t[1]];
    const Point p2 = mesh.nodes()[t[2]];

    ElementGeometry g;
    g.origin = p0;
    g.jacobian = {p1.x - p0.x, p2.x - p0.x, p1.y - p0.y, p2.y - p0.y};
    g.det = g.jacobian.det();
    if (!(g.det > 0.0)) {
        throw InvalidInput(fmt::format("element_geometry: degenerate element {} (det={})", e, g.det));
    }
    g.inverse_transpose = g.jacobian.inverse().transpose();
    return g;
}

void write_mesh(const Mesh& mesh, std::ostream& out)
{
    const auto& p = mesh.nodes();
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        fmt::print(out, "node {} {:.17g} {:.17g}\n", i, p[i].x, p[i].y);
    }
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& t = mesh.elements()[static_cast<std::size_t>(e)];
        fmt::print(out, "element {} {} {} {}\n", e, t[0], t[1], t[2]);
    }
    for (const auto& edge : mesh.boundary_edges()) {
        fmt::print(out, "bedge {} {} {} {}\n", edge.nodes[0], edge.nodes[1], edge.element,
                   to_string(edge.side));
    }
}

}  // namespace mamix
