#include "mamix/space.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace mamix {

DofMap::DofMap(std::shared_ptr<const Mesh> mesh, int degree, int components)
    : mesh_(std::move(mesh)), basis_(degree), components_(components)
{
    if (!mesh_) throw InvalidInput("build_space: null mesh");
    if (components != 1 && components != 3) {
        throw InvalidInput(fmt::format("build_space: components must be 1 or 3, got {}", components));
    }
    const int k = degree;
    const int gx = k * mesh_->nx();
    const int gy = k * mesh_->ny();
    const Rect& r = mesh_->rect();

    points_.resize(static_cast<std::size_t>((gx + 1) * (gy + 1)));
    side_mask_.assign(points_.size(), 0);
    for (int J = 0; J <= gy; ++J) {
        for (int I = 0; I <= gx; ++I) {
            const std::size_t n = static_cast<std::size_t>(J * (gx + 1) + I);
            points_[n] = {I == gx ? r.bx : r.ax + (r.bx - r.ax) * I / gx,
                          J == gy ? r.by : r.ay + (r.by - r.ay) * J / gy};
            unsigned char mask = 0;
            if (I == 0) mask |= 1u << static_cast<int>(Side::Left);
            if (I == gx) mask |= 1u << static_cast<int>(Side::Right);
            if (J == 0) mask |= 1u << static_cast<int>(Side::Bottom);
            if (J == gy) mask |= 1u << static_cast<int>(Side::Top);
            side_mask_[n] = mask;
        }
    }

    const auto& lattice = basis_.lattice();
    cell_nodes_.reserve(static_cast<std::size_t>(mesh_->num_elements()) * lattice.size());
    for (const auto& t : mesh_->elements()) {
        const auto v0 = mesh_->grid_index(t[0]);
        const auto v1 = mesh_->grid_index(t[1]);
        const auto v2 = mesh_->grid_index(t[2]);
        for (const auto [a, b] : lattice) {
            const int I = k * v0[0] + a * (v1[0] - v0[0]) + b * (v2[0] - v0[0]);
            const int J = k * v0[1] + a * (v1[1] - v0[1]) + b * (v2[1] - v0[1]);
            cell_nodes_.push_back(J * (gx + 1) + I);
        }
    }
}

std::shared_ptr<const DofMap> build_space(std::shared_ptr<const Mesh> mesh, int degree,
                                          int components)
{
    return std::make_shared<const DofMap>(std::move(mesh), degree, components);
}

Field::Field(std::shared_ptr<const DofMap> space)
    : space_(std::move(space)), values_(static_cast<std::size_t>(space_->num_dofs()), 0.0)
{
}

Field::Field(std::shared_ptr<const DofMap> space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values))
{
    if (static_cast<int>(values_.size()) != space_->num_dofs()) {
        throw InvalidInput(fmt::format("Field: {} values for {} dofs", values_.size(),
                                       space_->num_dofs()));
    }
}

double Field::value(int e, std::span<const double> phi, int component) const
{
    const auto nodes = space_->element_nodes(e);
    const int offset = component * space_->num_nodes();
    double v = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) v += values_[offset + nodes[i]] * phi[i];
    return v;
}

Vec2 Field::gradient(int e, std::span<const Vec2> dphi, int component) const
{
    const auto nodes = space_->element_nodes(e);
    const int offset = component * space_->num_nodes();
    Vec2 g;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double c = values_[offset + nodes[i]];
        g.x += c * dphi[i].x;
        g.y += c * dphi[i].y;
    }
    return g;
}

Sym2 Field::tensor(int e, std::span<const double> phi) const
{
    return {value(e, phi, 0), value(e, phi, 1), value(e, phi, 2)};
}

Field interpolate(std::shared_ptr<const DofMap> space, const ScalarFn& fn)
{
    if (space->components() != 1) throw InvalidInput("interpolate: scalar function on tensor space");
    Field f(space);
    for (int n = 0; n < space->num_nodes(); ++n) f.values()[n] = fn(space->node_point(n));
    return f;
}

Field interpolate(std::shared_ptr<const DofMap> space, const TensorFn& fn)
{
    if (space->components() != 3) throw InvalidInput("interpolate: tensor function on scalar space");
    Field f(space);
    for (int n = 0; n < space->num_nodes(); ++n) {
        const Sym2 s = fn(space->node_point(n));
        for (int c = 0; c < 3; ++c) f.values()[space->dof(c, n)] = s[c];
    }
    return f;
}

ConstraintSet::ConstraintSet(std::vector<std::pair<int, double>> entries) : entries_(std::move(entries))
{
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (i > 0 && entries_[i].first == entries_[i - 1].first) {
            throw InvalidInput(fmt::format("ConstraintSet: duplicate dof {}", entries_[i].first));
        }
        if (!std::isfinite(entries_[i].second)) {
            throw InvalidInput(fmt::format("ConstraintSet: non-finite value at dof {}", entries_[i].first));
        }
    }
}

bool ConstraintSet::contains(int dof) const
{
    return std::binary_search(entries_.begin(), entries_.end(), std::pair<int, double>{dof, 0.0},
                              [](const auto& l, const auto& r) { return l.first < r.first; });
}

void ConstraintSet::apply(std::span<double> v) const
{
    for (const auto& [dof, value] : entries_) v[static_cast<std::size_t>(dof)] = value;
}

ConstraintSet ConstraintSet::homogeneous() const
{
    ConstraintSet zero = *this;
    for (auto& entry : zero.entries_) entry.second = 0.0;
    return zero;
}

ConstraintSet constraints_u(const DofMap& scalar_space, const ScalarFn& g)
{
    if (scalar_space.components() != 1) throw InvalidInput("constraints_u: scalar space required");
    std::vector<std::pair<int, double>> entries;
    for (int n = 0; n < scalar_space.num_nodes(); ++n) {
        if (scalar_space.on_boundary(n)) entries.emplace_back(n, g(scalar_space.node_point(n)));
    }
    return ConstraintSet(std::move(entries));
}

ConstraintSet constraints_sigma(const DofMap& tensor_space, const NormalTraceFn& h_nn)
{
    if (tensor_space.components() != 3) throw InvalidInput("constraints_sigma: tensor space required");
    std::vector<std::pair<int, double>> entries;
    for (int n = 0; n < tensor_space.num_nodes(); ++n) {
        const Point p = tensor_space.node_point(n);
        for (Side side : {Side::Left, Side::Right}) {
            if (tensor_space.on_side(n, side)) entries.emplace_back(tensor_space.dof(0, n), h_nn(p, side));
        }
        for (Side side : {Side::Bottom, Side::Top}) {
            if (tensor_space.on_side(n, side)) entries.emplace_back(tensor_space.dof(2, n), h_nn(p, side));
        }
    }
    return ConstraintSet(std::move(entries));
}

void write_field(std::ostream& out, const Field& field)
{
    const DofMap& s = field.space();
    fmt::print(out, "mamix-field {} {} {}\n", s.num_dofs(), s.degree(), s.components());
    for (double v : field.values()) fmt::print(out, "{:.17g}\n", v);
}

Field read_field(std::istream& in, std::shared_ptr<const DofMap> space)
{
    std::string tag;
    int ndofs = 0, degree = 0, components = 0;
    if (!(in >> tag >> ndofs >> degree >> components) || tag != "mamix-field") {
        throw InvalidInput("read_field: missing 'mamix-field' header");
    }
    if (ndofs != space->num_dofs() || degree != space->degree() || components != space->components()) {
        throw InvalidInput(fmt::format(
            "read_field: header ({} dofs, k={}, {} comps) does not match space ({} dofs, k={}, {} comps)",
            ndofs, degree, components, space->num_dofs(), space->degree(), space->components()));
    }
    std::vector<double> values(static_cast<std::size_t>(ndofs));
    for (auto& v : values) {
        if (!(in >> v)) throw InvalidInput("read_field: truncated coefficient list");
    }
    return Field(std::move(space), std::move(values));
}

}  // namespace mamix
