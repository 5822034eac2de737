#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "mamix/element.hpp"
#include "mamix/mesh.hpp"
#include "mamix/sym2.hpp"

namespace mamix {

using ScalarFn = std::function<double(Point)>;
using VectorFn = std::function<Vec2(Point)>;
using TensorFn = std::function<Sym2(Point)>;

/// Continuous P_k Lagrange space with 1 (scalar) or 3 (symmetric tensor,
/// stored as xx, xy, yy) components.
///
/// Global Lagrange nodes are the points of the k-times refined tensor grid,
/// numbered lexicographically: node = J * (k * nx + 1) + I. Every P_k lattice
/// point of every triangle of a structured mesh is such a grid point, so
/// shared vertices and edges get identical numbers. Dofs are component-major:
/// dof = component * num_nodes + node.
class DofMap {
public:
    DofMap(std::shared_ptr<const Mesh> mesh, int degree, int components);

    const Mesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
    const LagrangeBasis& basis() const { return basis_; }

    int degree() const { return basis_.degree(); }
    int components() const { return components_; }
    int num_nodes() const { return static_cast<int>(points_.size()); }
    int num_dofs() const { return components_ * num_nodes(); }
    int local_size() const { return basis_.size(); }

    int dof(int component, int node) const { return component * num_nodes() + node; }

    std::span<const int> element_nodes(int e) const
    {
        return {cell_nodes_.data() + static_cast<std::size_t>(e) * basis_.size(),
                static_cast<std::size_t>(basis_.size())};
    }

    Point node_point(int node) const { return points_[static_cast<std::size_t>(node)]; }

    bool on_side(int node, Side side) const
    {
        return (side_mask_[static_cast<std::size_t>(node)] >> static_cast<int>(side)) & 1u;
    }
    bool on_boundary(int node) const { return side_mask_[static_cast<std::size_t>(node)] != 0; }

private:
    std::shared_ptr<const Mesh> mesh_;
    LagrangeBasis basis_;
    int components_;
    std::vector<int> cell_nodes_;
    std::vector<Point> points_;
    std::vector<unsigned char> side_mask_;
};

std::shared_ptr<const DofMap> build_space(std::shared_ptr<const Mesh> mesh, int degree,
                                          int components);

/// Coefficient vector over a DofMap.
class Field {
public:
    explicit Field(std::shared_ptr<const DofMap> space);
    Field(std::shared_ptr<const DofMap> space, std::vector<double> values);

    const DofMap& space() const { return *space_; }
    const std::shared_ptr<const DofMap>& space_ptr() const { return space_; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    /// Component value on element e given local basis values.
    double value(int e, std::span<const double> phi, int component = 0) const;
    /// Component gradient on element e given local physical basis gradients.
    Vec2 gradient(int e, std::span<const Vec2> dphi, int component = 0) const;
    Sym2 tensor(int e, std::span<const double> phi) const;

private:
    std::shared_ptr<const DofMap> space_;
    std::vector<double> values_;
};

Field interpolate(std::shared_ptr<const DofMap> space, const ScalarFn& fn);
Field interpolate(std::shared_ptr<const DofMap> space, const TensorFn& fn);

/// Prescribed dof values, sorted by dof index, no duplicates.
class ConstraintSet {
public:
    ConstraintSet() = default;
    explicit ConstraintSet(std::vector<std::pair<int, double>> entries);

    const std::vector<std::pair<int, double>>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    bool contains(int dof) const;

    /// Overwrites the constrained coefficients of v.
    void apply(std::span<double> v) const;
    /// Same dofs, every value zero.
    ConstraintSet homogeneous() const;

private:
    std::vector<std::pair<int, double>> entries_;
};

/// u = g at every boundary Lagrange node.
ConstraintSet constraints_u(const DofMap& scalar_space, const ScalarFn& g);

/// Value of sigma n.n on a given side at a point.
using NormalTraceFn = std::function<double(Point, Side)>;

/// sigma_xx fixed on left/right nodes, sigma_yy on bottom/top nodes, both at
/// corners; sigma_xy is never constrained.
ConstraintSet constraints_sigma(const DofMap& tensor_space, const NormalTraceFn& h_nn);

/// "mamix-field <ndofs> <degree> <components>" followed by one value per line.
void write_field(std::ostream& out, const Field& field);
Field read_field(std::istream& in, std::shared_ptr<const DofMap> space);

}  // namespace mamix
