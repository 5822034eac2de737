#pragma once

#include <span>
#include <vector>

#include "mamix/geometry.hpp"
#include "mamix/mesh.hpp"

namespace mamix {

/// Nodal P_k basis on the reference triangle {(0,0),(1,0),(0,1)}.
///
/// Basis function (a, b) belongs to the lattice point (a/k, b/k); local
/// indices run over b = 0..k, then a = 0..k-b. In barycentric form
///   phi_(a,b) = P_a(l1) P_b(l2) P_c(l0),  c = k - a - b,
///   P_m(l) = prod_{i<m} (k l - i) / (i + 1),
/// with l1 = xhat, l2 = yhat, l0 = 1 - xhat - yhat.
class LagrangeBasis {
public:
    explicit LagrangeBasis(int degree);

    int degree() const { return degree_; }
    int size() const { return static_cast<int>(lattice_.size()); }

    /// Lattice coordinates (a, b) of each local basis function.
    const std::vector<std::array<int, 2>>& lattice() const { return lattice_; }
    const std::vector<Point>& nodes() const { return nodes_; }

    void values(Point ref, std::span<double> out) const;
    void gradients(Point ref, std::span<Vec2> out) const;

private:
    // P_m(l) and dP_m/dl.
    double factor(int m, double l) const;
    double factor_derivative(int m, double l) const;

    int degree_;
    std::vector<std::array<int, 2>> lattice_;
    std::vector<Point> nodes_;
};

LagrangeBasis lagrange_basis(int degree);

struct QuadRule {
    std::vector<Point> points;
    std::vector<double> weights;  // sum to 1/2
    int degree = 0;
};

/// Positive-weight rule on the reference triangle exact for total degree d,
/// 1 <= d <= 20. Built as a collapsed (Duffy) product of Gauss-Legendre rules.
QuadRule quad_rule(int degree);

struct QuadRule1D {
    std::vector<double> points;  // on [0, 1]
    std::vector<double> weights;  // sum to 1
};

/// n-point Gauss-Legendre rule mapped to [0, 1].
QuadRule1D gauss_legendre(int n);

/// Reference gradients mapped through the inverse-transpose Jacobian.
void physical_gradients(const ElementGeometry& geom, const LagrangeBasis& basis, Point ref,
                        std::span<Vec2> out);

inline Vec2 to_physical(const ElementGeometry& geom, Vec2 ref_grad)
{
    return geom.inverse_transpose * ref_grad;
}

}  // namespace mamix
