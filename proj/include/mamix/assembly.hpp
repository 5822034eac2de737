#pragma once

#include <array>
#include <functional>
#include <vector>

#include "mamix/linalg.hpp"
#include "mamix/space.hpp"
#include "mamix/sym2.hpp"

namespace mamix {

/// Gradients of the (xx, xy, yy) components of a tensor function.
using TensorGradFn = std::function<std::array<Vec2, 3>(Point)>;

/// Default exactness for the element forms: 3k, enough for det(sigma_h) v.
inline int default_form_degree(int k) { return 3 * k; }
/// Default exactness for error norms.
inline int default_norm_degree(int k) { return 2 * k + 4; }

// Every assembler takes an optional quadrature exactness; 0 selects the default.

/// (sigma, mu) with the Frobenius product; the xy block carries weight 2.
Triplets assemble_mass(const DofMap& tensor_space, int quad_degree = 0);

/// B[(c,i), j] = (div(phi_i E_c), D psi_j). Rows are tensor dofs, columns scalar dofs.
Triplets assemble_div_coupling(const DofMap& tensor_space, const DofMap& scalar_space,
                               int quad_degree = 0);

enum class TangentOrientation { CounterClockwise, Clockwise };

/// <g~, mu> = sum over boundary edges of int (dg/dtau) (mu n . tau) ds, with
/// dg/dtau = grad_g . tau. Uses ceil((3k+1)/2) Gauss points per edge.
std::vector<double> assemble_boundary_g(const DofMap& tensor_space, const VectorFn& grad_g,
                                        TangentOrientation orientation = TangentOrientation::CounterClockwise);

/// (det(sigma_h), v) for every scalar basis function v.
std::vector<double> assemble_det_residual(const Field& sigma, const DofMap& scalar_space,
                                          int quad_degree = 0);

/// C[j, (c,i)] = ((cof(sigma_h) : phi_i E_c), psi_j), the derivative of the
/// determinant term with respect to sigma.
Triplets assemble_cof_jacobian(const Field& sigma, const DofMap& scalar_space, int quad_degree = 0);

/// S[i, j] = (Phi D psi_j, D psi_i).
Triplets assemble_phi_grad(const Field& phi, const DofMap& scalar_space, int quad_degree = 0);

std::vector<double> assemble_load(const DofMap& scalar_space, const ScalarFn& fn, int quad_degree = 0);

Triplets assemble_scalar_laplacian(const DofMap& scalar_space, int quad_degree = 0);

enum class Norm { L2, H1Semi, H1 };

/// ||u_h - u|| by quadrature; exact_grad may be empty for Norm::L2.
double error_norm(const Field& field, const ScalarFn& exact, const VectorFn& exact_grad, Norm norm,
                  int quad_degree = 0);

/// Tensor version, Frobenius-weighted; H1 is taken component-wise.
double error_norm(const Field& field, const TensorFn& exact, const TensorGradFn& exact_grad, Norm norm,
                  int quad_degree = 0);

/// Smallest eigenvalue of a tensor field over all quadrature points.
double min_eigenvalue_monitor(const Field& sigma, int quad_degree = 0);

}  // namespace mamix
