#include "mamix/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace mamix {

namespace {

// Reference basis values and gradients tabulated at the points of one rule.
struct Tabulation {
    QuadRule rule;
    int nloc = 0;
    std::vector<double> phi;     // [q * nloc + i]
    std::vector<Vec2> dphi_ref;  // [q * nloc + i]

    Tabulation(const LagrangeBasis& basis, int degree) : rule(quad_rule(degree)), nloc(basis.size())
    {
        const std::size_t nq = rule.points.size();
        phi.resize(nq * nloc);
        dphi_ref.resize(nq * nloc);
        for (std::size_t q = 0; q < nq; ++q) {
            basis.values(rule.points[q], std::span<double>(phi.data() + q * nloc, nloc));
            basis.gradients(rule.points[q], std::span<Vec2>(dphi_ref.data() + q * nloc, nloc));
        }
    }

    int num_points() const { return static_cast<int>(rule.points.size()); }
    std::span<const double> values(int q) const { return {phi.data() + q * nloc, static_cast<std::size_t>(nloc)}; }

    void physical(const ElementGeometry& g, int q, std::vector<Vec2>& out) const
    {
        out.resize(static_cast<std::size_t>(nloc));
        for (int i = 0; i < nloc; ++i) out[i] = to_physical(g, dphi_ref[q * nloc + i]);
    }
};

int form_degree(const DofMap& space, int requested)
{
    return requested > 0 ? requested : default_form_degree(space.degree());
}

void require_same_mesh(const DofMap& a, const DofMap& b, const char* what)
{
    if (a.mesh_ptr() != b.mesh_ptr()) throw InvalidInput(fmt::format("{}: spaces on different meshes", what));
    if (a.degree() != b.degree()) throw InvalidInput(fmt::format("{}: spaces of different degree", what));
}

void require_components(const DofMap& s, int components, const char* what)
{
    if (s.components() != components) {
        throw InvalidInput(fmt::format("{}: expected a {}-component space", what, components));
    }
}

// div(phi E_c) . v for the stored tensor components.
double div_dot(int component, Vec2 dphi, Vec2 v)
{
    switch (component) {
    case 0: return dphi.x * v.x;
    case 1: return dphi.y * v.x + dphi.x * v.y;
    default: return dphi.y * v.y;
    }
}

}  // namespace

Triplets assemble_mass(const DofMap& W, int quad_degree)
{
    require_components(W, 3, "assemble_mass");
    const Tabulation tab(W.basis(), form_degree(W, quad_degree));
    const Mesh& mesh = W.mesh();
    const int nloc = tab.nloc;

    Triplets t(W.num_dofs(), W.num_dofs());
    t.reserve(static_cast<std::size_t>(mesh.num_elements()) * 3 * nloc * nloc);
    std::vector<double> local(static_cast<std::size_t>(nloc * nloc));
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const ElementGeometry g = element_geometry(mesh, e);
        std::fill(local.begin(), local.end(), 0.0);
        for (int q = 0; q < tab.num_points(); ++q) {
            const double w = tab.rule.weights[q] * g.det;
            const auto phi = tab.values(q);
            for (int i = 0; i < nloc; ++i) {
                for (int j = 0; j < nloc; ++j) local[i * nloc + j] += w * phi[i] * phi[j];
            }
        }
        const auto nodes = W.element_nodes(e);
        for (int c = 0; c < 3; ++c) {
            for (int i = 0; i < nloc; ++i) {
                for (int j = 0; j < nloc; ++j) {
                    t.add(W.dof(c, nodes[i]), W.dof(c, nodes[j]), kFrobeniusWeight[c] * local[i * nloc + j]);
                }
            }
        }
    }
    return t;
}

Triplets assemble_div_coupling(const DofMap& W, const DofMap& V, int quad_degree)
{
    require_components(W, 3, "assemble_div_coupling");
    require_components(V, 1, "assemble_div_coupling");
    require_same_mesh(W, V, "assemble_div_coupling");
    const Tabulation tab(W.basis(), form_degree(W, quad_degree));
    const Mesh& mesh = W.mesh();
    const int nloc = tab.nloc;

    Triplets t(W.num_dofs(), V.num_dofs());
    t.reserve(static_cast<std::size_t>(mesh.num_elements()) * 3 * nloc * nloc);
    std::vector<double> local(static_cast<std::size_t>(3 * nloc * nloc));
    std::vector<Vec2> dphi;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const ElementGeometry g = element_geometry(mesh, e);
        std::fill(local.begin(), local.end(), 0.0);
        for (int q = 0; q < tab.num_points(); ++q) {
            const double w = tab.rule.weights[q] * g.det;
            tab.physical(g, q, dphi);
            for (int c = 0; c < 3; ++c) {
                for (int i = 0; i < nloc; ++i) {
                    for (int j = 0; j < nloc; ++j) {
                        local[(c * nloc + i) * nloc + j] += w * div_dot(c, dphi[i], dphi[j]);
                    }
                }
            }
        }
        const auto wn = W.element_nodes(e);
        const auto vn = V.element_nodes(e);
        for (int c = 0; c < 3; ++c) {
            for (int i = 0; i < nloc; ++i) {
                for (int j = 0; j < nloc; ++j) t.add(W.dof(c, wn[i]), vn[j], local[(c * nloc + i) * nloc + j]);
            }
        }
    }
    return t;
}

std::vector<double> assemble_boundary_g(const DofMap& W, const VectorFn& grad_g,
                                        TangentOrientation orientation)
{
    require_components(W, 3, "assemble_boundary_g");
    const Mesh& mesh = W.mesh();
    const LagrangeBasis& basis = W.basis();
    const int k = W.degree();
    const QuadRule1D line = gauss_legendre((3 * k + 1 + 1) / 2);
    const double flip = orientation == TangentOrientation::Clockwise ? -1.0 : 1.0;

    std::vector<double> out(static_cast<std::size_t>(W.num_dofs()), 0.0);
    std::vector<double> phi(static_cast<std::size_t>(basis.size()));
    for (const BoundaryEdge& edge : mesh.boundary_edges()) {
        const ElementGeometry g = element_geometry(mesh, edge.element);
        const Point p0 = mesh.nodes()[edge.nodes[0]];
        const Point p1 = mesh.nodes()[edge.nodes[1]];
        const double length = norm(p1 - p0);
        const Vec2 n = edge.normal;
        const Vec2 tau = flip * edge.tangent;
        const double n_dot_tau[3] = {n.x * tau.x, n.x * tau.y + n.y * tau.x, n.y * tau.y};
        const auto nodes = W.element_nodes(edge.element);

        for (std::size_t q = 0; q < line.points.size(); ++q) {
            const Point x = p0 + line.points[q] * (p1 - p0);
            basis.values(g.inverse_map(x), phi);
            const double dg_dtau = dot(grad_g(x), tau);
            const double w = line.weights[q] * length * dg_dtau;
            for (int c = 0; c < 3; ++c) {
                if (n_dot_tau[c] == 0.0) continue;
                for (std::size_t i = 0; i < nodes.size(); ++i) {
                    out[static_cast<std::size_t>(W.dof(c, nodes[i]))] += w * phi[i] * n_dot_tau[c];
                }
            }
        }
    }
    return out;
}

std::vector<double> assemble_det_residual(const Field& sigma, const DofMap& V, int quad_degree)
{
    const DofMap& W = sigma.space();
    require_components(W, 3, "assemble_det_residual");
    require_components(V, 1, "assemble_det_residual");
    require_same_mesh(W, V, "assemble_det_residual");
    const Tabulation tab(V.basis(), form_degree(V, quad_degree));
    const Mesh& mesh = V.mesh();

    std::vector<double> out(static_cast<std::size_t>(V.num_dofs()), 0.0);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const ElementGeometry g = element_geometry(mesh, e);
        const auto nodes = V.element_nodes(e);
        for (int q = 0; q < tab.num_points(); ++q) {
            const auto phi = tab.values(q);
            const double d = det2(sigma.tensor(e, phi)) * tab.rule.weights[q] * g.det;
            for (std::size_t j = 0; j < nodes.size(); ++j) out[nodes[j]] += d * phi[j];
        }
    }
    return out;
}

Triplets assemble_cof_jacobian(const Field& sigma, const DofMap& V, int quad_degree)
{
    const DofMap& W = sigma.space();
    require_components(W, 3, "assemble_cof_jacobian");
    require_components(V, 1, "assemble_cof_jacobian");
    require_same_mesh(W, V, "assemble_cof_jacobian");
    const Tabulation tab(V.basis(), form_degree(V, quad_degree));
    const Mesh& mesh = V.mesh();
    const int nloc = tab.nloc;

    Triplets t(V.num_dofs(), W.num_dofs());
    t.reserve(static_cast<std::size_t>(mesh.num_elements()) * 3 * nloc * nloc);
    std::vector<double> local(static_cast<std::size_t>(3 * nloc * nloc));
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const ElementGeometry g = element_geometry(mesh, e);
        std::fill(local.begin(), local.end(), 0.0);
        for (int q = 0; q < tab.num_points(); ++q) {
            const auto phi = tab.values(q);
            const Sym2 cof = cof2(sigma.tensor(e, phi));
            const double w = tab.rule.weights[q] * g.det;
            for (int c = 0; c < 3; ++c) {
                const double coeff = w * kFrobeniusWeight[c] * cof[c];
                for (int i = 0; i < nloc; ++i) {
                    for (int j = 0; j < nloc; ++j) local[(c * nloc + i) * nloc + j] += coeff * phi[i] * phi[j];
                }
            }
        }
        const auto wn = W.element_nodes(e);
        const auto vn = V.element_nodes(e);
        for (int c = 0; c < 3; ++c) {
            for (int i = 0; i < nloc; ++i) {
                for (int j = 0; j < nloc; ++j) t.add(vn[j], W.dof(c, wn[i]), local[(c * nloc + i) * nloc + j]);
            }
        }
    }
    return t;
}

Triplets assemble_phi_grad(const Field& phi_field, const DofMap& V, int quad_degree)
{
    const DofMap& W = phi_field.space();
    require_components(W, 3, "assemble_phi_grad");
    require_components(V, 1, "assemble_phi_grad");
    require_same_mesh(W, V, "assemble_phi_grad");
    const Tabulation tab(V.basis(), form_degree(V, quad_degree));
    const Mesh& mesh = V.mesh();
    const int nloc = tab.nloc;

    Triplets t(V.num_dofs(), V.num_dofs());
    t.reserve(static_cast<std::size_t>(mesh.num_elements()) * nloc * nloc);
    std::vector<double> local(static_cast<std::size_t>(nloc * nloc));
    std::vector<Vec2> dphi;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const ElementGeometry g = element_geometry(mesh, e);
        std::fill(local.begin(), local.end(), 0.0);
        for (int q = 0; q < tab.num_points(); ++q) {
            const Sym2 m = phi_field.tensor(e, tab.values(q));
            const double w = tab.rule.weights[q] * g.det;
            tab.physical(g, q, dphi);
            for (int j = 0; j < nloc; ++j) {
                const Vec2 flux{m.a * dphi[j].x + m.b * dphi[j].y, m.b * dphi[j].x + m.c * dphi[j].y};
                for (int i = 0; i < nloc; ++i) local[i * nloc + j] += w * dot(flux, dphi[i]);
            }
        }
        const auto nodes = V.element_nodes(e);
        for (int i = 0; i < nloc; ++i) {
            for (int j = 0; j < nloc; ++j) t.add(nodes[i], nodes[j], local[i * nloc + j]);
        }
    }
    return t;
}

std::vector<double> assemble_load(const DofMap& V, const ScalarFn& fn, int quad_degree)
{
    require_components(V, 1, "assemble_load");
    const Tabulation tab(V.basis(), form_degree(V, quad_degree));
    const Mesh& mesh = V.mesh();

    std::vector<double> out(static_cast<std::size_t>(V.num_dofs()), 0.0);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const ElementGeometry g = element_geometry(mesh, e);
        const auto nodes = V.element_nodes(e);
        for (int q = 0; q < tab.num_points(); ++q) {
            const auto phi = tab.values(q);
            const double f = fn(g.map(tab.rule.points[q])) * tab.rule.weights[q] * g.det;
            for (std::size_t j = 0; j < nodes.size(); ++j) out[nodes[j]] += f * phi[j];
        }
    }
    return out;
}

Triplets assemble_scalar_laplacian(const DofMap& V, int quad_degree)
{
    require_components(V, 1, "assemble_scalar_laplacian");
    const Tabulation tab(V.basis(), form_degree(V, quad_degree));
    const Mesh& mesh = V.mesh();
    const int nloc = tab.nloc;

    Triplets t(V.num_dofs(), V.num_dofs());
    t.reserve(static_cast<std::size_t>(mesh.num_elements()) * nloc * nloc);
    std::vector<double> local(static_cast<std::size_t>(nloc * nloc));
    std::vector<Vec2> dphi;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const ElementGeometry g = element_geometry(mesh, e);
        std::fill(local.begin(), local.end(), 0.0);
        for (int q = 0; q < tab.num_points(); ++q) {
            const double w = tab.rule.weights[q] * g.det;
            tab.physical(g, q, dphi);
            for (int i = 0; i < nloc; ++i) {
                for (int j = 0; j < nloc; ++j) local[i * nloc + j] += w * dot(dphi[i], dphi[j]);
            }
        }
        const auto nodes = V.element_nodes(e);
        for (int i = 0; i < nloc; ++i) {
            for (int j = 0; j < nloc; ++j) t.add(nodes[i], nodes[j], local[i * nloc + j]);
        }
    }
    return t;
}

double error_norm(const Field& field, const ScalarFn& exact, const VectorFn& exact_grad, Norm norm_kind,
                  int quad_degree)
{
    const DofMap& V = field.space();
    require_components(V, 1, "error_norm");
    const bool need_value = norm_kind != Norm::H1Semi;
    const bool need_grad = norm_kind != Norm::L2;
    if (need_grad && !exact_grad) throw InvalidInput("error_norm: H1 norm needs the exact gradient");
    const Tabulation tab(V.basis(), quad_degree > 0 ? quad_degree : default_norm_degree(V.degree()));
    const Mesh& mesh = V.mesh();

    double sum = 0.0;
    std::vector<Vec2> dphi;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const ElementGeometry g = element_geometry(mesh, e);
        for (int q = 0; q < tab.num_points(); ++q) {
            const Point x = g.map(tab.rule.points[q]);
            const double w = tab.rule.weights[q] * g.det;
            if (need_value) {
                const double d = field.value(e, tab.values(q)) - exact(x);
                sum += w * d * d;
            }
            if (need_grad) {
                tab.physical(g, q, dphi);
                const Vec2 d = field.gradient(e, dphi) - exact_grad(x);
                sum += w * dot(d, d);
            }
        }
    }
    return std::sqrt(sum);
}

double error_norm(const Field& field, const TensorFn& exact, const TensorGradFn& exact_grad, Norm norm_kind,
                  int quad_degree)
{
    const DofMap& W = field.space();
    require_components(W, 3, "error_norm");
    const bool need_value = norm_kind != Norm::H1Semi;
    const bool need_grad = norm_kind != Norm::L2;
    if (need_grad && !exact_grad) throw InvalidInput("error_norm: H1 norm needs the exact gradient");
    const Tabulation tab(W.basis(), quad_degree > 0 ? quad_degree : default_norm_degree(W.degree()));
    const Mesh& mesh = W.mesh();

    double sum = 0.0;
    std::vector<Vec2> dphi;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const ElementGeometry g = element_geometry(mesh, e);
        for (int q = 0; q < tab.num_points(); ++q) {
            const Point x = g.map(tab.rule.points[q]);
            const double w = tab.rule.weights[q] * g.det;
            if (need_value) {
                const Sym2 d = field.tensor(e, tab.values(q)) - exact(x);
                sum += w * frobenius(d, d);
            }
            if (need_grad) {
                tab.physical(g, q, dphi);
                const auto ex = exact_grad(x);
                for (int c = 0; c < 3; ++c) {
                    const Vec2 d = field.gradient(e, dphi, c) - ex[c];
                    sum += w * kFrobeniusWeight[c] * dot(d, d);
                }
            }
        }
    }
    return std::sqrt(sum);
}

double min_eigenvalue_monitor(const Field& sigma, int quad_degree)
{
    const DofMap& W = sigma.space();
    require_components(W, 3, "min_eigenvalue_monitor");
    const Tabulation tab(W.basis(), form_degree(W, quad_degree));
    double lo = std::numeric_limits<double>::infinity();
    for (int e = 0; e < W.mesh().num_elements(); ++e) {
        for (int q = 0; q < tab.num_points(); ++q) lo = std::min(lo, min_eigenvalue(sigma.tensor(e, tab.values(q))));
    }
    return lo;
}

}  // namespace mamix
