#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mamix/assembly.hpp"
#include "mamix/linalg.hpp"
#include "mamix/problem.hpp"
#include "mamix/space.hpp"

namespace mamix {

struct NewtonOptions {
    double tolerance = 1e-9;  // on the eps-scaled residual, infinity norm
    int max_iterations = 50;  // per continuation stage
    double backtrack_factor = 0.5;
    double min_step = 0x1p-20;
    double initial_epsilon = 1.0;  // first continuation stage is max(target, this)
    /// When Newton fails from the initial guess, the first stage is retried at
    /// twice its eps up to this many times.
    int max_start_doublings = 4;
    /// A failed later stage is retried after inserting the geometric mean of
    /// it and the last converged eps, up to this many times per solve.
    int max_refinements = 6;
    std::function<void(const std::string&)> log;
};

/// Per-stage convergence record. residuals[0] is the starting residual; one
/// entry is appended per accepted step.
struct StageReport {
    double epsilon = 0.0;
    int iterations = 0;
    int damped_steps = 0;
    bool converged = false;
    std::vector<double> residuals;
    std::vector<double> min_eigenvalues;  // convexity monitor per iterate
    std::string failure;

    double final_residual() const { return residuals.empty() ? 0.0 : residuals.back(); }
    double final_min_eigenvalue() const { return min_eigenvalues.empty() ? 0.0 : min_eigenvalues.back(); }
};

struct SolveReport {
    std::vector<StageReport> stages;     // the accepted path, in solve order
    std::vector<StageReport> abandoned;  // failed attempts that were retried
    bool converged = false;
    double last_converged_epsilon = 0.0;  // 0 when no stage converged
    std::vector<std::string> warnings;

    int total_iterations() const;
    int max_stage_iterations() const;
    double final_residual() const { return stages.empty() ? 0.0 : stages.back().final_residual(); }
    double final_min_eigenvalue() const { return stages.empty() ? 0.0 : stages.back().final_min_eigenvalue(); }
};

struct MixedState {
    Field sigma;
    Field u;
};

/// The discrete mixed problem on one mesh: spaces, the eps-independent
/// matrices M and B, the boundary functional, and the constraint sets.
///
/// Unknowns are ordered [sigma (3N), u (N)] with N scalar dofs. Equations are
/// assembled in the eps-scaled form
///   R1(mu) = (sigma, mu) + (div mu, Du) - <g~, mu>              mu in W_0^h
///   R2(v)  = eps (div sigma, Dv) + (det sigma, v) - (f^eps, v)   v in V_0^h
class MixedDiscretization {
public:
    MixedDiscretization(ProblemSpec problem, std::shared_ptr<const Mesh> mesh, int degree,
                        int quad_degree = 0);

    const ProblemSpec& problem() const { return problem_; }
    const Mesh& mesh() const { return *mesh_; }
    int degree() const { return scalar_->degree(); }
    int quad_degree() const { return quad_degree_; }

    const std::shared_ptr<const DofMap>& tensor_space() const { return tensor_; }
    const std::shared_ptr<const DofMap>& scalar_space() const { return scalar_; }
    int num_tensor_dofs() const { return tensor_->num_dofs(); }
    int num_scalar_dofs() const { return scalar_->num_dofs(); }
    int num_unknowns() const { return num_tensor_dofs() + num_scalar_dofs(); }

    const Triplets& mass_triplets() const { return mass_t_; }
    const Triplets& coupling_triplets() const { return coupling_t_; }
    const CsrMatrix& mass() const { return mass_; }
    const CsrMatrix& coupling() const { return coupling_; }
    const std::vector<double>& boundary_functional() const { return boundary_g_; }

    ConstraintSet sigma_constraints(double eps) const;
    const ConstraintSet& u_constraints() const { return u_constraints_; }
    /// All prescribed unknowns of the combined [sigma, u] vector at eps.
    std::vector<std::pair<int, double>> combined_constraints(double eps) const;

    bool sigma_fixed(int dof) const { return sigma_fixed_[static_cast<std::size_t>(dof)] != 0; }
    bool u_fixed(int dof) const { return u_fixed_[static_cast<std::size_t>(dof)] != 0; }

    std::vector<double> source_load(double eps) const;

    MixedState zero_state() const;
    /// Overwrites constrained coefficients with their prescribed values at eps.
    void impose(MixedState& s, double eps) const;

private:
    ProblemSpec problem_;
    std::shared_ptr<const Mesh> mesh_;
    std::shared_ptr<const DofMap> tensor_;
    std::shared_ptr<const DofMap> scalar_;
    int quad_degree_;
    Triplets mass_t_;
    Triplets coupling_t_;
    CsrMatrix mass_;
    CsrMatrix coupling_;
    std::vector<double> boundary_g_;
    ConstraintSet u_constraints_;
    std::vector<char> sigma_fixed_;
    std::vector<char> u_fixed_;
};

/// Full residual [R1; R2] with constrained rows set to zero.
std::vector<double> mixed_residual(const MixedDiscretization& d, const MixedState& s, double eps);

/// Newton matrix [[M, B], [eps B^T + C(sigma), 0]] with constrained unknowns
/// eliminated (identity rows, zero columns).
Triplets newton_jacobian(const MixedDiscretization& d, const MixedState& s, double eps);

/// Newton correction (delta sigma, delta u) at s; zero on constrained dofs.
std::vector<double> newton_direction(const MixedDiscretization& d, const MixedState& s, double eps);

struct LinearizedSolution {
    Field chi;
    Field w;
    double min_phi_eigenvalue = 0.0;
    std::vector<std::string> warnings;
};

/// Solves (chi, mu) + (div mu, Dw) = 0,
///        (div chi, Dv) - (1/eps)(Phi Dw, Dv) = <q, v>
/// with chi and w constrained as given. q is a scalar load vector.
LinearizedSolution solve_linearized(const Field& phi, double eps, std::span<const double> q,
                                    std::shared_ptr<const DofMap> scalar_space,
                                    const ConstraintSet& chi_constraints,
                                    const ConstraintSet& w_constraints, int quad_degree = 0);

/// Poisson guess Lap u = 2 sqrt(f^eps) with u = g, then sigma from the first
/// mixed equation with the W_eps constraints. Rejects sources that are
/// negative at eps = 0 anywhere on a sample grid.
MixedState initial_guess(const MixedDiscretization& d, double eps);

struct NewtonResult {
    MixedState state;
    StageReport report;
};

NewtonResult newton_solve(const MixedDiscretization& d, double eps, MixedState start,
                          const NewtonOptions& opts = {});

/// eps_start, eps_start/2, eps_start/4, ... while above eps_target, then eps_target.
std::vector<double> continuation_schedule(double eps_start, double eps_target);

struct ContinuationResult {
    MixedState state;  // last converged stage (or the initial guess)
    SolveReport report;
};

ContinuationResult continuation_solve(const MixedDiscretization& d, double eps_target,
                                      const NewtonOptions& opts = {});

/// Continues from a solution at eps_from (not re-solved) down to eps_target.
ContinuationResult continuation_from(const MixedDiscretization& d, MixedState start, double eps_from,
                                     double eps_target, const NewtonOptions& opts = {});

}  // namespace mamix
