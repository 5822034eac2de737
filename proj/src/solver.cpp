#include "mamix/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <fmt/format.h>

namespace mamix {

int SolveReport::total_iterations() const
{
    int n = 0;
    for (const auto& s : stages) n += s.iterations;
    return n;
}

int SolveReport::max_stage_iterations() const
{
    int n = 0;
    for (const auto& s : stages) n = std::max(n, s.iterations);
    return n;
}

MixedDiscretization::MixedDiscretization(ProblemSpec problem, std::shared_ptr<const Mesh> mesh, int degree,
                                         int quad_degree)
    : problem_(std::move(problem)), mesh_(std::move(mesh))
{
    const Rect& pr = problem_.domain;
    const Rect& mr = mesh_->rect();
    if (pr.ax != mr.ax || pr.bx != mr.bx || pr.ay != mr.ay || pr.by != mr.by) {
        throw InvalidInput(fmt::format("problem '{}' domain does not match the mesh rectangle", problem_.name));
    }
    tensor_ = build_space(mesh_, degree, 3);
    scalar_ = build_space(mesh_, degree, 1);
    quad_degree_ = quad_degree > 0 ? quad_degree : default_form_degree(degree);

    mass_t_ = assemble_mass(*tensor_, quad_degree_);
    coupling_t_ = assemble_div_coupling(*tensor_, *scalar_, quad_degree_);
    mass_ = to_csr(mass_t_);
    coupling_ = to_csr(coupling_t_);
    boundary_g_ = assemble_boundary_g(*tensor_, problem_.grad_g);
    u_constraints_ = constraints_u(*scalar_, problem_.g);

    sigma_fixed_.assign(static_cast<std::size_t>(tensor_->num_dofs()), 0);
    const ConstraintSet sc = sigma_constraints(1.0);
    for (const auto& [dof, v] : sc.entries()) sigma_fixed_[dof] = 1;
    u_fixed_.assign(static_cast<std::size_t>(scalar_->num_dofs()), 0);
    for (const auto& [dof, v] : u_constraints_.entries()) u_fixed_[dof] = 1;
}

ConstraintSet MixedDiscretization::sigma_constraints(double eps) const
{
    return constraints_sigma(*tensor_, [&](Point x, Side side) {
        return sigma_boundary_value(problem_, x, side, eps);
    });
}

std::vector<std::pair<int, double>> MixedDiscretization::combined_constraints(double eps) const
{
    std::vector<std::pair<int, double>> all = sigma_constraints(eps).entries();
    const int offset = num_tensor_dofs();
    for (const auto& [dof, v] : u_constraints_.entries()) all.emplace_back(offset + dof, v);
    return all;
}

std::vector<double> MixedDiscretization::source_load(double eps) const
{
    return assemble_load(*scalar_, [&](Point x) { return problem_.source(x, eps); }, quad_degree_);
}

MixedState MixedDiscretization::zero_state() const { return {Field(tensor_), Field(scalar_)}; }

void MixedDiscretization::impose(MixedState& s, double eps) const
{
    sigma_constraints(eps).apply(s.sigma.values());
    u_constraints_.apply(s.u.values());
}

namespace {

std::vector<double> residual_with_load(const MixedDiscretization& d, const MixedState& s, double eps,
                                       std::span<const double> load)
{
    const int nt = d.num_tensor_dofs();
    const int ns = d.num_scalar_dofs();
    std::vector<double> r(static_cast<std::size_t>(nt + ns), 0.0);
    std::span<double> r1(r.data(), static_cast<std::size_t>(nt));
    std::span<double> r2(r.data() + nt, static_cast<std::size_t>(ns));

    spmv_add(d.mass(), s.sigma.values(), 1.0, r1);
    spmv_add(d.coupling(), s.u.values(), 1.0, r1);
    const auto& g = d.boundary_functional();
    for (int i = 0; i < nt; ++i) r1[i] -= g[i];

    const std::vector<double> bt_sigma = transpose_spmv(d.coupling(), s.sigma.values());
    const std::vector<double> det = assemble_det_residual(s.sigma, *d.scalar_space(), d.quad_degree());
    for (int j = 0; j < ns; ++j) r2[j] = eps * bt_sigma[j] + det[j] - load[j];

    for (int i = 0; i < nt; ++i) {
        if (d.sigma_fixed(i)) r1[i] = 0.0;
    }
    for (int j = 0; j < ns; ++j) {
        if (d.u_fixed(j)) r2[j] = 0.0;
    }
    return r;
}

void axpy_state(MixedState& s, double alpha, std::span<const double> delta)
{
    auto& sv = s.sigma.values();
    auto& uv = s.u.values();
    for (std::size_t i = 0; i < sv.size(); ++i) sv[i] += alpha * delta[i];
    for (std::size_t j = 0; j < uv.size(); ++j) uv[j] += alpha * delta[sv.size() + j];
}

void log(const NewtonOptions& opts, const std::string& msg)
{
    if (opts.log) opts.log(msg);
}

std::vector<double> solve_direction(const MixedDiscretization& d, const MixedState& s, double eps,
                                    std::span<const double> residual)
{
    std::vector<double> rhs(residual.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -residual[i];
    const Triplets j = newton_jacobian(d, s, eps);
    return lu_solve(to_csr(j), rhs);
}

}  // namespace

std::vector<double> mixed_residual(const MixedDiscretization& d, const MixedState& s, double eps)
{
    return residual_with_load(d, s, eps, d.source_load(eps));
}

Triplets newton_jacobian(const MixedDiscretization& d, const MixedState& s, double eps)
{
    const int nt = d.num_tensor_dofs();
    const int n = d.num_unknowns();
    const Triplets c = assemble_cof_jacobian(s.sigma, *d.scalar_space(), d.quad_degree());

    Triplets j(n, n);
    j.reserve(d.mass_triplets().entries().size() + 2 * d.coupling_triplets().entries().size() +
              c.entries().size());
    for (const Triplet& t : d.mass_triplets().entries()) j.add(t.row, t.col, t.value);
    for (const Triplet& t : d.coupling_triplets().entries()) {
        j.add(t.row, nt + t.col, t.value);
        j.add(nt + t.col, t.row, eps * t.value);
    }
    for (const Triplet& t : c.entries()) j.add(nt + t.row, t.col, t.value);

    // Newton corrections vanish on constrained dofs.
    auto fixed = d.combined_constraints(eps);
    for (auto& entry : fixed) entry.second = 0.0;
    std::vector<double> unused(static_cast<std::size_t>(n), 0.0);
    return eliminate(j, fixed, unused);
}

std::vector<double> newton_direction(const MixedDiscretization& d, const MixedState& s, double eps)
{
    const std::vector<double> r = mixed_residual(d, s, eps);
    return solve_direction(d, s, eps, r);
}

LinearizedSolution solve_linearized(const Field& phi, double eps, std::span<const double> q,
                                    std::shared_ptr<const DofMap> scalar_space,
                                    const ConstraintSet& chi_constraints,
                                    const ConstraintSet& w_constraints, int quad_degree)
{
    if (!(eps > 0.0)) throw InvalidInput(fmt::format("solve_linearized: eps = {} must be positive", eps));
    const auto& W = phi.space_ptr();
    const DofMap& V = *scalar_space;
    if (static_cast<int>(q.size()) != V.num_dofs()) {
        throw InvalidInput(fmt::format("solve_linearized: load of {} for {} scalar dofs", q.size(), V.num_dofs()));
    }
    const int nt = W->num_dofs();
    const int n = nt + V.num_dofs();

    LinearizedSolution out{Field(W), Field(scalar_space), 0.0, {}};
    out.min_phi_eigenvalue = min_eigenvalue_monitor(phi, quad_degree);
    if (!(out.min_phi_eigenvalue > 0.0)) {
        out.warnings.push_back(fmt::format("Phi is not positive definite (min eigenvalue {:.3e})",
                                           out.min_phi_eigenvalue));
    }

    const Triplets m = assemble_mass(*W, quad_degree);
    const Triplets b = assemble_div_coupling(*W, V, quad_degree);
    const Triplets s = assemble_phi_grad(phi, V, quad_degree);

    Triplets a(n, n);
    a.reserve(m.entries().size() + 2 * b.entries().size() + s.entries().size());
    for (const Triplet& t : m.entries()) a.add(t.row, t.col, t.value);
    for (const Triplet& t : b.entries()) {
        a.add(t.row, nt + t.col, t.value);
        a.add(nt + t.col, t.row, t.value);
    }
    for (const Triplet& t : s.entries()) a.add(nt + t.row, nt + t.col, -t.value / eps);

    std::vector<double> rhs(static_cast<std::size_t>(n), 0.0);
    std::copy(q.begin(), q.end(), rhs.begin() + nt);
    std::vector<std::pair<int, double>> fixed = chi_constraints.entries();
    for (const auto& [dof, v] : w_constraints.entries()) fixed.emplace_back(nt + dof, v);

    const Triplets reduced = eliminate(a, fixed, rhs);
    const std::vector<double> x = lu_solve(to_csr(reduced), rhs);
    std::copy(x.begin(), x.begin() + nt, out.chi.values().begin());
    std::copy(x.begin() + nt, x.end(), out.w.values().begin());
    return out;
}

MixedState initial_guess(const MixedDiscretization& d, double eps)
{
    const ProblemSpec& p = d.problem();
    const Rect& r = p.domain;
    constexpr int kGrid = 21;
    for (int j = 0; j < kGrid; ++j) {
        for (int i = 0; i < kGrid; ++i) {
            const Point x{r.ax + (r.bx - r.ax) * i / (kGrid - 1), r.ay + (r.by - r.ay) * j / (kGrid - 1)};
            const double f = p.source(x, 0.0);
            if (f < 0.0) {
                throw InvalidInput(fmt::format("initial_guess: problem '{}' has f = {} < 0 at ({}, {})", p.name,
                                               f, x.x, x.y));
            }
        }
    }

    MixedState s = d.zero_state();
    const DofMap& V = *d.scalar_space();

    // Lap u = 2 sqrt(f): in 2-D det(D^2 u) ~ (Lap u / 2)^2.
    std::vector<double> rhs = assemble_load(
        V, [&](Point x) { return -2.0 * std::sqrt(std::max(p.source(x, eps), 0.0)); }, d.quad_degree());
    const Triplets k = eliminate(assemble_scalar_laplacian(V, d.quad_degree()), d.u_constraints().entries(), rhs);
    s.u.values() = lu_solve(to_csr(k), rhs);

    // M sigma = <g~, mu> - B u over W_0^h with sigma n.n prescribed.
    std::vector<double> srhs = d.boundary_functional();
    spmv_add(d.coupling(), s.u.values(), -1.0, srhs);
    const ConstraintSet sc = d.sigma_constraints(eps);
    const Triplets m = eliminate(d.mass_triplets(), sc.entries(), srhs);
    s.sigma.values() = lu_solve(to_csr(m), srhs);
    return s;
}

NewtonResult newton_solve(const MixedDiscretization& d, double eps, MixedState start, const NewtonOptions& opts)
{
    if (!(eps > 0.0)) throw InvalidInput(fmt::format("newton_solve: eps = {} must be positive", eps));
    if (!(opts.tolerance > 0.0) || opts.max_iterations < 1) {
        throw InvalidInput("newton_solve: tolerance must be > 0 and max_iterations >= 1");
    }

    NewtonResult out{std::move(start), {}};
    StageReport& rep = out.report;
    rep.epsilon = eps;
    MixedState& s = out.state;
    d.impose(s, eps);

    const std::vector<double> load = d.source_load(eps);
    std::vector<double> r = residual_with_load(d, s, eps, load);
    double rn = norm_inf(r);
    rep.residuals.push_back(rn);
    rep.min_eigenvalues.push_back(min_eigenvalue_monitor(s.sigma, d.quad_degree()));
    log(opts, fmt::format("eps={:.6g} it=0 residual={:.3e}", eps, rn));

    while (rn > opts.tolerance) {
        if (rep.iterations >= opts.max_iterations) {
            rep.failure = fmt::format("no convergence in {} iterations", opts.max_iterations);
            break;
        }
        const std::vector<double> delta = solve_direction(d, s, eps, r);

        double alpha = 1.0;
        bool accepted = false;
        while (alpha >= opts.min_step) {
            MixedState trial = s;
            axpy_state(trial, alpha, delta);
            std::vector<double> rt = residual_with_load(d, trial, eps, load);
            const double rtn = norm_inf(rt);
            if (rtn < rn) {
                s = std::move(trial);
                r = std::move(rt);
                rn = rtn;
                accepted = true;
                break;
            }
            alpha *= opts.backtrack_factor;
        }
        if (!accepted) {
            rep.failure = fmt::format("backtracking failed at residual {:.3e}", rn);
            break;
        }
        ++rep.iterations;
        if (alpha < 1.0) ++rep.damped_steps;
        rep.residuals.push_back(rn);
        rep.min_eigenvalues.push_back(min_eigenvalue_monitor(s.sigma, d.quad_degree()));
        log(opts, fmt::format("eps={:.6g} it={} residual={:.3e} step={:g} min_eig={:.3e}", eps, rep.iterations,
                              rn, alpha, rep.min_eigenvalues.back()));
    }
    rep.converged = rn <= opts.tolerance;
    return out;
}

std::vector<double> continuation_schedule(double eps_start, double eps_target)
{
    if (!(eps_target > 0.0) || !(eps_start > 0.0)) {
        throw InvalidInput(fmt::format("continuation: eps values must be positive ({}, {})", eps_start, eps_target));
    }
    std::vector<double> schedule{eps_start};
    double e = eps_start;
    while (e / 2 > eps_target) {
        e /= 2;
        schedule.push_back(e);
    }
    if (schedule.back() != eps_target) schedule.push_back(eps_target);
    return schedule;
}

namespace {

void finish(SolveReport& report)
{
    if (!report.converged) return;
    const double lo = report.final_min_eigenvalue();
    if (!(lo > 0.0)) {
        report.warnings.push_back(fmt::format("sigma_h is not positive definite (min eigenvalue {:.3e})", lo));
    }
}

// Runs the stages in order starting from a state converged at eps_prev.
void run_stages(const MixedDiscretization& d, ContinuationResult& out, double eps_prev,
                std::span<const double> stages, const NewtonOptions& opts)
{
    std::deque<double> todo(stages.begin(), stages.end());
    int refinements = 0;
    out.report.converged = true;
    while (!todo.empty()) {
        const double eps = todo.front();
        NewtonResult nr = newton_solve(d, eps, out.state, opts);
        if (nr.report.converged) {
            todo.pop_front();
            out.state = std::move(nr.state);
            out.report.stages.push_back(std::move(nr.report));
            out.report.last_converged_epsilon = eps;
            eps_prev = eps;
            continue;
        }
        out.report.warnings.push_back(fmt::format("stage eps={:.6g} failed: {}", eps, nr.report.failure));
        out.report.abandoned.push_back(std::move(nr.report));
        const double mid = std::sqrt(eps_prev * eps);
        if (refinements >= opts.max_refinements || !(mid > eps && mid < eps_prev)) {
            out.report.converged = false;
            return;
        }
        ++refinements;
        log(opts, fmt::format("refining continuation: inserting eps={:.6g}", mid));
        todo.push_front(mid);
    }
}

}  // namespace

ContinuationResult continuation_solve(const MixedDiscretization& d, double eps_target, const NewtonOptions& opts)
{
    double eps0 = std::max(eps_target, opts.initial_epsilon);
    continuation_schedule(eps0, eps_target);  // validates both values

    ContinuationResult out{initial_guess(d, eps0), {}};
    for (int attempt = 0;; ++attempt) {
        NewtonResult nr = newton_solve(d, eps0, out.state, opts);
        if (nr.report.converged) {
            out.state = std::move(nr.state);
            out.report.stages.push_back(std::move(nr.report));
            out.report.last_converged_epsilon = eps0;
            break;
        }
        out.report.warnings.push_back(
            fmt::format("first stage eps={:.6g} failed from the initial guess: {}", eps0, nr.report.failure));
        out.report.abandoned.push_back(std::move(nr.report));
        if (attempt >= opts.max_start_doublings) {
            out.report.converged = false;
            return out;
        }
        eps0 *= 2;
        log(opts, fmt::format("restarting continuation at eps={:.6g}", eps0));
        out.state = initial_guess(d, eps0);
    }

    std::vector<double> schedule = continuation_schedule(eps0, eps_target);
    schedule.erase(schedule.begin());
    run_stages(d, out, eps0, schedule, opts);
    finish(out.report);
    return out;
}

ContinuationResult continuation_from(const MixedDiscretization& d, MixedState start, double eps_from,
                                     double eps_target, const NewtonOptions& opts)
{
    std::vector<double> schedule = continuation_schedule(eps_from, eps_target);
    schedule.erase(schedule.begin());
    if (schedule.empty()) schedule.push_back(eps_target);
    ContinuationResult out{std::move(start), {}};
    out.report.last_converged_epsilon = eps_from;
    run_stages(d, out, eps_from, schedule, opts);
    finish(out.report);
    return out;
}

}  // namespace mamix
