#include "mamix/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include <fmt/format.h>

namespace mamix {

namespace {

void note(const StudyOptions& opts, const std::string& msg)
{
    if (opts.log) opts.log(msg);
}

StudyRow measure(const MixedDiscretization& d, const MixedState& s, int nx, double eps, const StudyOptions& opts)
{
    const ProblemSpec& p = d.problem();
    const ExactSolution& ref = p.reference_solution();
    const int qd = opts.norm_degree > 0 ? opts.norm_degree : default_norm_degree(d.degree());
    StudyRow row;
    row.h = mesh_size(d.mesh());
    row.nx = nx;
    row.epsilon = eps;
    row.err_u_l2 = error_norm(s.u, ref.value, ref.gradient, Norm::L2, qd);
    row.err_u_h1 = error_norm(s.u, ref.value, ref.gradient, Norm::H1, qd);
    row.err_sigma_l2 = error_norm(s.sigma, ref.hessian, ref.hessian_gradient, Norm::L2, qd);
    row.err_sigma_h1 = ref.hessian_gradient
                           ? error_norm(s.sigma, ref.hessian, ref.hessian_gradient, Norm::H1, qd)
                           : 0.0;
    return row;
}

std::unique_ptr<MixedDiscretization> discretize(const ProblemSpec& p, int nx, const StudyOptions& opts)
{
    if (nx < 1) throw InvalidInput(fmt::format("nx = {} must be >= 1", nx));
    auto mesh = std::make_shared<const Mesh>(build_rect_mesh(p.domain, nx, nx, opts.pattern));
    return std::make_unique<MixedDiscretization>(p, std::move(mesh), opts.degree, opts.quad_degree);
}

double elapsed_ms(std::chrono::steady_clock::time_point start, const StudyOptions& opts)
{
    if (!opts.record_wall_time) return 0.0;
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

StudyTable make_table(const ProblemSpec& p, const StudyOptions& opts)
{
    for (const auto& w : check_consistency(p).warnings) note(opts, w);
    StudyTable t;
    t.problem = p.name;
    t.degree = opts.degree;
    t.reference = p.reference();
    t.notes.push_back(fmt::format("errors measured against {}", to_string(t.reference)));
    return t;
}

void flag(StudyTable& t, const StudyRow& row, const SolveReport& rep)
{
    if (row.converged) return;
    t.notes.push_back(fmt::format("nx={} eps={:.6g}: not converged (last converged eps {:.6g})", row.nx,
                                  row.epsilon, rep.last_converged_epsilon));
}

void require_positive(const std::vector<double>& eps_list)
{
    if (eps_list.empty()) throw InvalidInput("eps list is empty");
    for (double e : eps_list) {
        if (!(e > 0.0) || !std::isfinite(e)) throw InvalidInput(fmt::format("eps = {} must be positive", e));
    }
}

}  // namespace

StudyRow solve_row(const ProblemSpec& p, int nx, double eps, const StudyOptions& opts, SolveReport* report)
{
    const auto start = std::chrono::steady_clock::now();
    const auto d = discretize(p, nx, opts);
    ContinuationResult res = continuation_solve(*d, eps, opts.newton);
    StudyRow row = measure(*d, res.state, nx, eps, opts);
    row.newton_iters = res.report.total_iterations();
    row.converged = res.report.converged;
    row.wall_ms = elapsed_ms(start, opts);
    note(opts, fmt::format("{} nx={} eps={:.6g}: iters={} err_u_L2={:.4e} converged={}", p.name, nx, eps,
                           row.newton_iters, row.err_u_l2, row.converged));
    if (report) *report = std::move(res.report);
    return row;
}

StudyTable run_h_study(const ProblemSpec& p, double eps, std::vector<int> nx_list, const StudyOptions& opts)
{
    require_positive({eps});
    if (nx_list.empty()) throw InvalidInput("nx list is empty");
    StudyTable t = make_table(p, opts);
    std::stable_sort(nx_list.begin(), nx_list.end());
    for (int nx : nx_list) {
        SolveReport rep;
        t.rows.push_back(solve_row(p, nx, eps, opts, &rep));
        flag(t, t.rows.back(), rep);
        t.reports.push_back(std::move(rep));
    }
    return t;
}

StudyTable run_eps_study(const ProblemSpec& p, int nx, std::vector<double> eps_list, const StudyOptions& opts)
{
    require_positive(eps_list);
    StudyTable t = make_table(p, opts);
    std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
    const auto d = discretize(p, nx, opts);

    std::optional<MixedState> state;
    double eps_prev = 0.0;
    for (double eps : eps_list) {
        const auto start = std::chrono::steady_clock::now();
        ContinuationResult res = state ? continuation_from(*d, *state, eps_prev, eps, opts.newton)
                                       : continuation_solve(*d, eps, opts.newton);
        StudyRow row = measure(*d, res.state, nx, eps, opts);
        row.newton_iters = res.report.total_iterations();
        row.converged = res.report.converged;
        row.wall_ms = elapsed_ms(start, opts);
        note(opts, fmt::format("{} nx={} eps={:.6g}: iters={} err_u_L2={:.4e} converged={}", p.name, nx, eps,
                               row.newton_iters, row.err_u_l2, row.converged));
        if (res.report.last_converged_epsilon > 0.0) {
            state = res.state;
            eps_prev = res.report.last_converged_epsilon;
        }
        flag(t, row, res.report);
        t.rows.push_back(row);
        t.reports.push_back(std::move(res.report));
    }
    return t;
}

int relation_nx(double eps, double gamma)
{
    if (!(eps > 0.0) || !(gamma > 0.0)) {
        throw InvalidInput(fmt::format("relation: eps = {} and gamma = {} must be positive", eps, gamma));
    }
    return static_cast<int>(std::lround(std::pow(eps, -gamma)));
}

StudyTable run_relation_study(const ProblemSpec& p, double gamma, std::vector<double> eps_list,
                              const StudyOptions& opts)
{
    require_positive(eps_list);
    StudyTable t = make_table(p, opts);
    std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
    t.notes.push_back(fmt::format("relation h = eps^{:g}, nx = round(eps^-{:g}), nx cap {}", gamma, gamma,
                                  opts.nx_cap));
    t.notes.push_back(fmt::format("eps range [{:g}, {:g}]; sweeps stop at 5e-3 at desk scale", eps_list.back(),
                                  eps_list.front()));
    for (double eps : eps_list) {
        const int nx = relation_nx(eps, gamma);
        if (nx > opts.nx_cap) {
            t.skipped.push_back({eps, nx, fmt::format("nx = {} exceeds cap {}", nx, opts.nx_cap)});
            t.notes.push_back(fmt::format("skipped eps={:g}: nx = {} exceeds cap {}", eps, nx, opts.nx_cap));
            continue;
        }
        SolveReport rep;
        t.rows.push_back(solve_row(p, std::max(nx, 1), eps, opts, &rep));
        flag(t, t.rows.back(), rep);
        t.reports.push_back(std::move(rep));
    }
    return t;
}

PowerFit fit_power(const std::vector<double>& xs, const std::vector<double>& ys, std::optional<double> fixed_alpha)
{
    if (xs.size() != ys.size()) {
        throw InvalidInput(fmt::format("fit_power: {} x values but {} y values", xs.size(), ys.size()));
    }
    if (xs.size() < 2) throw InvalidInput("fit_power: at least 2 points are required");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
            throw InvalidInput(fmt::format("fit_power: non-positive data ({}, {})", xs[i], ys[i]));
        }
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(ys[i]));
    }
    const double n = static_cast<double>(lx.size());
    if (fixed_alpha) {
        double s = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) s += ly[i] - *fixed_alpha * lx[i];
        return {*fixed_alpha, std::exp(s / n)};
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw InvalidInput("fit_power: all x values coincide");
    const double alpha = sxy / sxx;
    return {alpha, std::exp(my - alpha * mx)};
}

std::vector<double> observed_orders(const std::vector<double>& xs, const std::vector<double>& es)
{
    if (xs.size() != es.size()) throw InvalidInput("observed_orders: size mismatch");
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        out.push_back(std::log(es[i] / es[i + 1]) / std::log(xs[i] / xs[i + 1]));
    }
    return out;
}

std::vector<double> column(const StudyTable& t, const std::string& name)
{
    const auto& cols = csv_columns();
    if (std::find(cols.begin(), cols.end(), name) == cols.end()) {
        throw InvalidInput(fmt::format("unknown column '{}'", name));
    }
    std::vector<double> out;
    out.reserve(t.rows.size());
    for (const StudyRow& r : t.rows) {
        if (name == "h") out.push_back(r.h);
        else if (name == "nx") out.push_back(r.nx);
        else if (name == "epsilon") out.push_back(r.epsilon);
        else if (name == "err_u_L2") out.push_back(r.err_u_l2);
        else if (name == "err_u_H1") out.push_back(r.err_u_h1);
        else if (name == "err_sigma_L2") out.push_back(r.err_sigma_l2);
        else if (name == "err_sigma_H1") out.push_back(r.err_sigma_h1);
        else if (name == "newton_iters") out.push_back(r.newton_iters);
        else out.push_back(r.wall_ms);
    }
    return out;
}

}  // namespace mamix
