// Command-line driver: single solves, the three sweep studies, and power fits.
//
// Exit codes: 0 success, 2 solver did not converge, 3 invalid input.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "mamix/problem.hpp"
#include "mamix/solver.hpp"
#include "mamix/study.hpp"

namespace {

constexpr int kExitNotConverged = 2;
constexpr int kExitInvalid = 3;

struct Globals {
    double tol = 1e-9;
    int max_iters = 50;
    int quad_degree = 0;
    unsigned seed = 0;
    bool verbose = false;
    bool no_timing = false;
    std::string pattern = "forward";
};

mamix::DiagonalPattern parse_pattern(const std::string& s)
{
    if (s == "forward") return mamix::DiagonalPattern::Forward;
    if (s == "backward") return mamix::DiagonalPattern::Backward;
    if (s == "alternating") return mamix::DiagonalPattern::Alternating;
    throw mamix::InvalidInput(fmt::format("unknown mesh pattern '{}'", s));
}

mamix::StudyOptions study_options(const Globals& g, int k)
{
    mamix::StudyOptions o;
    o.degree = k;
    o.quad_degree = g.quad_degree;
    o.pattern = parse_pattern(g.pattern);
    o.record_wall_time = !g.no_timing;
    o.newton.tolerance = g.tol;
    o.newton.max_iterations = g.max_iters;
    if (g.verbose) {
        auto log = [](const std::string& m) { std::cerr << m << '\n'; };
        o.newton.log = log;
        o.log = log;
    }
    return o;
}

void print_table(const mamix::StudyTable& t, const std::string& sweep)
{
    fmt::print("# problem {} k={} reference {}\n", t.problem, t.degree, mamix::to_string(t.reference));
    for (const auto& n : t.notes) fmt::print("# {}\n", n);
    fmt::print("{:>6} {:>10} {:>11} {:>12} {:>12} {:>12} {:>12} {:>6}\n", "nx", "h", "eps", "err_u_L2",
               "err_u_H1", "err_sig_L2", "err_sig_H1", "iters");
    for (const auto& r : t.rows) {
        fmt::print("{:>6} {:>10.4g} {:>11.5g} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>6}{}\n", r.nx, r.h,
                   r.epsilon, r.err_u_l2, r.err_u_h1, r.err_sigma_l2, r.err_sigma_h1, r.newton_iters,
                   r.converged ? "" : "  NOT CONVERGED");
    }
    if (t.rows.size() < 2) return;
    const auto x = mamix::column(t, sweep);
    for (const char* c : {"err_u_L2", "err_u_H1", "err_sigma_L2", "err_sigma_H1"}) {
        const auto y = mamix::column(t, c);
        std::string orders;
        for (double o : mamix::observed_orders(x, y)) orders += fmt::format(" {:.3f}", o);
        try {
            const auto fit = mamix::fit_power(x, y);
            fmt::print("# {} vs {}: fit alpha={:.4f} beta={:.4e}; pairwise orders{}\n", c, sweep, fit.alpha,
                       fit.beta, orders);
        } catch (const mamix::InvalidInput&) {
            fmt::print("# {} vs {}: no fit (non-positive data)\n", c, sweep);
        }
    }
}

bool all_converged(const mamix::StudyTable& t)
{
    for (const auto& r : t.rows) {
        if (!r.converged) return false;
    }
    return true;
}

std::vector<int> parse_int_list(const std::string& s)
{
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        const int v = std::stoi(item, &pos);
        if (pos != item.size()) throw mamix::InvalidInput(fmt::format("bad integer '{}'", item));
        out.push_back(v);
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        const double v = std::stod(item, &pos);
        if (pos != item.size()) throw mamix::InvalidInput(fmt::format("bad number '{}'", item));
        out.push_back(v);
    }
    return out;
}

int finish_study(const mamix::StudyTable& t, const std::string& sweep, const std::string& csv)
{
    print_table(t, sweep);
    if (!csv.empty()) mamix::emit_csv(t, csv);
    return all_converged(t) ? 0 : kExitNotConverged;
}

// Writes sigma then u as two field blocks.
void write_state(const std::string& path, const mamix::MixedState& s)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
    mamix::write_field(out, s.sigma);
    mamix::write_field(out, s.u);
    if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", path));
}

mamix::MixedState read_state(const std::string& path, const mamix::MixedDiscretization& d)
{
    std::ifstream in(path);
    if (!in) throw mamix::InvalidInput(fmt::format("cannot open '{}'", path));
    mamix::Field sigma = mamix::read_field(in, d.tensor_space());
    mamix::Field u = mamix::read_field(in, d.scalar_space());
    return {std::move(sigma), std::move(u)};
}

// Randomized self-check of the Newton Jacobian against central differences.
int run_check(const Globals& g, const std::string& problem, int nx, int k, double eps)
{
    const auto p = mamix::builtin_problem(problem);
    auto mesh = std::make_shared<const mamix::Mesh>(mamix::build_rect_mesh(p.domain, nx, nx, parse_pattern(g.pattern)));
    const mamix::MixedDiscretization d(p, mesh, k, g.quad_degree);
    std::mt19937_64 rng(g.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);

    mamix::MixedState s = mamix::initial_guess(d, eps);
    for (auto& v : s.sigma.values()) v += 0.1 * dist(rng);
    for (auto& v : s.u.values()) v += 0.1 * dist(rng);
    d.impose(s, eps);

    std::vector<double> dir(static_cast<std::size_t>(d.num_unknowns()));
    for (auto& v : dir) v = dist(rng);
    const auto fixed = d.combined_constraints(eps);
    for (const auto& [dof, val] : fixed) dir[static_cast<std::size_t>(dof)] = 0.0;

    const auto jv = mamix::spmv(mamix::to_csr(mamix::newton_jacobian(d, s, eps)), dir);
    constexpr double kStep = 1e-6;
    auto shifted = [&](double t) {
        mamix::MixedState x = s;
        const std::size_t nt = x.sigma.values().size();
        for (std::size_t i = 0; i < nt; ++i) x.sigma.values()[i] += t * dir[i];
        for (std::size_t j = 0; j < x.u.values().size(); ++j) x.u.values()[j] += t * dir[nt + j];
        return mamix::mixed_residual(d, x, eps);
    };
    const auto rp = shifted(kStep), rm = shifted(-kStep);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < jv.size(); ++i) {
        const double fd = (rp[i] - rm[i]) / (2 * kStep);
        const int row = static_cast<int>(i);
        const bool fixed_row =
            row < d.num_tensor_dofs() ? d.sigma_fixed(row) : d.u_fixed(row - d.num_tensor_dofs());
        const double exact = fixed_row ? 0.0 : jv[i];
        num = std::max(num, std::abs(fd - exact));
        den = std::max(den, std::abs(fd));
    }
    const double rel = num / std::max(den, 1e-300);
    fmt::print("jacobian check: seed={} relative error {:.3e}\n", g.seed, rel);
    return rel <= 1e-6 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mixed finite element solver for the regularized Monge-Ampere equation"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--tol", g.tol, "Newton tolerance on the residual infinity norm")->capture_default_str();
    app.add_option("--max-iters", g.max_iters, "Newton iterations per continuation stage")->capture_default_str();
    app.add_option("--quad-degree", g.quad_degree, "Quadrature degree for forms (0 selects 3k)");
    app.add_option("--seed", g.seed, "Seed for randomized checks")->capture_default_str();
    app.add_option("--pattern", g.pattern, "Mesh diagonal: forward, backward, alternating")->capture_default_str();
    app.add_flag("--verbose,-v", g.verbose, "Log Newton iterations to stderr");
    app.add_flag("--no-timing", g.no_timing, "Write wall_ms = 0 for reproducible CSV output");

    std::string problem;
    double eps = 0.0;
    int nx = 0;
    int k = 2;
    std::string out, init, csv, nx_list, eps_list;
    double init_eps = 0.0;
    double gamma = 0.5;
    int nx_cap = 128;

    auto* solve = app.add_subcommand("solve", "Continuation solve on one mesh");
    solve->add_option("--problem", problem)->required();
    solve->add_option("--eps", eps)->required();
    solve->add_option("--nx", nx)->required();
    solve->add_option("--k", k)->check(CLI::Range(2, 8));
    solve->add_option("--out", out, "Write sigma and u fields");
    solve->add_option("--init", init, "Warm start from fields written by --out");
    solve->add_option("--init-eps", init_eps, "eps at which --init was computed");

    auto* study_h = app.add_subcommand("study-h", "Fixed eps, mesh refinement");
    study_h->add_option("--problem", problem)->required();
    study_h->add_option("--eps", eps)->required();
    study_h->add_option("--nx-list", nx_list)->required();
    study_h->add_option("--k", k)->check(CLI::Range(2, 8));
    study_h->add_option("--csv", csv);

    auto* study_eps = app.add_subcommand("study-eps", "Fixed mesh, decreasing eps");
    study_eps->add_option("--problem", problem)->required();
    study_eps->add_option("--nx", nx)->required();
    study_eps->add_option("--eps-list", eps_list)->required();
    study_eps->add_option("--k", k)->check(CLI::Range(2, 8));
    study_eps->add_option("--csv", csv);

    auto* study_rel = app.add_subcommand("study-relation", "Mesh tied to eps by h = eps^gamma");
    study_rel->add_option("--problem", problem)->required();
    study_rel->add_option("--gamma", gamma)->required();
    study_rel->add_option("--eps-list", eps_list)->required();
    study_rel->add_option("--k", k)->check(CLI::Range(2, 8));
    study_rel->add_option("--nx-cap", nx_cap)->capture_default_str();
    study_rel->add_option("--csv", csv);

    std::string x_col, y_col;
    std::optional<double> alpha;
    auto* fit = app.add_subcommand("fit", "Fit y = beta x^alpha to two CSV columns");
    fit->add_option("--csv", csv)->required();
    fit->add_option("--x-col", x_col)->required();
    fit->add_option("--y-col", y_col)->required();
    fit->add_option("--alpha", alpha, "Fix alpha and fit beta only");

    auto* check = app.add_subcommand("check", "Randomized Jacobian and problem consistency check");
    check->add_option("--problem", problem)->required();
    check->add_option("--nx", nx)->default_val(4);
    check->add_option("--eps", eps)->default_val(0.1);
    check->add_option("--k", k)->check(CLI::Range(2, 8));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            const auto p = mamix::builtin_problem(problem);
            const auto opts = study_options(g, k);
            auto mesh = std::make_shared<const mamix::Mesh>(mamix::build_rect_mesh(p.domain, nx, nx, opts.pattern));
            const mamix::MixedDiscretization d(p, mesh, k, g.quad_degree);
            mamix::ContinuationResult res =
                init.empty() ? mamix::continuation_solve(d, eps, opts.newton)
                             : mamix::continuation_from(d, read_state(init, d), init_eps > 0 ? init_eps : eps, eps,
                                                        opts.newton);
            for (const auto& st : res.report.stages) {
                fmt::print("eps={:<10.6g} iterations={:<3} damped={:<3} residual={:.3e} min_eig={:.4e}{}\n",
                           st.epsilon, st.iterations, st.damped_steps, st.final_residual(),
                           st.final_min_eigenvalue(), st.converged ? "" : "  FAILED: " + st.failure);
            }
            for (const auto& w : res.report.warnings) fmt::print("warning: {}\n", w);
            if (p.exact_u0 || p.exact_ueps) {
                const auto& ref = p.reference_solution();
                const int qd = mamix::default_norm_degree(k);
                fmt::print("errors vs {}: u L2 {:.6e}  u H1 {:.6e}  sigma L2 {:.6e}\n",
                           mamix::to_string(p.reference()),
                           mamix::error_norm(res.state.u, ref.value, ref.gradient, mamix::Norm::L2, qd),
                           mamix::error_norm(res.state.u, ref.value, ref.gradient, mamix::Norm::H1, qd),
                           mamix::error_norm(res.state.sigma, ref.hessian, ref.hessian_gradient, mamix::Norm::L2,
                                             qd));
            }
            if (!out.empty()) write_state(out, res.state);
            return res.report.converged ? 0 : kExitNotConverged;
        }
        if (*study_h) {
            const auto p = mamix::builtin_problem(problem);
            return finish_study(mamix::run_h_study(p, eps, parse_int_list(nx_list), study_options(g, k)), "h", csv);
        }
        if (*study_eps) {
            const auto p = mamix::builtin_problem(problem);
            return finish_study(mamix::run_eps_study(p, nx, parse_double_list(eps_list), study_options(g, k)),
                                "epsilon", csv);
        }
        if (*study_rel) {
            const auto p = mamix::builtin_problem(problem);
            auto opts = study_options(g, k);
            opts.nx_cap = nx_cap;
            return finish_study(mamix::run_relation_study(p, gamma, parse_double_list(eps_list), opts), "epsilon",
                                csv);
        }
        if (*fit) {
            const auto t = mamix::read_csv(std::filesystem::path(csv));
            const auto r = mamix::fit_power(mamix::column(t, x_col), mamix::column(t, y_col), alpha);
            fmt::print("alpha={:.17g} beta={:.17g}\n", r.alpha, r.beta);
            return 0;
        }
        if (*check) {
            const auto p = mamix::builtin_problem(problem);
            const auto rep = mamix::check_consistency(p);
            fmt::print("consistency: {} samples, max defect {:.3e}, min f {:.4g}\n", rep.samples, rep.max_defect,
                       rep.min_source);
            for (const auto& w : rep.warnings) fmt::print("warning: {}\n", w);
            return run_check(g, problem, nx, k, eps);
        }
    } catch (const mamix::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const mamix::SingularMatrix& e) {
        std::cerr << "error: singular system: " << e.what() << '\n';
        return kExitNotConverged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
