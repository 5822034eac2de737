#include "mamix/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace mamix {

const char* to_string(Reference r) { return r == Reference::U0 ? "u0" : "ueps"; }

const ExactSolution& ProblemSpec::reference_solution() const
{
    if (exact_ueps) return *exact_ueps;
    if (exact_u0) return *exact_u0;
    throw InvalidInput(fmt::format("problem '{}' has no exact solution", name));
}

double sigma_boundary_value(const ProblemSpec& p, Point x, Side side, double eps)
{
    if (p.sigma_mode == SigmaBoundaryMode::ConstantEpsilon) return eps;
    return p.sigma_nn(x, outward_normal(side), eps);
}

namespace {

ExactSolution exp_radial()
{
    // u = exp((x^2 + y^2) / 2)
    auto E = [](Point p) { return std::exp(0.5 * (p.x * p.x + p.y * p.y)); };
    ExactSolution s;
    s.value = E;
    s.gradient = [E](Point p) { return Vec2{p.x * E(p), p.y * E(p)}; };
    s.hessian = [E](Point p) {
        const double e = E(p);
        return Sym2{(1 + p.x * p.x) * e, p.x * p.y * e, (1 + p.y * p.y) * e};
    };
    s.hessian_gradient = [E](Point p) {
        const double e = E(p), x = p.x, y = p.y;
        return std::array<Vec2, 3>{Vec2{(3 * x + x * x * x) * e, (1 + x * x) * y * e},
                                   Vec2{y * (1 + x * x) * e, x * (1 + y * y) * e},
                                   Vec2{(1 + y * y) * x * e, (3 * y + y * y * y) * e}};
    };
    s.bilaplacian = [E](Point p) {
        // Lap u = (2 + r^2) E, Lap^2 u = (8 + 8 r^2 + r^4) E  with r^2 = x^2 + y^2.
        const double r2 = p.x * p.x + p.y * p.y;
        return (8 + 8 * r2 + r2 * r2) * E(p);
    };
    return s;
}

ExactSolution quartic_quadratic()
{
    // u = x^4 + y^2
    ExactSolution s;
    s.value = [](Point p) { return std::pow(p.x, 4) + p.y * p.y; };
    s.gradient = [](Point p) { return Vec2{4 * std::pow(p.x, 3), 2 * p.y}; };
    s.hessian = [](Point p) { return Sym2{12 * p.x * p.x, 0.0, 2.0}; };
    s.hessian_gradient = [](Point p) {
        return std::array<Vec2, 3>{Vec2{24 * p.x, 0.0}, Vec2{}, Vec2{}};
    };
    s.bilaplacian = [](Point) { return 24.0; };
    return s;
}

ExactSolution sextic()
{
    // u = 20 x^6 + y^6
    ExactSolution s;
    s.value = [](Point p) { return 20 * std::pow(p.x, 6) + std::pow(p.y, 6); };
    s.gradient = [](Point p) { return Vec2{120 * std::pow(p.x, 5), 6 * std::pow(p.y, 5)}; };
    s.hessian = [](Point p) { return Sym2{600 * std::pow(p.x, 4), 0.0, 30 * std::pow(p.y, 4)}; };
    s.hessian_gradient = [](Point p) {
        return std::array<Vec2, 3>{Vec2{2400 * std::pow(p.x, 3), 0.0}, Vec2{},
                                   Vec2{0.0, 120 * std::pow(p.y, 3)}};
    };
    s.bilaplacian = [](Point p) { return 7200 * p.x * p.x + 360 * p.y * p.y; };
    return s;
}

ExactSolution x_sin_x()
{
    // u = x sin x + y sin y
    ExactSolution s;
    s.value = [](Point p) { return p.x * std::sin(p.x) + p.y * std::sin(p.y); };
    s.gradient = [](Point p) {
        return Vec2{std::sin(p.x) + p.x * std::cos(p.x), std::sin(p.y) + p.y * std::cos(p.y)};
    };
    s.hessian = [](Point p) {
        return Sym2{2 * std::cos(p.x) - p.x * std::sin(p.x), 0.0, 2 * std::cos(p.y) - p.y * std::sin(p.y)};
    };
    s.hessian_gradient = [](Point p) {
        return std::array<Vec2, 3>{Vec2{-3 * std::sin(p.x) - p.x * std::cos(p.x), 0.0}, Vec2{},
                                   Vec2{0.0, -3 * std::sin(p.y) - p.y * std::cos(p.y)}};
    };
    s.bilaplacian = [](Point p) {
        return p.x * std::sin(p.x) - 4 * std::cos(p.x) + p.y * std::sin(p.y) - 4 * std::cos(p.y);
    };
    return s;
}

// Monge-Ampere test: f = det(D^2 u0), g = u0, sigma n.n = eps.
ProblemSpec monge_ampere_problem(std::string name, ExactSolution u0, std::function<double(Point)> f)
{
    ProblemSpec p;
    p.name = std::move(name);
    p.source = [f = std::move(f)](Point x, double) { return f(x); };
    p.g = u0.value;
    p.grad_g = u0.gradient;
    p.sigma_mode = SigmaBoundaryMode::ConstantEpsilon;
    p.exact_u0 = std::move(u0);
    return p;
}

// Regularized test with known u^eps: sigma n.n = D^2 u^eps nu.nu.
ProblemSpec regularized_problem(std::string name, ExactSolution ueps,
                                std::function<double(Point, double)> f_eps,
                                std::function<double(Point, Vec2)> h)
{
    ProblemSpec p;
    p.name = std::move(name);
    p.source = std::move(f_eps);
    p.g = ueps.value;
    p.grad_g = ueps.gradient;
    p.sigma_mode = SigmaBoundaryMode::Function;
    p.sigma_nn = [h = std::move(h)](Point x, Vec2 nu, double) { return h(x, nu); };
    p.exact_ueps = std::move(ueps);
    return p;
}

}  // namespace

std::vector<std::string> builtin_problem_names()
{
    return {"test1a", "test1b", "test2a", "test2b", "test3a", "test3b"};
}

ProblemSpec builtin_problem(std::string_view name)
{
    if (name == "test1a") {
        // f = det(D^2 u0) for u0 = exp((x^2+y^2)/2).
        return monge_ampere_problem("test1a", exp_radial(), [](Point p) {
            const double r2 = p.x * p.x + p.y * p.y;
            return (1 + r2) * std::exp(r2);
        });
    }
    if (name == "test1b" || name == "test3a") {
        return monge_ampere_problem(std::string(name), quartic_quadratic(),
                                    [](Point p) { return 24 * p.x * p.x; });
    }
    if (name == "test3b") {
        return monge_ampere_problem("test3b", sextic(),
                                    [](Point p) { return 18000 * std::pow(p.x, 4) * std::pow(p.y, 4); });
    }
    if (name == "test2a") {
        return regularized_problem(
            "test2a", sextic(),
            [](Point p, double eps) {
                return 18000 * std::pow(p.x, 4) * std::pow(p.y, 4) - eps * (7200 * p.x * p.x + 360 * p.y * p.y);
            },
            [](Point p, Vec2 nu) { return 600 * std::pow(p.x, 4) * nu.x * nu.x + 30 * std::pow(p.y, 4) * nu.y * nu.y; });
    }
    if (name == "test2b") {
        return regularized_problem(
            "test2b", x_sin_x(),
            [](Point p, double eps) {
                const double x = p.x, y = p.y;
                return (2 * std::cos(x) - x * std::sin(x)) * (2 * std::cos(y) - y * std::sin(y)) -
                       eps * (x * std::sin(x) - 4 * std::cos(x) + y * std::sin(y) - 4 * std::cos(y));
            },
            [](Point p, Vec2 nu) {
                return (2 * std::cos(p.x) - p.x * std::sin(p.x)) * nu.x * nu.x +
                       (2 * std::cos(p.y) - p.y * std::sin(p.y)) * nu.y * nu.y;
            });
    }
    std::string valid;
    for (const auto& n : builtin_problem_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw InvalidInput(fmt::format("unknown problem '{}' (valid: {})", name, valid));
}

ConsistencyReport check_consistency(const ProblemSpec& p)
{
    constexpr double kTolerance = 1e-8;
    constexpr int kGrid = 11;
    const Rect& r = p.domain;
    ConsistencyReport report;
    report.min_source = std::numeric_limits<double>::infinity();

    auto check = [&](double lhs, double rhs, const char* what, Point x) {
        const double defect = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
        report.max_defect = std::max(report.max_defect, defect);
        if (!(defect <= kTolerance)) {
            throw InvalidInput(fmt::format("problem '{}': {} inconsistent at ({}, {}): {} vs {}", p.name,
                                           what, x.x, x.y, lhs, rhs));
        }
    };

    for (int j = 0; j < kGrid; ++j) {
        for (int i = 0; i < kGrid; ++i) {
            const Point x{r.ax + (r.bx - r.ax) * i / (kGrid - 1), r.ay + (r.by - r.ay) * j / (kGrid - 1)};
            ++report.samples;
            report.min_source = std::min(report.min_source, p.source(x, 0.0));
            if (p.exact_u0) {
                check(det2(p.exact_u0->hessian(x)), p.source(x, 0.0), "det(D^2 u0) = f", x);
            }
            if (p.exact_ueps) {
                for (double eps : {0.25, 1e-3}) {
                    const double lhs = -eps * p.exact_ueps->bilaplacian(x) + det2(p.exact_ueps->hessian(x));
                    check(lhs, p.source(x, eps), "-eps Lap^2 u + det(D^2 u) = f^eps", x);
                }
            }
            const bool boundary = i == 0 || j == 0 || i == kGrid - 1 || j == kGrid - 1;
            if (!boundary) continue;
            const ExactSolution& u = p.reference_solution();
            check(p.g(x), u.value(x), "g = u on the boundary", x);
            const Vec2 dg = p.grad_g(x), du = u.gradient(x);
            check(dg.x, du.x, "grad g = grad u", x);
            check(dg.y, du.y, "grad g = grad u", x);
            if (p.sigma_mode == SigmaBoundaryMode::Function && p.exact_ueps) {
                const Sym2 hess = p.exact_ueps->hessian(x);
                for (Side side : {Side::Left, Side::Right, Side::Bottom, Side::Top}) {
                    const Vec2 nu = outward_normal(side);
                    const double exact = hess.a * nu.x * nu.x + 2 * hess.b * nu.x * nu.y + hess.c * nu.y * nu.y;
                    check(sigma_boundary_value(p, x, side, 1e-3), exact, "sigma n.n = D^2 u nu.nu", x);
                }
            }
        }
    }
    if (report.min_source <= 0.0) {
        report.warnings.push_back(fmt::format("problem '{}': f is not positive on the sample grid (min {})",
                                              p.name, report.min_source));
    }
    return report;
}

}  // namespace mamix
