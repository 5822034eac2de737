#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mamix/assembly.hpp"
#include "mamix/mesh.hpp"
#include "mamix/space.hpp"

namespace mamix {

/// Closed-form solution with the derivatives the harness needs.
struct ExactSolution {
    ScalarFn value;
    VectorFn gradient;
    TensorFn hessian;
    TensorGradFn hessian_gradient;  // third derivatives, for ||sigma - sigma_h||_H1
    ScalarFn bilaplacian;           // may be empty when unused
};

enum class SigmaBoundaryMode {
    ConstantEpsilon,  // sigma n.n = eps
    Function,         // sigma n.n = h(x, nu, eps)
};

enum class Reference { U0, Ueps };

const char* to_string(Reference r);

/// A Dirichlet problem for  -eps Lap^2 u + det(D^2 u) = f  on a rectangle.
struct ProblemSpec {
    std::string name;
    Rect domain;
    /// Right-hand side f^eps(x); eps-independent for the pure Monge-Ampere tests.
    std::function<double(Point, double)> source;
    ScalarFn g;
    VectorFn grad_g;
    SigmaBoundaryMode sigma_mode = SigmaBoundaryMode::ConstantEpsilon;
    std::function<double(Point, Vec2, double)> sigma_nn;  // Function mode only
    std::optional<ExactSolution> exact_u0;
    std::optional<ExactSolution> exact_ueps;

    /// Errors are measured against u^eps when it is known, else against u^0.
    Reference reference() const { return exact_ueps ? Reference::Ueps : Reference::U0; }
    const ExactSolution& reference_solution() const;
};

double sigma_boundary_value(const ProblemSpec& p, Point x, Side side, double eps);

std::vector<std::string> builtin_problem_names();

/// test1a, test1b, test2a, test2b, test3a, test3b.
ProblemSpec builtin_problem(std::string_view name);

struct ConsistencyReport {
    double max_defect = 0.0;  // relative to max(1, |f|)
    double min_source = 0.0;  // min of f at eps = 0 over the sample grid
    int samples = 0;
    std::vector<std::string> warnings;
};

/// Checks det(D^2 u0) = f, -eps Lap^2 u^eps + det(D^2 u^eps) = f^eps, and the
/// boundary data against the exact solutions at sample points. Throws
/// InvalidInput when a defect exceeds 1e-8.
ConsistencyReport check_consistency(const ProblemSpec& p);

}  // namespace mamix
