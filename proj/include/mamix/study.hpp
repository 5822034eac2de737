#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mamix/mesh.hpp"
#include "mamix/problem.hpp"
#include "mamix/solver.hpp"

namespace mamix {

struct StudyOptions {
    int degree = 2;
    NewtonOptions newton;
    DiagonalPattern pattern = DiagonalPattern::Forward;
    int quad_degree = 0;  // 0 selects 3k
    int norm_degree = 0;  // 0 selects 2k + 4
    bool record_wall_time = true;  // wall_ms is 0 when false, for byte-identical output
    int nx_cap = 128;              // relation studies skip rows above this
    std::function<void(const std::string&)> log;
};

struct StudyRow {
    double h = 0.0;  // max element diameter; the grid spacing is (bx - ax) / nx
    int nx = 0;
    double epsilon = 0.0;
    double err_u_l2 = 0.0;
    double err_u_h1 = 0.0;
    double err_sigma_l2 = 0.0;
    double err_sigma_h1 = 0.0;
    int newton_iters = 0;  // total over all continuation stages
    double wall_ms = 0.0;
    bool converged = true;

    bool operator==(const StudyRow&) const = default;
};

struct SkippedRow {
    double epsilon = 0.0;
    int nx = 0;
    std::string reason;
};

struct StudyTable {
    std::string problem;
    int degree = 2;
    Reference reference = Reference::U0;
    std::vector<std::string> notes;
    std::vector<StudyRow> rows;
    std::vector<SkippedRow> skipped;
    std::vector<SolveReport> reports;  // parallel to rows
};

/// One row: continuation solve on an nx-by-nx mesh plus errors against the
/// problem's reference solution.
StudyRow solve_row(const ProblemSpec& p, int nx, double eps, const StudyOptions& opts,
                   SolveReport* report = nullptr);

/// Fixed eps, one mesh per entry of nx_list; rows sorted by nx.
StudyTable run_h_study(const ProblemSpec& p, double eps, std::vector<int> nx_list, const StudyOptions& opts = {});

/// Fixed mesh, eps swept from largest to smallest with warm starts.
StudyTable run_eps_study(const ProblemSpec& p, int nx, std::vector<double> eps_list,
                         const StudyOptions& opts = {});

/// Mesh tied to eps by nx = round(eps^-gamma); rows sorted by decreasing eps.
StudyTable run_relation_study(const ProblemSpec& p, double gamma, std::vector<double> eps_list,
                              const StudyOptions& opts = {});

int relation_nx(double eps, double gamma);

struct PowerFit {
    double alpha = 0.0;
    double beta = 0.0;
};

/// y = beta x^alpha by least squares in log-log space; with fixed_alpha only
/// beta is fitted.
PowerFit fit_power(const std::vector<double>& xs, const std::vector<double>& ys,
                   std::optional<double> fixed_alpha = std::nullopt);

/// log(e_i / e_{i+1}) / log(x_i / x_{i+1}) for consecutive pairs.
std::vector<double> observed_orders(const std::vector<double>& xs, const std::vector<double>& es);

/// Column extraction by CSV header name (h, nx, epsilon, err_u_L2, ...).
std::vector<double> column(const StudyTable& t, const std::string& name);

inline const std::vector<std::string>& csv_columns()
{
    static const std::vector<std::string> cols{"h",           "nx",           "epsilon",
                                               "err_u_L2",    "err_u_H1",     "err_sigma_L2",
                                               "err_sigma_H1", "newton_iters", "wall_ms"};
    return cols;
}

void write_csv(std::ostream& out, const StudyTable& t);
void write_dat(std::ostream& out, const StudyTable& t);
/// Writes path and a whitespace-separated companion with extension .dat.
void emit_csv(const StudyTable& t, const std::filesystem::path& path);
/// Parses rows written by write_csv; metadata is not recovered.
StudyTable read_csv(std::istream& in);
StudyTable read_csv(const std::filesystem::path& path);

}  // namespace mamix
