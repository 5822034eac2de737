#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "mamix/study.hpp"
#include "oracles.hpp"

using namespace mamix;

namespace {

StudyOptions quiet()
{
    StudyOptions o;
    o.record_wall_time = false;
    return o;
}

std::string csv_text(const StudyTable& t)
{
    std::ostringstream out;
    write_csv(out, t);
    return out.str();
}

}  // namespace

TEST(Problems, BuiltinValues)
{
    EXPECT_DOUBLE_EQ(builtin_problem("test1b").source({0.5, 0.3}, 0.0), 6.0);
    EXPECT_DOUBLE_EQ(builtin_problem("test3a").g({0.5, 0.5}), 0.3125);
    EXPECT_DOUBLE_EQ(sigma_boundary_value(builtin_problem("test2a"), {1.0, 0.5}, Side::Right, 0.001), 600.0);
    EXPECT_DOUBLE_EQ(sigma_boundary_value(builtin_problem("test1b"), {1.0, 0.5}, Side::Right, 0.02), 0.02);
    EXPECT_EQ(builtin_problem_names().size(), 6u);
    EXPECT_THROW(builtin_problem("test9"), InvalidInput);
}

TEST(Problems, ReferenceSelection)
{
    for (const auto& name : builtin_problem_names()) {
        const ProblemSpec p = builtin_problem(name);
        EXPECT_EQ(p.reference(), name.rfind("test2", 0) == 0 ? Reference::Ueps : Reference::U0) << name;
    }
}

TEST(Problems, AllBuiltinsPassConsistencyGate)
{
    for (const auto& name : builtin_problem_names()) {
        const ConsistencyReport r = check_consistency(builtin_problem(name));
        EXPECT_LE(r.max_defect, 1e-8) << name;
        EXPECT_GE(r.min_source, 0.0) << name;
        EXPECT_GT(r.samples, 0);
    }
}

TEST(Problems, Test1aSourceIsDeterminantOfHessian)
{
    const ProblemSpec p = builtin_problem("test1a");
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const Point x{u(rng), u(rng)};
        // D^2 exp(r^2/2) = exp(r^2/2) (I + x x^T), so det = exp(r^2) (1 + r^2).
        const double e = std::exp(0.5 * (x.x * x.x + x.y * x.y));
        const double det = e * e * ((1 + x.x * x.x) * (1 + x.y * x.y) - x.x * x.x * x.y * x.y);
        EXPECT_NEAR(p.source(x, 0.0), det, 1e-12 * det);
        EXPECT_NEAR(p.g(x), e, 1e-14 * e);
    }
}

TEST(Problems, InconsistentProblemRejected)
{
    ProblemSpec p = builtin_problem("test1b");
    p.source = [](Point x, double) { return 24 * x.x * x.x + 0.1; };
    EXPECT_THROW(check_consistency(p), InvalidInput);
    ProblemSpec q = builtin_problem("test2b");
    q.g = [](Point x) { return x.x; };
    EXPECT_THROW(check_consistency(q), InvalidInput);
}

TEST(Fit, ExactPowerLaws)
{
    const std::vector<double> xs{0.1, 0.2, 0.4, 0.8};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(3 * x * x);
    const PowerFit f = fit_power(xs, ys);
    EXPECT_NEAR(f.alpha, 2.0, 1e-12);
    EXPECT_NEAR(f.beta, 3.0, 1e-12);

    const PowerFit c = fit_power(xs, std::vector<double>(4, 5.0));
    EXPECT_NEAR(c.alpha, 0.0, 1e-12);
    EXPECT_NEAR(c.beta, 5.0, 1e-12);

    const PowerFit fixed = fit_power(xs, ys, 1.0);
    EXPECT_EQ(fixed.alpha, 1.0);
    // beta = exp(mean(log y - log x)) is the least-squares optimum in log space.
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) s += std::log(ys[i] / xs[i]);
    EXPECT_NEAR(fixed.beta, std::exp(s / 4), 1e-12);

    for (double o : observed_orders(xs, ys)) EXPECT_NEAR(o, 2.0, 1e-12);
}

TEST(Fit, SexticMeshStudyData)
{
    const std::vector<double> h{0.1, 0.05, 1.0 / 30, 0.025, 0.02};
    const std::vector<double> e{0.004334849, 0.000545090, 0.000161694, 6.82423e-05, 3.49467e-05};
    const PowerFit f = fit_power(h, e);
    EXPECT_GE(f.alpha, 2.9);
    EXPECT_LE(f.alpha, 3.1);
    const PowerFit g = fit_power(h, e, 3.0);
    EXPECT_NEAR(g.beta, 4.36, 0.05);
}

TEST(Fit, RejectsBadData)
{
    EXPECT_THROW(fit_power({1.0}, {1.0}), InvalidInput);
    EXPECT_THROW(fit_power({1.0, 2.0}, {1.0}), InvalidInput);
    EXPECT_THROW(fit_power({1.0, 2.0}, {1.0, 0.0}), InvalidInput);
    EXPECT_THROW(fit_power({-1.0, 2.0}, {1.0, 1.0}), InvalidInput);
    EXPECT_THROW(fit_power({2.0, 2.0}, {1.0, 3.0}), InvalidInput);
    EXPECT_THROW(observed_orders({1.0, 2.0}, {1.0}), InvalidInput);
}

TEST(Relation, MeshFromEps)
{
    EXPECT_EQ(relation_nx(0.01, 0.5), 10);
    EXPECT_EQ(relation_nx(0.01, 1.0), 100);
    EXPECT_EQ(relation_nx(0.005, 0.5), 14);
    EXPECT_EQ(relation_nx(0.1, 0.5), 3);
    EXPECT_THROW(relation_nx(0.0, 0.5), InvalidInput);
    EXPECT_THROW(relation_nx(0.1, -1.0), InvalidInput);
}

TEST(Relation, CapSkipsRowsAndRecordsThem)
{
    StudyOptions o = quiet();
    o.nx_cap = 5;
    const StudyTable t = run_relation_study(builtin_problem("test3a"), 0.5, {0.1, 0.05, 0.01}, o);
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[0].nx, 3);
    EXPECT_EQ(t.rows[1].nx, 4);
    ASSERT_EQ(t.skipped.size(), 1u);
    EXPECT_EQ(t.skipped[0].nx, 10);
    EXPECT_EQ(t.skipped[0].epsilon, 0.01);
    EXPECT_EQ(t.reports.size(), t.rows.size());
}

TEST(Studies, HStudySortedWithDuplicatesAndFiniteErrors)
{
    const StudyTable t = run_h_study(builtin_problem("test2b"), 0.01, {4, 2, 4}, quiet());
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.rows[0].nx, 2);
    EXPECT_EQ(t.rows[1], t.rows[2]);
    for (const StudyRow& r : t.rows) {
        EXPECT_TRUE(r.converged);
        EXPECT_EQ(r.wall_ms, 0.0);
        for (double v : {r.err_u_l2, r.err_u_h1, r.err_sigma_l2, r.err_sigma_h1}) {
            EXPECT_TRUE(std::isfinite(v));
            EXPECT_GE(v, 0.0);
        }
        EXPECT_NEAR(r.h, std::sqrt(2.0) / r.nx, 1e-14);
    }
    EXPECT_LT(t.rows[1].err_u_h1, t.rows[0].err_u_h1);
    EXPECT_EQ(t.reference, Reference::Ueps);
    EXPECT_THROW(run_h_study(builtin_problem("test2b"), 0.01, {}, quiet()), InvalidInput);
}

TEST(Studies, SingleEpsSweepEqualsDirectSolve)
{
    const ProblemSpec p = builtin_problem("test1b");
    const StudyTable t = run_eps_study(p, 4, {0.05}, quiet());
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.rows[0], solve_row(p, 4, 0.05, quiet()));
    EXPECT_THROW(run_eps_study(p, 4, {0.1, -0.1}, quiet()), InvalidInput);
}

TEST(Studies, EpsSweepOrderedAndApproachesLimit)
{
    const StudyTable t = run_eps_study(builtin_problem("test1b"), 8, {0.05, 0.2, 0.1}, quiet());
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.rows[0].epsilon, 0.2);
    EXPECT_EQ(t.rows[2].epsilon, 0.05);
    EXPECT_GT(t.rows[0].err_u_l2, t.rows[1].err_u_l2);
    EXPECT_GT(t.rows[1].err_u_l2, t.rows[2].err_u_l2);
    EXPECT_EQ(t.reference, Reference::U0);
}

TEST(Csv, HeaderAndColumns)
{
    StudyTable empty;
    EXPECT_EQ(csv_text(empty), "h,nx,epsilon,err_u_L2,err_u_H1,err_sigma_L2,err_sigma_H1,newton_iters,wall_ms\n");
    EXPECT_EQ(csv_columns().size(), 9u);
    EXPECT_THROW(column(empty, "nope"), InvalidInput);
}

TEST(Csv, RoundTripAndDeterminism)
{
    const ProblemSpec p = builtin_problem("test2b");
    const StudyTable a = run_h_study(p, 0.05, {2, 3}, quiet());
    const StudyTable b = run_h_study(p, 0.05, {2, 3}, quiet());
    EXPECT_EQ(csv_text(a), csv_text(b));

    std::istringstream in(csv_text(a));
    const StudyTable r = read_csv(in);
    ASSERT_EQ(r.rows.size(), a.rows.size());
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        EXPECT_EQ(r.rows[i].nx, a.rows[i].nx);
        EXPECT_EQ(r.rows[i].h, a.rows[i].h);
        EXPECT_EQ(r.rows[i].err_u_l2, a.rows[i].err_u_l2);
        EXPECT_EQ(r.rows[i].err_sigma_h1, a.rows[i].err_sigma_h1);
        EXPECT_EQ(r.rows[i].newton_iters, a.rows[i].newton_iters);
    }
    EXPECT_EQ(column(r, "err_u_H1"), column(a, "err_u_H1"));

    std::istringstream junk("a,b\n1,2\n");
    EXPECT_THROW(read_csv(junk), InvalidInput);
}

TEST(Csv, EmitWritesCompanionAndRejectsBadPath)
{
    const StudyTable t = run_h_study(builtin_problem("test2b"), 0.05, {2}, quiet());
    const auto dir = std::filesystem::temp_directory_path() / "mamix_test_harness";
    std::filesystem::create_directories(dir);
    const auto path = dir / "study.csv";
    emit_csv(t, path);
    ASSERT_TRUE(std::filesystem::exists(path));
    ASSERT_TRUE(std::filesystem::exists(dir / "study.dat"));
    EXPECT_EQ(read_csv(path).rows.size(), 1u);

    std::ifstream dat(dir / "study.dat");
    std::string line;
    std::getline(dat, line);
    std::istringstream fields(line);
    std::vector<double> values;
    for (double v; fields >> v;) values.push_back(v);
    EXPECT_EQ(values.size(), 9u);
    std::filesystem::remove_all(dir);

    EXPECT_THROW(emit_csv(t, "/nonexistent-dir/x/study.csv"), std::exception);
}
