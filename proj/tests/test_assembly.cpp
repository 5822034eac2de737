#include <algorithm>
#include <cmath>
#include <numeric>
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "mamix/assembly.hpp"
#include "mamix/sym2.hpp"
#include "oracles.hpp"

using namespace mamix;

namespace {

std::shared_ptr<const Mesh> unit_mesh(int n, DiagonalPattern p = DiagonalPattern::Forward)
{
    return std::make_shared<const Mesh>(build_rect_mesh({}, n, n, p));
}

Sym2 random_sym(std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    return {u(rng), u(rng), u(rng)};
}

Field random_field(std::shared_ptr<const DofMap> s, std::mt19937& rng, double lo = -1.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    Field f(std::move(s));
    for (double& v : f.values()) v = u(rng);
    return f;
}

Field constant_tensor(std::shared_ptr<const DofMap> s, Sym2 c)
{
    return interpolate(std::move(s), [c](Point) { return c; });
}

double quad_form(const Triplets& t, const std::vector<double>& x, const std::vector<double>& y)
{
    double s = 0.0;
    for (const Triplet& e : t.entries()) s += x[e.row] * e.value * y[e.col];
    return s;
}

std::vector<double> matvec(const Triplets& t, const std::vector<double>& x)
{
    std::vector<double> y(static_cast<std::size_t>(t.rows()), 0.0);
    for (const Triplet& e : t.entries()) y[e.row] += e.value * x[e.col];
    return y;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Bivariate polynomial sum c_ab x^a y^b with analytic derivatives.
struct Poly {
    std::vector<std::array<double, 3>> terms;  // (coef, a, b)

    double d(Point p, int dx, int dy) const
    {
        double s = 0.0;
        for (const auto& t : terms) {
            const int a = static_cast<int>(t[1]), b = static_cast<int>(t[2]);
            if (a < dx || b < dy) continue;
            double c = t[0];
            for (int i = 0; i < dx; ++i) c *= a - i;
            for (int i = 0; i < dy; ++i) c *= b - i;
            s += c * std::pow(p.x, a - dx) * std::pow(p.y, b - dy);
        }
        return s;
    }
};

Poly random_poly(std::mt19937& rng, int degree)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Poly p;
    for (int a = 0; a <= degree; ++a) {
        for (int b = 0; a + b <= degree; ++b) p.terms.push_back({u(rng), double(a), double(b)});
    }
    return p;
}

}  // namespace

TEST(Sym2Algebra, DeterminantAndCofactorExamples)
{
    EXPECT_EQ(det2({2, 0, 3}), 6.0);
    EXPECT_EQ(det2({1, 0, 1}), 1.0);
    EXPECT_EQ(det2({1, 2, 1}), -3.0);
    EXPECT_EQ(cof2({1, 0, 1}), (Sym2{1, 0, 1}));
    EXPECT_EQ(cof2({2, 1, 3}), (Sym2{3, -1, 2}));
    EXPECT_EQ(frobenius({0, 1, 0}, {0, 1, 0}), 2.0);
    EXPECT_EQ(trace({2, 7, 3}), 5.0);
    EXPECT_NEAR(min_eigenvalue({2, 0, 3}), 2.0, 1e-15);
    EXPECT_NEAR(min_eigenvalue({1, 2, 1}), -1.0, 1e-15);
}

TEST(Sym2Algebra, CofactorFrobeniusIdentity)
{
    std::mt19937 rng(1);
    for (int i = 0; i < 20; ++i) {
        const Sym2 s = random_sym(rng);
        EXPECT_NEAR(frobenius(cof2(s), s), 2.0 * det2(s), 1e-13);
    }
}

TEST(Sym2Algebra, DeterminantExpansionIsExact)
{
    std::mt19937 rng(2);
    for (int i = 0; i < 50; ++i) {
        const Sym2 s = random_sym(rng), d = random_sym(rng);
        EXPECT_NEAR(det2(s + d) - det2(s) - frobenius(cof2(s), d), det2(d), 1e-13);
    }
}

TEST(Sym2Algebra, MinEigenvalueMatchesEigen)
{
    std::mt19937 rng(3);
    for (int i = 0; i < 20; ++i) {
        const Sym2 s = random_sym(rng);
        Eigen::Matrix2d m;
        m << s.a, s.b, s.b, s.c;
        EXPECT_NEAR(min_eigenvalue(s), Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m).eigenvalues()(0), 1e-13);
    }
}

TEST(Mass, ConstantFieldExamples)
{
    auto t = build_space(unit_mesh(3), 2, 3);
    const Triplets m = assemble_mass(*t);
    const Field xx = constant_tensor(t, {1, 0, 0});
    const Field xy = constant_tensor(t, {0, 1, 0});
    EXPECT_NEAR(quad_form(m, xx.values(), xx.values()), 1.0, 1e-13);
    EXPECT_NEAR(quad_form(m, xy.values(), xy.values()), 2.0, 1e-13);
}

TEST(Mass, PolynomialFieldMatchesOracle)
{
    auto mesh = unit_mesh(3, DiagonalPattern::Alternating);
    auto t = build_space(mesh, 2, 3);
    auto fn = [](Point x) { return Sym2{x.x * x.y - 1, x.x * x.x + 0.5, 2 * x.y * x.y - x.x}; };
    const Field f = interpolate(t, fn);
    const double oracle_val = oracle::integrate_mesh(*mesh, [&](Point x, int) {
        const Sym2 s = fn(x);
        return s.a * s.a + 2 * s.b * s.b + s.c * s.c;
    });
    EXPECT_NEAR(quad_form(assemble_mass(*t), f.values(), f.values()) / oracle_val, 1.0, 1e-12);
}

TEST(Mass, SymmetricPositiveDefinite)
{
    auto t = build_space(unit_mesh(2), 2, 3);
    const Eigen::MatrixXd m = oracle::dense(assemble_mass(*t));
    EXPECT_LE((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    EXPECT_EQ(llt.info(), Eigen::Success);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff(), 0.0);
}

TEST(Coupling, ConstantTensorHasZeroDivergence)
{
    auto mesh = unit_mesh(3);
    auto t = build_space(mesh, 2, 3);
    auto s = build_space(mesh, 2, 1);
    const Triplets b = assemble_div_coupling(*t, *s);
    std::mt19937 rng(4);
    const Field mu = constant_tensor(t, {0.7, -1.3, 2.1});
    const Field v = random_field(s, rng);
    EXPECT_NEAR(quad_form(b, mu.values(), v.values()), 0.0, 1e-12);
}

TEST(Coupling, HandIntegral)
{
    auto mesh = unit_mesh(4);
    auto t = build_space(mesh, 2, 3);
    auto s = build_space(mesh, 2, 1);
    const Field mu = interpolate(t, [](Point x) { return Sym2{x.x, 0, 0}; });
    const Field u = interpolate(s, [](Point x) { return x.x * x.x + x.y * x.y; });
    EXPECT_NEAR(quad_form(assemble_div_coupling(*t, *s), mu.values(), u.values()), 1.0, 1e-13);
}

TEST(Coupling, InfSupIdentity)
{
    for (DiagonalPattern p : {DiagonalPattern::Forward, DiagonalPattern::Alternating}) {
        auto mesh = unit_mesh(4, p);
        auto t = build_space(mesh, 2, 3);
        auto s = build_space(mesh, 2, 1);
        const Triplets b = assemble_div_coupling(*t, *s);
        std::mt19937 rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            const Field v = random_field(s, rng);
            const int n = s->num_nodes();
            Field mu(t);
            for (int i = 0; i < n; ++i) {
                mu.values()[t->dof(0, i)] = v.values()[i];
                mu.values()[t->dof(2, i)] = v.values()[i];
            }
            const double lhs = quad_form(b, mu.values(), v.values());
            const double grad2 = oracle::integrate_mesh(*mesh, [&](Point x, int e) {
                const Vec2 g = oracle::field_gradient(v, e, x);
                return dot(g, g);
            });
            const double rhs = quad_form(assemble_scalar_laplacian(*s), v.values(), v.values());
            EXPECT_LE(std::abs(lhs - rhs) / rhs, 1e-12);
            EXPECT_LE(std::abs(lhs - grad2) / grad2, 1e-7);
        }
    }
}

TEST(Coupling, CofactorRowsDivergenceFreeSymbolic)
{
    std::mt19937 rng(6);
    auto mesh = unit_mesh(3);
    auto s = build_space(mesh, 2, 1);
    const QuadRule q = quad_rule(default_form_degree(2));
    std::vector<Vec2> dphi(s->local_size());
    for (int trial = 0; trial < 10; ++trial) {
        const Poly u = random_poly(rng, 6);
        double worst = 0.0;
        for (int e = 0; e < mesh->num_elements(); ++e) {
            const ElementGeometry g = element_geometry(*mesh, e);
            std::vector<double> local(s->local_size(), 0.0);
            for (std::size_t k = 0; k < q.points.size(); ++k) {
                const Point x = g.map(q.points[k]);
                // cof is linear, so its partial derivatives are cofactors of the third derivatives.
                const Sym2 cx = cof2({u.d(x, 3, 0), u.d(x, 2, 1), u.d(x, 1, 2)});
                const Sym2 cy = cof2({u.d(x, 2, 1), u.d(x, 1, 2), u.d(x, 0, 3)});
                const Vec2 div{cx.a + cy.b, cx.b + cy.c};
                physical_gradients(g, s->basis(), q.points[k], dphi);
                for (int i = 0; i < s->local_size(); ++i) local[i] += q.weights[k] * g.det * dot(div, dphi[i]);
            }
            for (double v : local) worst = std::max(worst, std::abs(v));
        }
        EXPECT_LE(worst, 1e-12);
    }
}

TEST(Coupling, CofactorOfInterpolatedHessianIsDivergenceFree)
{
    // u of degree k + 2 has a Hessian the tensor space reproduces exactly.
    std::mt19937 rng(7);
    auto mesh = unit_mesh(3, DiagonalPattern::Alternating);
    auto t = build_space(mesh, 2, 3);
    auto s = build_space(mesh, 2, 1);
    const Triplets b = assemble_div_coupling(*t, *s);
    for (int trial = 0; trial < 10; ++trial) {
        const Poly u = random_poly(rng, 4);
        const Field c = interpolate(t, [&](Point x) { return cof2({u.d(x, 2, 0), u.d(x, 1, 1), u.d(x, 0, 2)}); });
        std::vector<double> btc(static_cast<std::size_t>(s->num_dofs()), 0.0);
        for (const Triplet& e : b.entries()) btc[e.col] += e.value * c.values()[e.row];
        for (int j = 0; j < s->num_dofs(); ++j) {
            if (!s->on_boundary(j)) {
                EXPECT_NEAR(btc[j], 0.0, 1e-12);
            }
        }
    }
}

TEST(BoundaryFunctional, ConstantDataGivesZero)
{
    auto t = build_space(unit_mesh(3), 2, 3);
    const auto g = assemble_boundary_g(*t, [](Point) { return Vec2{0, 0}; });
    for (double v : g) EXPECT_EQ(v, 0.0);
}

TEST(BoundaryFunctional, LinearDataMatchesEdgeOracle)
{
    using Gauss = boost::math::quadrature::gauss<double, 20>;
    auto mesh = unit_mesh(3);
    auto t = build_space(mesh, 2, 3);
    const auto g = assemble_boundary_g(*t, [](Point) { return Vec2{1, 0}; });
    std::mt19937 rng(8);
    const Field mu = random_field(t, rng);
    double expected = 0.0;
    for (const BoundaryEdge& be : mesh->boundary_edges()) {
        if (be.side != Side::Top && be.side != Side::Bottom) continue;
        const Point a = mesh->nodes()[be.nodes[0]], b = mesh->nodes()[be.nodes[1]];
        const double sign = be.side == Side::Top ? 1.0 : -1.0;
        expected += sign * Gauss::integrate(
                               [&](double s) {
                                   return oracle::field_value(mu, be.element, a + s * (b - a), 1);
                               },
                               0.0, 1.0) *
                    norm(b - a);
    }
    double got = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) got += g[i] * mu.values()[i];
    EXPECT_NEAR(got, expected, 1e-13);
    const int n = t->num_nodes();
    for (int i = 0; i < n; ++i) {
        EXPECT_EQ(g[t->dof(0, i)], 0.0);
        EXPECT_EQ(g[t->dof(2, i)], 0.0);
    }
}

TEST(BoundaryFunctional, TangentOrientationInvariant)
{
    auto t = build_space(unit_mesh(4), 2, 3);
    auto grad = [](Point x) { return Vec2{std::cos(x.x) * x.y, std::sin(x.x) + 2 * x.y}; };
    const auto ccw = assemble_boundary_g(*t, grad, TangentOrientation::CounterClockwise);
    const auto cw = assemble_boundary_g(*t, grad, TangentOrientation::Clockwise);
    EXPECT_LE(max_abs_diff(ccw, cw), 1e-15);
}

TEST(DetResidual, Examples)
{
    auto mesh = unit_mesh(4);
    auto t = build_space(mesh, 2, 3);
    auto s = build_space(mesh, 2, 1);
    const auto one = assemble_load(*s, [](Point) { return 1.0; });
    EXPECT_LE(max_abs_diff(assemble_det_residual(constant_tensor(t, {1, 0, 1}), *s), one), 1e-15);

    const Field hess = interpolate(t, [](Point x) { return Sym2{12 * x.x * x.x, 0, 2}; });
    const auto load = assemble_load(*s, [](Point x) { return 24 * x.x * x.x; });
    EXPECT_LE(max_abs_diff(assemble_det_residual(hess, *s), load), 1e-14);

    std::mt19937 rng(9);
    const Field r = random_field(t, rng);
    Field r2 = r;
    for (double& v : r2.values()) v *= 2.0;
    const auto a = assemble_det_residual(r, *s);
    auto b = assemble_det_residual(r2, *s);
    for (double& v : b) v /= 4.0;
    EXPECT_LE(max_abs_diff(a, b), 1e-14);
}

TEST(DetResidual, MatchesOracleIntegral)
{
    auto mesh = unit_mesh(2, DiagonalPattern::Backward);
    auto t = build_space(mesh, 2, 3);
    auto s = build_space(mesh, 2, 1);
    std::mt19937 rng(10);
    const Field sig = random_field(t, rng);
    const Field v = random_field(s, rng);
    const auto r = assemble_det_residual(sig, *s);
    double got = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) got += r[i] * v.values()[i];
    const double expected = oracle::integrate_mesh(*mesh, [&](Point x, int e) {
        const Sym2 m{oracle::field_value(sig, e, x, 0), oracle::field_value(sig, e, x, 1),
                     oracle::field_value(sig, e, x, 2)};
        return det2(m) * oracle::field_value(v, e, x);
    });
    EXPECT_NEAR(got, expected, 1e-12);
}

TEST(CofJacobian, IdentityGivesTraceLoad)
{
    auto mesh = unit_mesh(3);
    auto t = build_space(mesh, 2, 3);
    auto s = build_space(mesh, 2, 1);
    const Triplets c = assemble_cof_jacobian(constant_tensor(t, {1, 0, 1}), *s);
    auto dfn = [](Point x) { return Sym2{x.x * x.y, std::sin(x.x), 1 - x.y * x.y}; };
    const Field d = interpolate(t, dfn);
    std::mt19937 rng(11);
    const Field v = random_field(s, rng);
    const double got = quad_form(c, v.values(), d.values());
    const double expected = oracle::integrate_mesh(*mesh, [&](Point x, int e) {
        return (oracle::field_value(d, e, x, 0) + oracle::field_value(d, e, x, 2)) * oracle::field_value(v, e, x);
    });
    EXPECT_NEAR(got, expected, 1e-12);

    const Triplets c2 = assemble_cof_jacobian(constant_tensor(t, {2, 0, 2}), *s);
    EXPECT_LE((oracle::dense(c2) - 2.0 * oracle::dense(c)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(CofJacobian, CentralDifferencesOfDetResidual)
{
    auto mesh = unit_mesh(3, DiagonalPattern::Alternating);
    auto t = build_space(mesh, 2, 3);
    auto s = build_space(mesh, 2, 1);
    std::mt19937 rng(12);
    for (int trial = 0; trial < 5; ++trial) {
        const Field sig = random_field(t, rng);
        const Field del = random_field(t, rng);
        const double h = 1e-3;
        Field plus = sig, minus = sig;
        for (std::size_t i = 0; i < sig.values().size(); ++i) {
            plus.values()[i] += h * del.values()[i];
            minus.values()[i] -= h * del.values()[i];
        }
        const auto rp = assemble_det_residual(plus, *s);
        const auto rm = assemble_det_residual(minus, *s);
        const auto jd = matvec(assemble_cof_jacobian(sig, *s), del.values());
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < jd.size(); ++j) {
            const double fd = (rp[j] - rm[j]) / (2 * h);
            num = std::max(num, std::abs(fd - jd[j]));
            den = std::max(den, std::abs(jd[j]));
        }
        EXPECT_LE(num / den, 1e-10);
    }
}

TEST(PhiGrad, IdentityAndScaling)
{
    auto mesh = unit_mesh(3);
    auto t = build_space(mesh, 2, 3);
    auto s = build_space(mesh, 2, 1);
    const Eigen::MatrixXd k = oracle::dense(assemble_scalar_laplacian(*s));
    const Eigen::MatrixXd s1 = oracle::dense(assemble_phi_grad(constant_tensor(t, {1, 0, 1}), *s));
    const Eigen::MatrixXd s2 = oracle::dense(assemble_phi_grad(constant_tensor(t, {2, 0, 2}), *s));
    EXPECT_LE((s1 - k).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((s2 - 2.0 * k).cwiseAbs().maxCoeff(), 1e-14);

    const Field cof_hess = interpolate(t, [](Point) { return cof2({1, 0, 1}); });
    const Eigen::MatrixXd s3 = oracle::dense(assemble_phi_grad(cof_hess, *s));
    EXPECT_LE((s3 - k).cwiseAbs().maxCoeff(), 1e-14);

    std::mt19937 rng(13);
    const Eigen::MatrixXd sr = oracle::dense(assemble_phi_grad(random_field(t, rng), *s));
    EXPECT_LE((sr - sr.transpose()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(PhiGrad, MatchesOracleBilinearForm)
{
    auto mesh = unit_mesh(2);
    auto t = build_space(mesh, 2, 3);
    auto s = build_space(mesh, 2, 1);
    std::mt19937 rng(14);
    const Field phi = random_field(t, rng);
    const Field w = random_field(s, rng), v = random_field(s, rng);
    const double got = quad_form(assemble_phi_grad(phi, *s), v.values(), w.values());
    const double expected = oracle::integrate_mesh(*mesh, [&](Point x, int e) {
        const Vec2 dw = oracle::field_gradient(w, e, x), dv = oracle::field_gradient(v, e, x);
        const double a = oracle::field_value(phi, e, x, 0), b = oracle::field_value(phi, e, x, 1),
                     c = oracle::field_value(phi, e, x, 2);
        return (a * dw.x + b * dw.y) * dv.x + (b * dw.x + c * dw.y) * dv.y;
    });
    EXPECT_NEAR(got, expected, 1e-7);
}

TEST(Load, Examples)
{
    auto s = build_space(unit_mesh(4), 2, 1);
    for (double v : assemble_load(*s, [](Point) { return 0.0; })) EXPECT_EQ(v, 0.0);
    const auto one = assemble_load(*s, [](Point) { return 1.0; });
    EXPECT_NEAR(std::accumulate(one.begin(), one.end(), 0.0), 1.0, 1e-14);
    const auto f = assemble_load(*s, [](Point x) { return 24 * x.x * x.x; });
    EXPECT_NEAR(std::accumulate(f.begin(), f.end(), 0.0), 8.0, 1e-13);
}

TEST(Laplacian, Examples)
{
    auto s = build_space(unit_mesh(4, DiagonalPattern::Alternating), 2, 1);
    const Triplets k = assemble_scalar_laplacian(*s);
    const std::vector<double> ones(static_cast<std::size_t>(s->num_dofs()), 1.0);
    for (double r : matvec(k, ones)) EXPECT_NEAR(r, 0.0, 1e-13);
    const Field x = interpolate(s, [](Point p) { return p.x; });
    EXPECT_NEAR(quad_form(k, x.values(), x.values()), 1.0, 1e-13);
}

TEST(ErrorNorms, Examples)
{
    auto mesh = unit_mesh(4);
    auto s = build_space(mesh, 2, 1);
    auto p = [](Point x) { return 1 + x.x * x.y - x.y * x.y; };
    auto dp = [](Point x) { return Vec2{x.y, x.x - 2 * x.y}; };
    const Field f = interpolate(s, p);
    EXPECT_LE(error_norm(f, p, dp, Norm::L2), 1e-12);
    EXPECT_LE(error_norm(f, p, dp, Norm::H1), 1e-12);

    const Field zero(s);
    EXPECT_NEAR(error_norm(zero, [](Point) { return 1.0; }, {}, Norm::L2), 1.0, 1e-14);
    EXPECT_THROW(error_norm(zero, [](Point) { return 1.0; }, {}, Norm::H1), InvalidInput);

    auto t = build_space(mesh, 2, 3);
    const Field tz(t);
    EXPECT_NEAR(error_norm(tz, [](Point) { return Sym2{0, 1, 0}; }, {}, Norm::L2), std::sqrt(2.0), 1e-14);
}

TEST(ErrorNorms, SineInterpolantMatchesFineQuadrature)
{
    auto mesh = unit_mesh(16);
    auto s = build_space(mesh, 2, 1);
    const double pi = std::acos(-1.0);
    auto fn = [pi](Point x) { return std::sin(pi * x.x) * std::sin(pi * x.y); };
    auto grad = [pi](Point x) {
        return Vec2{pi * std::cos(pi * x.x) * std::sin(pi * x.y), pi * std::sin(pi * x.x) * std::cos(pi * x.y)};
    };
    const Field f = interpolate(s, fn);
    const double l2 = std::sqrt(oracle::integrate_mesh(*mesh, [&](Point x, int e) {
        const double d = oracle::field_value(f, e, x) - fn(x);
        return d * d;
    }));
    EXPECT_NEAR(error_norm(f, fn, grad, Norm::L2) / l2, 1.0, 1e-3);
    const double semi = std::sqrt(oracle::integrate_mesh(*mesh, [&](Point x, int e) {
        const Vec2 d = oracle::field_gradient(f, e, x) - grad(x);
        return dot(d, d);
    }));
    EXPECT_NEAR(error_norm(f, fn, grad, Norm::H1Semi) / semi, 1.0, 1e-3);
    EXPECT_NEAR(error_norm(f, fn, grad, Norm::H1), std::hypot(l2, semi), 1e-3 * semi);
}

TEST(Monitor, ConstantAndSignedFields)
{
    auto t = build_space(unit_mesh(2), 2, 3);
    EXPECT_NEAR(min_eigenvalue_monitor(constant_tensor(t, {2, 0, 3})), 2.0, 1e-14);
    EXPECT_NEAR(min_eigenvalue_monitor(constant_tensor(t, {1, 2, 1})), -1.0, 1e-14);
}

TEST(Assembly, RejectsMismatchedSpaces)
{
    auto t = build_space(unit_mesh(2), 2, 3);
    auto s_other = build_space(unit_mesh(3), 2, 1);
    auto s = build_space(unit_mesh(2), 2, 1);
    EXPECT_THROW(assemble_div_coupling(*t, *s_other), InvalidInput);
    EXPECT_THROW(assemble_mass(*s), InvalidInput);
    EXPECT_THROW(assemble_load(*t, [](Point) { return 1.0; }), InvalidInput);
}

TEST(Assembly, TripletOrderDoesNotChangeMatrix)
{
    auto t = build_space(unit_mesh(3), 2, 3);
    Triplets m = assemble_mass(*t);
    const CsrMatrix a = to_csr(m);
    std::mt19937 rng(15);
    std::shuffle(m.entries().begin(), m.entries().end(), rng);
    const CsrMatrix b = to_csr(m);
    EXPECT_EQ(a.row_ptr(), b.row_ptr());
    EXPECT_EQ(a.col_idx(), b.col_idx());
    for (std::size_t i = 0; i < a.values().size(); ++i) EXPECT_NEAR(a.values()[i], b.values()[i], 1e-15);
}
