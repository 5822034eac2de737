#include "mamix/element.hpp"

#include <algorithm>
#include <cassert>

#include <boost/math/special_functions/legendre.hpp>
#include <fmt/format.h>

namespace mamix {

LagrangeBasis::LagrangeBasis(int degree) : degree_(degree)
{
    if (degree < 2) {
        throw InvalidInput(fmt::format("lagrange_basis: degree {} < 2", degree));
    }
    for (int b = 0; b <= degree; ++b) {
        for (int a = 0; a <= degree - b; ++a) {
            lattice_.push_back({a, b});
            nodes_.push_back({static_cast<double>(a) / degree, static_cast<double>(b) / degree});
        }
    }
}

double LagrangeBasis::factor(int m, double l) const
{
    double p = 1.0;
    for (int i = 0; i < m; ++i) p *= (degree_ * l - i) / (i + 1);
    return p;
}

double LagrangeBasis::factor_derivative(int m, double l) const
{
    double sum = 0.0;
    for (int j = 0; j < m; ++j) {
        double p = static_cast<double>(degree_) / (j + 1);
        for (int i = 0; i < m; ++i) {
            if (i != j) p *= (degree_ * l - i) / (i + 1);
        }
        sum += p;
    }
    return sum;
}

void LagrangeBasis::values(Point ref, std::span<double> out) const
{
    assert(out.size() == lattice_.size());
    const double l0 = 1.0 - ref.x - ref.y;
    for (std::size_t i = 0; i < lattice_.size(); ++i) {
        const auto [a, b] = lattice_[i];
        out[i] = factor(a, ref.x) * factor(b, ref.y) * factor(degree_ - a - b, l0);
    }
}

void LagrangeBasis::gradients(Point ref, std::span<Vec2> out) const
{
    assert(out.size() == lattice_.size());
    const double l0 = 1.0 - ref.x - ref.y;
    for (std::size_t i = 0; i < lattice_.size(); ++i) {
        const auto [a, b] = lattice_[i];
        const int c = degree_ - a - b;
        const double pa = factor(a, ref.x), pb = factor(b, ref.y), pc = factor(c, l0);
        const double da = factor_derivative(a, ref.x);
        const double db = factor_derivative(b, ref.y);
        const double dc = factor_derivative(c, l0);
        out[i] = {da * pb * pc - pa * pb * dc, pa * db * pc - pa * pb * dc};
    }
}

LagrangeBasis lagrange_basis(int degree) { return LagrangeBasis(degree); }

QuadRule1D gauss_legendre(int n)
{
    if (n < 1) throw InvalidInput("gauss_legendre: need at least one point");
    // Boost returns the non-negative zeros in increasing order.
    const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);
    std::vector<double> x(zeros.begin(), zeros.end());
    for (double z : zeros) {
        if (z > 0.0) x.push_back(-z);
    }
    std::sort(x.begin(), x.end());

    QuadRule1D rule;
    for (double xi : x) {
        const double dp = boost::math::legendre_p_prime(n, xi);
        const double w = 2.0 / ((1.0 - xi * xi) * dp * dp);
        rule.points.push_back(0.5 * (xi + 1.0));
        rule.weights.push_back(0.5 * w);
    }
    return rule;
}

QuadRule quad_rule(int degree)
{
    if (degree < 1 || degree > 20) {
        throw InvalidInput(fmt::format("quad_rule: unsupported exactness degree {}", degree));
    }
    // xhat = s, yhat = t (1 - s), dA = (1 - s) ds dt. A monomial of degree d
    // becomes degree d + 1 in s and d in t.
    const QuadRule1D s_rule = gauss_legendre((degree + 2 + 1) / 2);
    const QuadRule1D t_rule = gauss_legendre((degree + 1 + 1) / 2);

    QuadRule rule;
    rule.degree = degree;
    for (std::size_t i = 0; i < s_rule.points.size(); ++i) {
        const double s = s_rule.points[i];
        for (std::size_t j = 0; j < t_rule.points.size(); ++j) {
            const double t = t_rule.points[j];
            rule.points.push_back({s, t * (1.0 - s)});
            rule.weights.push_back(s_rule.weights[i] * t_rule.weights[j] * (1.0 - s));
        }
    }
    return rule;
}

void physical_gradients(const ElementGeometry& geom, const LagrangeBasis& basis, Point ref,
                        std::span<Vec2> out)
{
    basis.gradients(ref, out);
    for (auto& g : out) g = to_physical(geom, g);
}

}  // namespace mamix
