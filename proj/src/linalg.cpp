#include "mamix/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <ostream>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <Eigen/UmfPackSupport>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mamix/geometry.hpp"

namespace mamix {

namespace {
constexpr double kResidualTolerance = 1e-8;
}

CsrMatrix::CsrMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
                     std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values))
{
}

double CsrMatrix::at(int r, int c) const
{
    const auto first = col_idx_.begin() + row_ptr_[r];
    const auto last = col_idx_.begin() + row_ptr_[r + 1];
    const auto it = std::lower_bound(first, last, c);
    return (it != last && *it == c) ? values_[static_cast<std::size_t>(it - col_idx_.begin())] : 0.0;
}

CsrMatrix to_csr(const Triplets& t)
{
    const int rows = t.rows();
    std::vector<int> counts(static_cast<std::size_t>(rows) + 1, 0);
    for (const auto& e : t.entries()) {
        if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= t.cols()) {
            throw InvalidInput(fmt::format("to_csr: entry ({}, {}) outside {}x{}", e.row, e.col, rows,
                                           t.cols()));
        }
        ++counts[static_cast<std::size_t>(e.row) + 1];
    }
    std::partial_sum(counts.begin(), counts.end(), counts.begin());

    // Bucket by row, then sort columns within each row and merge duplicates.
    std::vector<std::pair<int, double>> bucket(t.entries().size());
    std::vector<int> fill(counts.begin(), counts.end() - 1);
    for (const auto& e : t.entries()) bucket[static_cast<std::size_t>(fill[e.row]++)] = {e.col, e.value};

    std::vector<int> row_ptr(static_cast<std::size_t>(rows) + 1, 0);
    std::vector<int> col_idx;
    std::vector<double> values;
    col_idx.reserve(bucket.size());
    values.reserve(bucket.size());
    for (int r = 0; r < rows; ++r) {
        auto first = bucket.begin() + counts[r];
        auto last = bucket.begin() + counts[r + 1];
        // Ordering duplicates by value makes the sums independent of input order.
        std::sort(first, last);
        for (auto it = first; it != last; ++it) {
            if (static_cast<int>(col_idx.size()) > row_ptr[r] && col_idx.back() == it->first) {
                values.back() += it->second;
            } else {
                col_idx.push_back(it->first);
                values.push_back(it->second);
            }
        }
        row_ptr[static_cast<std::size_t>(r) + 1] = static_cast<int>(col_idx.size());
    }
    return CsrMatrix(rows, t.cols(), std::move(row_ptr), std::move(col_idx), std::move(values));
}

std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x)
{
    std::vector<double> y(static_cast<std::size_t>(a.rows()), 0.0);
    spmv_add(a, x, 1.0, y);
    return y;
}

void spmv_add(const CsrMatrix& a, std::span<const double> x, double alpha, std::span<double> y)
{
    if (static_cast<int>(x.size()) != a.cols() || static_cast<int>(y.size()) != a.rows()) {
        throw InvalidInput(fmt::format("spmv: {}x{} matrix with x of {} and y of {}", a.rows(), a.cols(),
                                       x.size(), y.size()));
    }
    const auto& rp = a.row_ptr();
    const auto& ci = a.col_idx();
    const auto& v = a.values();
    for (int r = 0; r < a.rows(); ++r) {
        double s = 0.0;
        for (int p = rp[r]; p < rp[r + 1]; ++p) s += v[p] * x[ci[p]];
        y[r] += alpha * s;
    }
}

std::vector<double> transpose_spmv(const CsrMatrix& a, std::span<const double> x)
{
    if (static_cast<int>(x.size()) != a.rows()) {
        throw InvalidInput(fmt::format("transpose_spmv: {} rows vs x of {}", a.rows(), x.size()));
    }
    std::vector<double> y(static_cast<std::size_t>(a.cols()), 0.0);
    const auto& rp = a.row_ptr();
    const auto& ci = a.col_idx();
    const auto& v = a.values();
    for (int r = 0; r < a.rows(); ++r) {
        for (int p = rp[r]; p < rp[r + 1]; ++p) y[ci[p]] += v[p] * x[r];
    }
    return y;
}

double norm_inf(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

namespace {

// Cleared when UMFPACK fails on a matrix that SparseLU then factors, which
// happens when the BLAS it links against is misconfigured for the host CPU.
std::atomic<bool> g_umfpack_usable{true};

using SpMat = Eigen::SparseMatrix<double>;

}  // namespace

struct Factorization::Impl {
    CsrMatrix a;
    SpMat m;
    std::unique_ptr<Eigen::UmfPackLU<SpMat>> umf;
    std::unique_ptr<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>> slu;

    Eigen::VectorXd apply(const Eigen::VectorXd& b) const
    {
        if (umf) return umf->solve(b);
        return slu->solve(b);
    }

    // Residual check on a solve with a fixed right-hand side.
    bool probe() const
    {
        const Eigen::VectorXd b = m * Eigen::VectorXd::Ones(m.rows());
        const Eigen::VectorXd x = apply(b);
        if (!x.allFinite()) return false;
        const double scale = 1.0 + b.lpNorm<Eigen::Infinity>();
        return (m * x - b).lpNorm<Eigen::Infinity>() / scale <= kResidualTolerance;
    }
};

Factorization::Factorization(const CsrMatrix& a) : impl_(std::make_unique<Impl>())
{
    if (a.rows() != a.cols()) {
        throw InvalidInput(fmt::format("lu: matrix is {}x{}, not square", a.rows(), a.cols()));
    }
    impl_->a = a;

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(a.nnz());
    for (int r = 0; r < a.rows(); ++r) {
        for (int p = a.row_ptr()[r]; p < a.row_ptr()[r + 1]; ++p) {
            entries.emplace_back(r, a.col_idx()[p], a.values()[p]);
        }
    }
    SpMat& m = impl_->m;
    m.resize(a.rows(), a.cols());
    m.setFromTriplets(entries.begin(), entries.end());
    m.makeCompressed();

    bool umf_failed = false;
    if (g_umfpack_usable.load()) {
        impl_->umf = std::make_unique<Eigen::UmfPackLU<SpMat>>();
        // The automatic choice picks the symmetric strategy for the symmetric
        // indefinite linearized system and fills in badly.
        impl_->umf->umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_UNSYMMETRIC;
        impl_->umf->compute(m);
        if (impl_->umf->info() == Eigen::Success && impl_->probe()) return;
        impl_->umf.reset();
        umf_failed = true;
    }

    impl_->slu = std::make_unique<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>>();
    impl_->slu->analyzePattern(m);
    impl_->slu->factorize(m);
    if (impl_->slu->info() != Eigen::Success) {
        throw SingularMatrix(fmt::format("lu: factorization failed ({})", impl_->slu->lastErrorMessage()));
    }
    if (umf_failed && impl_->probe()) g_umfpack_usable.store(false);
}

Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

int Factorization::size() const { return impl_->a.rows(); }

std::vector<double> Factorization::solve(std::span<const double> b) const
{
    const int n = size();
    if (static_cast<int>(b.size()) != n) {
        throw InvalidInput(fmt::format("lu: rhs of {} for {}x{} system", b.size(), n, n));
    }
    const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n);
    Eigen::VectorXd x = impl_->apply(rhs);

    auto residual = [&](const Eigen::VectorXd& sol) {
        std::vector<double> r(b.begin(), b.end());
        spmv_add(impl_->a, std::span<const double>(sol.data(), static_cast<std::size_t>(n)), -1.0, r);
        return r;
    };

    const double scale = 1.0 + norm_inf(b);
    std::vector<double> r = residual(x);
    if (norm_inf(r) / scale > 1e-14) {
        const Eigen::Map<const Eigen::VectorXd> rv(r.data(), n);
        x += impl_->apply(Eigen::VectorXd(rv));
        r = residual(x);
    }
    const double rel = norm_inf(r) / scale;
    if (!std::isfinite(rel) || rel > kResidualTolerance) {
        throw SingularMatrix(fmt::format("lu: relative residual {:.3e} exceeds {:.0e}", rel,
                                         kResidualTolerance));
    }
    return {x.data(), x.data() + n};
}

Triplets eliminate(const Triplets& a, std::span<const std::pair<int, double>> prescribed,
                   std::span<double> rhs)
{
    if (a.rows() != a.cols() || static_cast<int>(rhs.size()) != a.rows()) {
        throw InvalidInput("eliminate: square system with matching rhs required");
    }
    std::vector<char> fixed(static_cast<std::size_t>(a.rows()), 0);
    std::vector<double> value(static_cast<std::size_t>(a.rows()), 0.0);
    for (const auto& [dof, v] : prescribed) {
        fixed[static_cast<std::size_t>(dof)] = 1;
        value[static_cast<std::size_t>(dof)] = v;
    }

    Triplets out(a.rows(), a.cols());
    out.reserve(a.entries().size());
    for (const Triplet& t : a.entries()) {
        if (fixed[t.row]) continue;
        if (fixed[t.col]) {
            rhs[t.row] -= t.value * value[t.col];
            continue;
        }
        out.add(t.row, t.col, t.value);
    }
    for (const auto& [dof, v] : prescribed) {
        out.add(dof, dof, 1.0);
        rhs[dof] = v;
    }
    return out;
}

std::vector<double> lu_solve(const CsrMatrix& a, std::span<const double> b)
{
    return Factorization(a).solve(b);
}

void write_coordinate(std::ostream& out, const CsrMatrix& a)
{
    for (int r = 0; r < a.rows(); ++r) {
        for (int p = a.row_ptr()[r]; p < a.row_ptr()[r + 1]; ++p) {
            fmt::print(out, "{} {} {:.17g}\n", r, a.col_idx()[p], a.values()[p]);
        }
    }
}

}  // namespace mamix
