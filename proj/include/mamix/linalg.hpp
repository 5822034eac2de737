#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mamix {

/// Structural or numerical singularity, or a solve whose residual check failed.
class SingularMatrix : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Triplet {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

/// Coordinate-format accumulator; duplicates are summed by to_csr.
class Triplets {
public:
    Triplets() = default;
    Triplets(int rows, int cols) : rows_(rows), cols_(cols) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const std::vector<Triplet>& entries() const { return entries_; }
    std::vector<Triplet>& entries() { return entries_; }

    void add(int row, int col, double value) { entries_.push_back({row, col, value}); }
    void reserve(std::size_t n) { entries_.reserve(n); }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Triplet> entries_;
};

class CsrMatrix {
public:
    CsrMatrix() = default;
    CsrMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
              std::vector<double> values);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }

    /// Entry (r, c), zero when not stored.
    double at(int r, int c) const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

CsrMatrix to_csr(const Triplets& t);

std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x);
/// y += alpha * A x
void spmv_add(const CsrMatrix& a, std::span<const double> x, double alpha, std::span<double> y);
std::vector<double> transpose_spmv(const CsrMatrix& a, std::span<const double> x);

double norm_inf(std::span<const double> v);

/// Sparse LU: UMFPACK, with Eigen's SparseLU (COLAMD order, partial
/// pivoting) as the fallback when UMFPACK fails. Immutable after
/// construction; solve() may be called concurrently.
class Factorization {
public:
    explicit Factorization(const CsrMatrix& a);
    ~Factorization();
    Factorization(Factorization&&) noexcept;
    Factorization& operator=(Factorization&&) noexcept;

    int size() const;

    /// Solves A x = b. Throws SingularMatrix when the relative residual
    /// ||Ax - b||_inf / (1 + ||b||_inf) exceeds 1e-8 after one refinement step.
    std::vector<double> solve(std::span<const double> b) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Strong imposition of x[dof] = value: rows and columns of the prescribed
/// unknowns are removed, column contributions move to rhs, and identity rows
/// with rhs = value take their place. Square systems only.
Triplets eliminate(const Triplets& a, std::span<const std::pair<int, double>> prescribed,
                   std::span<double> rhs);

std::vector<double> lu_solve(const CsrMatrix& a, std::span<const double> b);

/// "row col value" per line, zero-based.
void write_coordinate(std::ostream& out, const CsrMatrix& a);

}  // namespace mamix
