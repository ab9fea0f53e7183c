#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <span>
#include <vector>

namespace glassfrac {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Sparse matrix with a fixed pattern built from element connectivity, plus per-element
/// scatter maps into the value array so repeated assembly never reallocates.
class PatternAssembler {
public:
    PatternAssembler() = default;
    PatternAssembler(std::size_t size, const std::vector<std::vector<int>>& element_dofs);

    void zero();
    /// Adds a dense row-major element matrix for element `e`.
    void add(std::size_t e, std::span<const double> element_matrix);

    const SparseMatrix& matrix() const { return matrix_; }
    SparseMatrix& matrix() { return matrix_; }
    std::size_t size() const { return static_cast<std::size_t>(matrix_.rows()); }

private:
    SparseMatrix matrix_;
    std::vector<std::vector<int>> scatter_;
};

/// Sparse LDL^T with the symbolic analysis reused while the pattern is unchanged.
class SymmetricFactorization {
public:
    /// Returns false if the matrix is not positive definite (a pivot <= 0 or failure).
    bool factorize(const SparseMatrix& a);
    Vector solve(const Vector& rhs) const { return solver_.solve(rhs); }
    /// Index of the first non-positive pivot after a failed factorization, or -1.
    long failed_pivot() const { return failed_pivot_; }

private:
    Eigen::SimplicialLDLT<SparseMatrix> solver_;
    const SparseMatrix::StorageIndex* pattern_outer_ = nullptr;
    Eigen::Index pattern_nnz_ = -1;
    Eigen::Index pattern_size_ = -1;
    long failed_pivot_ = -1;
};

/// Row/column elimination of fixed dofs in place: entries coupling a fixed dof are zeroed,
/// its diagonal kept, and `rhs` adjusted so the solution reproduces `values` on fixed dofs.
void eliminate_fixed(SparseMatrix& a, Vector& rhs, const std::vector<char>& fixed, const Vector& values);

}  // namespace glassfrac
