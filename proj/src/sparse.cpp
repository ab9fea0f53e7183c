#include "glassfrac/sparse.hpp"

#include "glassfrac/errors.hpp"

#include <algorithm>

namespace glassfrac {

PatternAssembler::PatternAssembler(std::size_t size, const std::vector<std::vector<int>>& element_dofs)
{
    std::vector<Eigen::Triplet<double>> trip;
    std::size_t total = 0;
    for (const auto& dofs : element_dofs) total += dofs.size() * dofs.size();
    trip.reserve(total);
    for (const auto& dofs : element_dofs)
        for (int r : dofs)
            for (int c : dofs) trip.emplace_back(r, c, 0.0);
    matrix_.resize(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
    matrix_.setFromTriplets(trip.begin(), trip.end());
    matrix_.makeCompressed();

    const auto* outer = matrix_.outerIndexPtr();
    const auto* inner = matrix_.innerIndexPtr();
    scatter_.resize(element_dofs.size());
    for (std::size_t e = 0; e < element_dofs.size(); ++e) {
        const auto& dofs = element_dofs[e];
        auto& map = scatter_[e];
        map.resize(dofs.size() * dofs.size());
        for (std::size_t i = 0; i < dofs.size(); ++i)
            for (std::size_t j = 0; j < dofs.size(); ++j) {
                const int row = dofs[i], col = dofs[j];
                const auto* first = inner + outer[col];
                const auto* last = inner + outer[col + 1];
                const auto* pos = std::lower_bound(first, last, row);
                map[i * dofs.size() + j] = static_cast<int>(pos - inner);
            }
    }
}

void PatternAssembler::zero()
{
    std::fill(matrix_.valuePtr(), matrix_.valuePtr() + matrix_.nonZeros(), 0.0);
}

void PatternAssembler::add(std::size_t e, std::span<const double> element_matrix)
{
    const auto& map = scatter_[e];
    double* values = matrix_.valuePtr();
    for (std::size_t k = 0; k < map.size(); ++k) values[map[k]] += element_matrix[k];
}

bool SymmetricFactorization::factorize(const SparseMatrix& a)
{
    failed_pivot_ = -1;
    if (pattern_outer_ != a.outerIndexPtr() || pattern_nnz_ != a.nonZeros() || pattern_size_ != a.rows()) {
        solver_.analyzePattern(a);
        pattern_outer_ = a.outerIndexPtr();
        pattern_nnz_ = a.nonZeros();
        pattern_size_ = a.rows();
    }
    solver_.factorize(a);
    if (solver_.info() != Eigen::Success) {
        failed_pivot_ = 0;
        return false;
    }
    const auto& diag = solver_.vectorD();
    for (Eigen::Index i = 0; i < diag.size(); ++i)
        if (!(diag[i] > 0.0)) {
            failed_pivot_ = static_cast<long>(solver_.permutationPinv().indices()[i]);
            return false;
        }
    return true;
}

void eliminate_fixed(SparseMatrix& a, Vector& rhs, const std::vector<char>& fixed, const Vector& values)
{
    const auto* outer = a.outerIndexPtr();
    const auto* inner = a.innerIndexPtr();
    double* v = a.valuePtr();
    for (Eigen::Index col = 0; col < a.cols(); ++col) {
        const bool col_fixed = fixed[col] != 0;
        for (auto k = outer[col]; k < outer[col + 1]; ++k) {
            const auto row = inner[k];
            const bool row_fixed = fixed[row] != 0;
            if (row == col) {
                if (col_fixed) {
                    if (!(v[k] > 0.0)) v[k] = 1.0;
                    rhs[row] = v[k] * values[col];
                }
                continue;
            }
            if (col_fixed && !row_fixed) rhs[row] -= v[k] * values[col];
            if (col_fixed || row_fixed) v[k] = 0.0;
        }
    }
}

}  // namespace glassfrac
