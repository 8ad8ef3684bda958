#pragma once

#include "mfforge/assembly.hpp"

#include <complex>
#include <memory>

namespace mfforge {

/// Assembled matrix and right-hand side with the constraints applied so far.
struct LinearSystem {
    SparseMatrix matrix;
    Vector rhs;
    std::vector<std::pair<int, double>> dirichlet; ///< sorted by node
    bool zero_mean = false;
    Vector zero_mean_weights; ///< w = M 1, so w^T u = int u ds

    int size() const { return static_cast<int>(rhs.size()); }
};

LinearSystem make_system(SparseMatrix matrix, Vector rhs);

/// Row/column elimination: constrained rows become identity rows and the
/// eliminated columns move to the right-hand side.
void apply_dirichlet(LinearSystem& system, std::span<const int> nodes, std::span<const double> values);
/// Borders the system with w = M 1 and a zero diagonal block.
void apply_zero_mean(LinearSystem& system, const SparseMatrix& mass);

/// The matrix actually factorized: bordered by w when zero_mean is set.
SparseMatrix constrained_matrix(const LinearSystem& system);
Vector constrained_rhs(const LinearSystem& system);

struct Solution {
    Vector u;
    double multiplier = 0.0;
    double residual = 0.0; ///< |Ax - b| / (|A| |x| + |b|) of the constrained system
};

Solution solve_direct(const LinearSystem& system);

/// Sparse LU (UMFPACK) of a real or complex matrix, factorized once and
/// reused for many right-hand sides.
template <class Scalar>
class SparseLU {
public:
    using Matrix = Eigen::SparseMatrix<Scalar>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    SparseLU();
    ~SparseLU();
    SparseLU(SparseLU&&) noexcept;
    SparseLU& operator=(SparseLU&&) noexcept;

    /// Throws SolverError when the matrix is singular.
    void factorize(const Matrix& A);
    Vec solve(const Vec& b) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

extern template class SparseLU<double>;
extern template class SparseLU<std::complex<double>>;

struct ConditionEstimate {
    double value = 0.0;
    double lambda_max = 0.0; ///< largest |eigenvalue|
    double lambda_min = 0.0; ///< smallest |eigenvalue|
    bool approximate = false; ///< an iteration hit its cap before the tolerance
    int iterations = 0;
};

/// 2-norm condition number of a symmetric matrix: power iteration for the
/// largest eigenvalue magnitude, inverse iteration (one LU) for the smallest.
ConditionEstimate condition_estimate(const SparseMatrix& A, double rel_tol = 1e-4, int max_iters = 10000);

} // namespace mfforge
