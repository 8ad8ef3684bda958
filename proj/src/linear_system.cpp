#include "mfforge/linear_system.hpp"

#include <Eigen/UmfPackSupport>

#include <algorithm>
#include <cmath>
#include <random>

namespace mfforge {

LinearSystem make_system(SparseMatrix matrix, Vector rhs)
{
    if (matrix.rows() != matrix.cols() || matrix.rows() != rhs.size())
        throw ArgumentError("system matrix and right-hand side sizes differ");
    LinearSystem s;
    s.matrix = std::move(matrix);
    s.rhs = std::move(rhs);
    return s;
}

void apply_dirichlet(LinearSystem& system, std::span<const int> nodes, std::span<const double> values)
{
    if (nodes.size() != values.size())
        throw ArgumentError("Dirichlet node and value lists differ in length");
    if (system.zero_mean)
        throw ArgumentError("Dirichlet conditions cannot be combined with the zero-mean constraint");
    const int n = system.size();
    std::vector<char> fixed(n, 0);
    std::vector<double> g(n, 0.0);
    for (auto [node, value] : system.dirichlet) {
        fixed[node] = 1;
        g[node] = value;
    }
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (nodes[k] < 0 || nodes[k] >= n)
            throw ArgumentError("Dirichlet node " + std::to_string(nodes[k]) + " is not in the mesh");
        fixed[nodes[k]] = 1;
        g[nodes[k]] = values[k];
    }

    std::vector<Eigen::Triplet<double>> kept;
    kept.reserve(system.matrix.nonZeros());
    for (int j = 0; j < system.matrix.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(system.matrix, j); it; ++it) {
            const int i = static_cast<int>(it.row());
            if (fixed[i])
                continue;
            if (fixed[j]) {
                system.rhs[i] -= it.value() * g[j];
                continue;
            }
            kept.emplace_back(i, j, it.value());
        }
    system.dirichlet.clear();
    for (int i = 0; i < n; ++i)
        if (fixed[i]) {
            kept.emplace_back(i, i, 1.0);
            system.rhs[i] = g[i];
            system.dirichlet.emplace_back(i, g[i]);
        }
    SparseMatrix A(n, n);
    A.setFromTriplets(kept.begin(), kept.end());
    system.matrix = std::move(A);
}

void apply_zero_mean(LinearSystem& system, const SparseMatrix& mass)
{
    if (!system.dirichlet.empty())
        throw ArgumentError("the zero-mean constraint cannot be combined with Dirichlet conditions");
    if (mass.rows() != system.size())
        throw ArgumentError("mass matrix size differs from the system");
    system.zero_mean = true;
    system.zero_mean_weights = mass * Vector::Ones(system.size());
}

SparseMatrix constrained_matrix(const LinearSystem& system)
{
    if (!system.zero_mean)
        return system.matrix;
    const int n = system.size();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(system.matrix.nonZeros() + 2 * n);
    for (int j = 0; j < system.matrix.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(system.matrix, j); it; ++it)
            t.emplace_back(static_cast<int>(it.row()), j, it.value());
    for (int i = 0; i < n; ++i) {
        t.emplace_back(i, n, system.zero_mean_weights[i]);
        t.emplace_back(n, i, system.zero_mean_weights[i]);
    }
    SparseMatrix A(n + 1, n + 1);
    A.setFromTriplets(t.begin(), t.end());
    return A;
}

Vector constrained_rhs(const LinearSystem& system)
{
    if (!system.zero_mean)
        return system.rhs;
    Vector b(system.size() + 1);
    b.head(system.size()) = system.rhs;
    b[system.size()] = 0.0;
    return b;
}

template <class Scalar>
struct SparseLU<Scalar>::Impl {
    Eigen::SparseMatrix<Scalar> A; // UmfPackLU reads the matrix again in solve
    Eigen::UmfPackLU<Eigen::SparseMatrix<Scalar>> lu;
};

template <class Scalar>
SparseLU<Scalar>::SparseLU() : impl_(std::make_unique<Impl>())
{
}

template <class Scalar>
SparseLU<Scalar>::~SparseLU() = default;

template <class Scalar>
SparseLU<Scalar>::SparseLU(SparseLU&&) noexcept = default;

template <class Scalar>
SparseLU<Scalar>& SparseLU<Scalar>::operator=(SparseLU&&) noexcept = default;

template <class Scalar>
void SparseLU<Scalar>::factorize(const Matrix& A)
{
    impl_->A = A;
    impl_->A.makeCompressed();
    impl_->lu.umfpackControl()(UMFPACK_IRSTEP) = 0;
    impl_->lu.compute(impl_->A);
    if (impl_->lu.info() != Eigen::Success)
        throw SolverError("sparse LU factorization failed (singular matrix)");
}

template <class Scalar>
typename SparseLU<Scalar>::Vec SparseLU<Scalar>::solve(const Vec& b) const
{
    Vec x = impl_->lu.solve(b);
    if (impl_->lu.info() != Eigen::Success)
        throw SolverError("sparse LU solve failed");
    return x;
}

template class SparseLU<double>;
template class SparseLU<std::complex<double>>;

Solution solve_direct(const LinearSystem& system)
{
    const SparseMatrix A = constrained_matrix(system);
    const Vector b = constrained_rhs(system);
    SparseLU<double> lu;
    lu.factorize(A);
    Vector x = lu.solve(b);
    if (!x.allFinite())
        throw SolverError("direct solve produced non-finite values");
    Solution s;
    s.residual = (A * x - b).norm() / (A.norm() * x.norm() + b.norm());
    if (system.zero_mean) {
        s.multiplier = x[system.size()];
        s.u = x.head(system.size());
    }
    else {
        s.u = std::move(x);
    }
    return s;
}

ConditionEstimate condition_estimate(const SparseMatrix& A, double rel_tol, int max_iters)
{
    const int n = static_cast<int>(A.rows());
    if (n == 0 || A.cols() != n)
        throw ArgumentError("condition estimate needs a non-empty square matrix");
    ConditionEstimate est;
    std::mt19937_64 rng(20240607);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vector start(n);
    for (int i = 0; i < n; ++i)
        start[i] = dist(rng);
    start.normalize();

    auto iterate = [&](auto&& apply, double& value) {
        Vector x = start;
        double prev = 0.0;
        for (int it = 1; it <= max_iters; ++it) {
            Vector y = apply(x);
            value = y.norm();
            est.iterations += 1;
            if (!(value > 0.0))
                return;
            x = y / value;
            if (it > 1 && std::abs(value - prev) <= rel_tol * value)
                return;
            prev = value;
        }
        est.approximate = true;
    };

    iterate([&](const Vector& x) { return Vector(A * x); }, est.lambda_max);
    SparseLU<double> lu;
    lu.factorize(A);
    double inv = 0.0;
    iterate([&](const Vector& x) { return lu.solve(x); }, inv);
    est.lambda_min = 1.0 / inv;
    est.value = est.lambda_max / est.lambda_min;
    return est;
}

} // namespace mfforge
