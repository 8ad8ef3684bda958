#pragma once

#include "mfforge/linear_system.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <memory>
#include <span>

namespace mfforge {

/// Number of the form rational + root15 * sqrt(15).
struct Surd15 {
    double rational = 0.0;
    double root15 = 0.0;

    double value() const;
};

struct ButcherTableau {
    std::array<std::array<Surd15, 3>, 3> A;
    std::array<Surd15, 3> b;
    std::array<Surd15, 3> c;

    Eigen::Matrix3d A_matrix() const;
    Eigen::Vector3d b_vector() const;
    Eigen::Vector3d c_vector() const;
};

/// Three-stage Gauss-Legendre collocation method (order 6).
ButcherTableau gauss_legendre_tableau();

/// M du/dt = load(t) - (lambda K + C) u with Dirichlet values on a node set.
struct TransientProblem {
    SparseMatrix M;
    SparseMatrix K;
    SparseMatrix C;
    double lambda = 0.0;
    std::function<Vector(double)> load; ///< empty means zero
    Vector u0;
    double t0 = 0.0;
    double t_end = 1.0;
    int n_steps = 1;
    std::vector<int> dirichlet_nodes;
    std::function<double(int node, double t)> dirichlet_value;

    void validate() const;
};

enum class StageSolver {
    coupled,      ///< one 3n x 3n LU
    diagonalized, ///< eigen-decomposition of A: one real and one complex n x n LU
};

/// Step operator for a fixed step size; factorizations are computed once.
class IrkIntegrator {
public:
    IrkIntegrator(const TransientProblem& problem, double dt, StageSolver solver = StageSolver::coupled);
    ~IrkIntegrator();
    IrkIntegrator(IrkIntegrator&&) noexcept;

    Vector step(double t, const Vector& u) const;
    double dt() const { return dt_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    double dt_;
};

/// One step with a throw-away factorization.
Vector irk_step(const TransientProblem& problem, double t, const Vector& u, double dt,
                StageSolver solver = StageSolver::coupled);

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
};

/// Uniform steps from t0 to t_end. States are recorded at the start, at the
/// first step reaching each checkpoint, and at the end. observer, when set,
/// sees every state.
Trajectory integrate(const TransientProblem& problem, std::span<const double> checkpoints = {},
                     StageSolver solver = StageSolver::coupled,
                     const std::function<void(double, const Vector&)>& observer = {});

} // namespace mfforge
