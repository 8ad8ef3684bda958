#include "mfforge/timeint.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace mfforge {

double Surd15::value() const { return rational + root15 * std::sqrt(15.0); }

Eigen::Matrix3d ButcherTableau::A_matrix() const
{
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            m(i, j) = A[i][j].value();
    return m;
}

Eigen::Vector3d ButcherTableau::b_vector() const { return {b[0].value(), b[1].value(), b[2].value()}; }

Eigen::Vector3d ButcherTableau::c_vector() const { return {c[0].value(), c[1].value(), c[2].value()}; }

ButcherTableau gauss_legendre_tableau()
{
    ButcherTableau t;
    using S = Surd15;
    t.A[0] = {S{5.0 / 36.0, 0.0}, S{2.0 / 9.0, -1.0 / 15.0}, S{5.0 / 36.0, -1.0 / 30.0}};
    t.A[1] = {S{5.0 / 36.0, 1.0 / 24.0}, S{2.0 / 9.0, 0.0}, S{5.0 / 36.0, -1.0 / 24.0}};
    t.A[2] = {S{5.0 / 36.0, 1.0 / 30.0}, S{2.0 / 9.0, 1.0 / 15.0}, S{5.0 / 36.0, 0.0}};
    t.b = {S{5.0 / 18.0, 0.0}, S{4.0 / 9.0, 0.0}, S{5.0 / 18.0, 0.0}};
    t.c = {S{0.5, -1.0 / 10.0}, S{0.5, 0.0}, S{0.5, 1.0 / 10.0}};
    return t;
}

void TransientProblem::validate() const
{
    const auto n = M.rows();
    if (n_steps < 1)
        throw ArgumentError("number of time steps must be >= 1");
    if (M.cols() != n || K.rows() != n || K.cols() != n || C.rows() != n || C.cols() != n || u0.size() != n)
        throw ArgumentError("transient problem matrices have inconsistent sizes");
    if (!(t_end > t0))
        throw ArgumentError("end time must exceed the start time");
    if (!dirichlet_nodes.empty() && !dirichlet_value)
        throw ArgumentError("Dirichlet nodes given without values");
}

namespace {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::SparseMatrix<Complex>;
using ComplexVector = Eigen::VectorXcd;

SparseMatrix select(const SparseMatrix& A, const std::vector<int>& rows, const std::vector<int>& cols)
{
    std::vector<int> rmap(A.rows(), -1), cmap(A.cols(), -1);
    for (std::size_t i = 0; i < rows.size(); ++i)
        rmap[rows[i]] = static_cast<int>(i);
    for (std::size_t j = 0; j < cols.size(); ++j)
        cmap[cols[j]] = static_cast<int>(j);
    std::vector<Eigen::Triplet<double>> t;
    for (int j = 0; j < A.outerSize(); ++j) {
        if (cmap[j] < 0)
            continue;
        for (SparseMatrix::InnerIterator it(A, j); it; ++it)
            if (rmap[it.row()] >= 0)
                t.emplace_back(rmap[it.row()], cmap[j], it.value());
    }
    SparseMatrix out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

} // namespace

struct IrkIntegrator::Impl {
    const TransientProblem& problem;
    StageSolver solver;
    Eigen::Matrix3d A;
    Eigen::Vector3d b, c;
    Eigen::Matrix3d A_inv;
    SparseMatrix S; // lambda K + C, full
    std::vector<int> free, fixed;
    SparseMatrix M_ff, S_ff, M_fd, S_fd;

    SparseLU<double> coupled_lu;
    SparseLU<double> real_lu;
    SparseLU<Complex> complex_lu;
    Eigen::Matrix3cd V, V_inv;
    int real_index = 0, complex_index = 1;

    Impl(const TransientProblem& p, double dt, StageSolver s) : problem(p), solver(s)
    {
        auto tab = gauss_legendre_tableau();
        A = tab.A_matrix();
        b = tab.b_vector();
        c = tab.c_vector();
        A_inv = A.inverse();
        S = p.lambda * p.K + p.C;

        const int n = static_cast<int>(p.M.rows());
        std::vector<char> is_fixed(n, 0);
        for (int d : p.dirichlet_nodes) {
            if (d < 0 || d >= n)
                throw ArgumentError("Dirichlet node out of range");
            is_fixed[d] = 1;
        }
        for (int i = 0; i < n; ++i)
            (is_fixed[i] ? fixed : free).push_back(i);
        M_ff = select(p.M, free, free);
        S_ff = select(S, free, free);
        M_fd = select(p.M, free, fixed);
        S_fd = select(S, free, fixed);
        const int nf = static_cast<int>(free.size());

        if (s == StageSolver::coupled) {
            std::vector<Eigen::Triplet<double>> t;
            for (int bi = 0; bi < 3; ++bi)
                for (int bj = 0; bj < 3; ++bj) {
                    for (int j = 0; j < S_ff.outerSize(); ++j)
                        for (SparseMatrix::InnerIterator it(S_ff, j); it; ++it)
                            t.emplace_back(bi * nf + it.row(), bj * nf + j, dt * A(bi, bj) * it.value());
                    if (bi == bj)
                        for (int j = 0; j < M_ff.outerSize(); ++j)
                            for (SparseMatrix::InnerIterator it(M_ff, j); it; ++it)
                                t.emplace_back(bi * nf + it.row(), bj * nf + j, it.value());
                }
            SparseMatrix big(3 * nf, 3 * nf);
            big.setFromTriplets(t.begin(), t.end());
            coupled_lu.factorize(big);
            return;
        }

        Eigen::EigenSolver<Eigen::Matrix3d> eig(A);
        V = eig.eigenvectors();
        V_inv = V.inverse();
        auto lambda = eig.eigenvalues();
        for (int k = 0; k < 3; ++k) {
            if (std::abs(lambda[k].imag()) < 1e-12)
                real_index = k;
            else if (lambda[k].imag() > 0.0)
                complex_index = k;
        }
        SparseMatrix real_op = M_ff + (dt * lambda[real_index].real()) * S_ff;
        real_lu.factorize(real_op);
        ComplexMatrix complex_op = M_ff.cast<Complex>() + (dt * lambda[complex_index]) * S_ff.cast<Complex>();
        complex_lu.factorize(complex_op);
    }
};

IrkIntegrator::IrkIntegrator(const TransientProblem& problem, double dt, StageSolver solver)
    : impl_(nullptr), dt_(dt)
{
    problem.validate();
    if (!(dt > 0.0))
        throw ArgumentError("time step must be positive");
    impl_ = std::make_unique<Impl>(problem, dt, solver);
}

IrkIntegrator::~IrkIntegrator() = default;
IrkIntegrator::IrkIntegrator(IrkIntegrator&&) noexcept = default;

Vector IrkIntegrator::step(double t, const Vector& u) const
{
    const Impl& m = *impl_;
    const auto& p = m.problem;
    const double dt = dt_;
    const int nf = static_cast<int>(m.free.size());
    const int nd = static_cast<int>(m.fixed.size());

    // stage derivatives on Dirichlet nodes follow from the prescribed stage values
    std::array<Vector, 3> kd;
    for (auto& v : kd)
        v.setZero(nd);
    if (nd > 0) {
        Eigen::Matrix<double, 3, Eigen::Dynamic> target(3, nd);
        for (int i = 0; i < 3; ++i)
            for (int d = 0; d < nd; ++d)
                target(i, d) = (p.dirichlet_value(m.fixed[d], t + m.c[i] * dt) - u[m.fixed[d]]) / dt;
        Eigen::Matrix<double, 3, Eigen::Dynamic> k = m.A_inv * target;
        for (int i = 0; i < 3; ++i)
            kd[i] = k.row(i).transpose();
    }

    const Vector Su = m.S * u;
    std::array<Vector, 3> r;
    for (int i = 0; i < 3; ++i) {
        Vector full = -Su;
        if (p.load)
            full += p.load(t + m.c[i] * dt);
        Vector rf(nf);
        for (int f = 0; f < nf; ++f)
            rf[f] = full[m.free[f]];
        if (nd > 0) {
            rf -= m.M_fd * kd[i];
            Vector coupling = Vector::Zero(nd);
            for (int j = 0; j < 3; ++j)
                coupling += m.A(i, j) * kd[j];
            rf -= dt * (m.S_fd * coupling);
        }
        r[i] = std::move(rf);
    }

    std::array<Vector, 3> k;
    if (m.solver == StageSolver::coupled) {
        Vector big(3 * nf);
        for (int i = 0; i < 3; ++i)
            big.segment(i * nf, nf) = r[i];
        Vector sol = m.coupled_lu.solve(big);
        for (int i = 0; i < 3; ++i)
            k[i] = sol.segment(i * nf, nf);
    }
    else {
        auto transformed = [&](int row) {
            ComplexVector z = ComplexVector::Zero(nf);
            for (int j = 0; j < 3; ++j)
                z += m.V_inv(row, j) * r[j].cast<Complex>();
            return z;
        };
        const ComplexVector zr_rhs = transformed(m.real_index);
        Vector re = zr_rhs.real(), im = zr_rhs.imag();
        ComplexVector zr(nf);
        zr.real() = m.real_lu.solve(re);
        zr.imag() = im.cwiseAbs().maxCoeff() > 0.0 ? Vector(m.real_lu.solve(im)) : Vector::Zero(nf);
        const ComplexVector zc = m.complex_lu.solve(transformed(m.complex_index));
        for (int i = 0; i < 3; ++i)
            k[i] = (m.V(i, m.real_index) * zr + 2.0 * m.V(i, m.complex_index) * zc).real();
    }

    Vector next = u;
    for (int f = 0; f < nf; ++f)
        next[m.free[f]] += dt * (m.b[0] * k[0][f] + m.b[1] * k[1][f] + m.b[2] * k[2][f]);
    for (int d = 0; d < nd; ++d)
        next[m.fixed[d]] = p.dirichlet_value(m.fixed[d], t + dt);
    return next;
}

Vector irk_step(const TransientProblem& problem, double t, const Vector& u, double dt, StageSolver solver)
{
    return IrkIntegrator(problem, dt, solver).step(t, u);
}

Trajectory integrate(const TransientProblem& problem, std::span<const double> checkpoints, StageSolver solver,
                     const std::function<void(double, const Vector&)>& observer)
{
    problem.validate();
    const double dt = (problem.t_end - problem.t0) / problem.n_steps;
    IrkIntegrator irk(problem, dt, solver);
    Trajectory out;
    Vector u = problem.u0;
    out.times.push_back(problem.t0);
    out.states.push_back(u);
    if (observer)
        observer(problem.t0, u);
    std::vector<double> pending(checkpoints.begin(), checkpoints.end());
    std::sort(pending.begin(), pending.end());
    std::size_t next_cp = 0;
    while (next_cp < pending.size() && pending[next_cp] <= problem.t0)
        ++next_cp;
    for (int s = 0; s < problem.n_steps; ++s) {
        const double t = problem.t0 + s * dt;
        u = irk.step(t, u);
        const double t_next = s + 1 == problem.n_steps ? problem.t_end : problem.t0 + (s + 1) * dt;
        if (observer)
            observer(t_next, u);
        bool record = s + 1 == problem.n_steps;
        while (next_cp < pending.size() && pending[next_cp] <= t_next + 1e-12 * dt) {
            record = true;
            ++next_cp;
        }
        if (record) {
            out.times.push_back(t_next);
            out.states.push_back(u);
        }
    }
    return out;
}

} // namespace mfforge
