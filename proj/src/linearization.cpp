#include "nlsosc/linearization.hpp"

#include "nlsosc/error.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace nlsosc {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

double max_abs(const Vec& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

Vec LinearizedOperators::apply_plus(const Vec& u) const
{
    return plus.apply(grid.r().cwiseProduct(u)).cwiseQuotient(grid.r());
}

Vec LinearizedOperators::apply_minus(const Vec& u) const
{
    return minus.apply(grid.r().cwiseProduct(u)).cwiseQuotient(grid.r());
}

Vec LinearizedOperators::solve_plus(const Vec& f) const
{
    return plus.solve(grid.r().cwiseProduct(f)).cwiseQuotient(grid.r());
}

LinearizedOperators assemble_operators(const RadialGrid& grid, const Nonlinearity& nl, double omega, const Vec& phi)
{
    LinearizedOperators ops;
    ops.grid = grid;
    ops.omega = omega;
    ops.phi = phi;
    Vec vp(phi.size()), vm(phi.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        const double s = phi[i] * phi[i];
        vm[i] = nl.g(s);
        vp[i] = vm[i] + 2.0 * nl.dg(s) * s;
    }
    ops.plus = schrodinger_v(grid, omega, vp);
    ops.minus = schrodinger_v(grid, omega, vm);
    ops.dphi = -ops.solve_plus(phi);
    return ops;
}

LinearizedOperators assemble_operators(const GroundStateFamily& family, double omega)
{
    const RadialProfile prof = family.profile_at(omega);
    return assemble_operators(family.grid(), family.nonlinearity(), omega, prof.u);
}

CVec KernelBasis::psi(int j) const
{
    const std::complex<double> I(0.0, 1.0);
    switch (j) {
    case 1: return I * phi.cast<std::complex<double>>();
    case 2: return dphi.cast<std::complex<double>>();
    case 3: return I * eta.cast<std::complex<double>>();
    case 4: return zeta.cast<std::complex<double>>();
    default: fail(ErrorCode::OutOfRange, "kernel vector index must be 1..4");
    }
}

KernelBasis generalized_kernel(const LinearizedOperators& ops, const KernelOptions& opts)
{
    const RadialGrid& grid = ops.grid;
    const int n = grid.size();
    const Vec& r = grid.r();
    const Vec phiv = r.cwiseProduct(ops.phi);
    const Vec dphiv = r.cwiseProduct(ops.dphi);

    // The constraint row <eta, phi> = 0 and the multiplier column are spread over
    // running-sum unknowns t_i and copies s_i, so the system stays banded.
    // Unknowns per node: (v_zeta_i, v_eta_i, t_i, s_i).
    const int dim = 4 * n;
    auto col = [](int i, int c) { return 4 * i + c; };
    Vec rhs = Vec::Zero(dim);
    for (int i = 0; i < n; ++i) rhs[col(i, 1)] = dphiv[i];

    KernelBasis k;
    k.omega = ops.omega;
    k.phi = ops.phi;
    k.dphi = ops.dphi;
    k.dq = grid.inner(ops.phi, ops.dphi);

    double a = 0.0;
    Vec zeta(n), eta(n);
    bool converged = false;
    for (int it = 0; it < opts.max_iterations; ++it) {
        BandMatrix m(dim, 4, 4);
        for (int i = 0; i < n; ++i) {
            m(col(i, 0), col(i, 0)) = ops.plus.diag[i];
            m(col(i, 0), col(i, 1)) = 1.0;
            m(col(i, 1), col(i, 0)) = -a;
            m(col(i, 1), col(i, 1)) = ops.minus.diag[i];
            m(col(i, 1), col(i, 3)) = phiv[i];
            m(col(i, 2), col(i, 2)) = 1.0;
            m(col(i, 2), col(i, 1)) = -phiv[i];
            if (i > 0) {
                m(col(i, 0), col(i - 1, 0)) = ops.plus.off[i - 1];
                m(col(i, 1), col(i - 1, 1)) = ops.minus.off[i - 1];
                m(col(i, 2), col(i - 1, 2)) = -1.0;
            }
            if (i + 1 < n) {
                m(col(i, 0), col(i + 1, 0)) = ops.plus.off[i];
                m(col(i, 1), col(i + 1, 1)) = ops.minus.off[i];
                m(col(i, 3), col(i, 3)) = 1.0;
                m(col(i, 3), col(i + 1, 3)) = -1.0;
            } else {
                m(col(i, 3), col(i, 2)) = 1.0;
            }
        }
        Vec sol;
        try {
            sol = m.solve(rhs);
        } catch (const Error& e) {
            fail(ErrorCode::SingularSolve, std::string("chain system: ") + e.what());
        }
        for (int i = 0; i < n; ++i) {
            zeta[i] = sol[col(i, 0)] / r[i];
            eta[i] = sol[col(i, 1)] / r[i];
        }
        const double pz = grid.inner(zeta, ops.phi);
        if (!(std::abs(pz) > 0.0)) fail(ErrorCode::SingularSolve, "<zeta, phi> vanishes");
        const double a_next = -k.dq / pz;
        k.iterations = it + 1;
        const double floor = 1e-12 * grid.norm(ops.phi) * grid.norm(ops.dphi) / std::abs(pz);
        if (std::abs(a_next - a) <= opts.a_tol * std::abs(a_next) + floor) {
            converged = true;
            break;
        }
        a = a_next;
    }
    if (!converged) fail(ErrorCode::NotConverged, "fixed point for the chain coefficient a did not converge");

    k.a = a;
    k.zeta = std::move(zeta);
    k.eta = std::move(eta);
    k.A = grid.inner(k.dphi, k.eta);
    k.B = -grid.inner(k.eta, k.zeta);
    if (!(k.A > 0.0))
        fail(ErrorCode::SingularSolve, "pairing A = " + std::to_string(k.A) + " is not positive");
    return k;
}

KernelBasis kernel_at(const GroundStateFamily& family, double omega, const KernelOptions& opts)
{
    return generalized_kernel(assemble_operators(family, omega), opts);
}

ChainResiduals chain_residuals(const LinearizedOperators& ops, const KernelBasis& k)
{
    ChainResiduals c;
    const double pn = max_abs(k.phi);
    c.minus_phi = max_abs(ops.apply_minus(k.phi)) / pn;
    c.plus_dphi = max_abs(ops.apply_plus(k.dphi) + k.phi) / pn;
    c.plus_zeta = max_abs(ops.apply_plus(k.zeta) + k.eta) / max_abs(k.eta);
    c.minus_eta = max_abs(ops.apply_minus(k.eta) - k.dphi - k.a * k.zeta) / max_abs(k.dphi);
    c.eta_phi = std::abs(ops.grid.inner(k.eta, k.phi)) / (ops.grid.norm(k.eta) * ops.grid.norm(k.phi));
    return c;
}

Eigen::Matrix4d pairing_matrix(const RadialGrid& grid, const KernelBasis& k)
{
    Eigen::Matrix4d m;
    CVec psi[4] = {k.psi(1), k.psi(2), k.psi(3), k.psi(4)};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = grid.omega(psi[i], psi[j]);
    return m;
}

std::vector<std::complex<double>> small_eigenvalues(const LinearizedOperators& ops, const KernelBasis& k,
                                                    const EigenOptions& opts)
{
    const int n = ops.grid.size();
    double sigma = opts.shift;
    if (sigma == 0.0) sigma = std::max(0.5 * std::sqrt(std::abs(k.a)), 1e-3);

    std::vector<Triplet> trips;
    for (int i = 0; i < n; ++i) {
        trips.emplace_back(i, n + i, ops.minus.diag[i]);
        trips.emplace_back(n + i, i, -ops.plus.diag[i]);
        trips.emplace_back(i, i, -sigma);
        trips.emplace_back(n + i, n + i, -sigma);
        if (i + 1 < n) {
            trips.emplace_back(i, n + i + 1, ops.minus.off[i]);
            trips.emplace_back(i + 1, n + i, ops.minus.off[i]);
            trips.emplace_back(n + i, i + 1, -ops.plus.off[i]);
            trips.emplace_back(n + i + 1, i, -ops.plus.off[i]);
        }
    }
    SpMat m(2 * n, 2 * n);
    m.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu(m);
    if (lu.info() != Eigen::Success) fail(ErrorCode::EigensolverFailure, "shifted generator factorization failed");

    const int dim = std::min(opts.krylov_dim, 2 * n - 1);
    Eigen::MatrixXd V(2 * n, dim + 1);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim + 1, dim);
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal;
    Vec v0(2 * n);
    for (auto& x : v0) x = normal(rng);
    V.col(0) = v0.normalized();

    int m_used = dim;
    for (int j = 0; j < dim; ++j) {
        Vec w = lu.solve(V.col(j));
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i <= j; ++i) {
                const double hij = V.col(i).dot(w);
                H(i, j) += hij;
                w -= hij * V.col(i);
            }
        }
        H(j + 1, j) = w.norm();
        if (H(j + 1, j) < 1e-13 * H.col(j).norm()) {
            m_used = j + 1;
            break;
        }
        V.col(j + 1) = w / H(j + 1, j);
    }

    Eigen::EigenSolver<Eigen::MatrixXd> es(H.topLeftCorner(m_used, m_used));
    if (es.info() != Eigen::Success) fail(ErrorCode::EigensolverFailure, "Hessenberg eigenproblem failed");
    const double beta = m_used < dim + 1 ? H(m_used, m_used - 1) : 0.0;

    std::vector<std::complex<double>> out;
    for (int i = 0; i < m_used; ++i) {
        const std::complex<double> theta = es.eigenvalues()[i];
        if (std::abs(theta) == 0.0) continue;
        const Eigen::VectorXcd y = es.eigenvectors().col(i).normalized();
        const double resid = std::abs(beta * y[m_used - 1]) / std::abs(theta);
        const std::complex<double> lambda = sigma + 1.0 / theta;
        if (std::abs(lambda) <= opts.radius && resid <= 1e-6) out.push_back(lambda);
    }
    if (out.empty()) fail(ErrorCode::EigensolverFailure, "no converged eigenvalues within the radius");
    std::sort(out.begin(), out.end(), [](auto x, auto y) { return std::abs(x) < std::abs(y); });
    return out;
}

}  // namespace nlsosc
