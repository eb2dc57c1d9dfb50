#pragma once

#include "nlsosc/ground_family.hpp"

#include <complex>
#include <vector>

namespace nlsosc {

// L+ = -Lap + omega + g(phi^2) + 2 g'(phi^2) phi^2,  L- = -Lap + omega + g(phi^2).
// The matrices act on v = r u; apply_* act on u.
struct LinearizedOperators {
    RadialGrid grid;
    double omega = 0.0;
    Vec phi;
    Vec dphi;  // d_omega phi = -L+^{-1} phi
    SymTridiag plus;
    SymTridiag minus;

    Vec apply_plus(const Vec& u) const;
    Vec apply_minus(const Vec& u) const;
    Vec solve_plus(const Vec& f) const;
};

LinearizedOperators assemble_operators(const RadialGrid& grid, const Nonlinearity& nl, double omega, const Vec& phi);
// Profile from the family node when omega is a node, otherwise a fresh seeded solve.
LinearizedOperators assemble_operators(const GroundStateFamily& family, double omega);

struct KernelOptions {
    int max_iterations = 60;
    double a_tol = 1e-13;  // relative change of a between fixed-point sweeps
};

// Generalized kernel of the generator in the (real, imaginary) splitting:
// Psi1 = i phi, Psi2 = d_omega phi, Psi3 = i eta, Psi4 = zeta with
// L+ zeta = -eta, L- eta = d_omega phi + a zeta, <eta, phi> = 0.
struct KernelBasis {
    double omega = 0.0;
    Vec phi;
    Vec dphi;
    Vec eta;
    Vec zeta;
    double A = 0.0;   // Omega(Psi2, Psi3) = <dphi, eta>
    double B = 0.0;   // Omega(Psi3, Psi4) = -<eta, zeta>
    double a = 0.0;
    double dq = 0.0;  // <phi, dphi>
    int iterations = 0;

    CVec psi(int j) const;  // j = 1..4 as complex fields
};

KernelBasis generalized_kernel(const LinearizedOperators& ops, const KernelOptions& opts = {});
KernelBasis kernel_at(const GroundStateFamily& family, double omega, const KernelOptions& opts = {});

struct ChainResiduals {
    double minus_phi = 0.0;   // |L- phi| / |phi|
    double plus_dphi = 0.0;   // |L+ dphi + phi| / |phi|
    double plus_zeta = 0.0;   // |L+ zeta + eta| / |eta|
    double minus_eta = 0.0;   // |L- eta - dphi - a zeta| / |dphi|
    double eta_phi = 0.0;     // |<eta, phi>| / (|eta| |phi|)
};

ChainResiduals chain_residuals(const LinearizedOperators& ops, const KernelBasis& k);

// Gram matrix Omega(Psi_i, Psi_j), i, j = 1..4
Eigen::Matrix4d pairing_matrix(const RadialGrid& grid, const KernelBasis& k);

struct EigenOptions {
    double radius = 0.02;
    double shift = 0.0;      // 0 selects a shift from |a|
    int krylov_dim = 60;
    unsigned seed = 12345;
};

// Eigenvalues of [[0, L-], [-L+, 0]] within the radius, by shift-invert Arnoldi,
// sorted by modulus.
std::vector<std::complex<double>> small_eigenvalues(const LinearizedOperators& ops, const KernelBasis& k,
                                                    const EigenOptions& opts = {});

}  // namespace nlsosc
