#pragma once

#include <Eigen/Core>

#include <vector>

namespace nlsosc {

using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

// Interior nodes r_i = i h, i = 1..n, h = r_max / (n + 1). Radial functions are
// stored as u(r_i); the operators act on v = r u with v(0) = v(r_max) = 0.
class RadialGrid {
public:
    RadialGrid() = default;
    RadialGrid(double r_max, int n_points);

    int size() const { return static_cast<int>(r_.size()); }
    double h() const { return h_; }
    double r_max() const { return r_max_; }
    const Vec& r() const { return r_; }
    // 4 pi h r_i^2: quadrature weights of the radial L2 pairing
    const Vec& weights() const { return w_; }

    double inner(const Vec& a, const Vec& b) const;
    double inner(const CVec& a, const CVec& b) const;  // Re <a, b>
    double norm(const Vec& a) const;
    double norm(const CVec& a) const;
    // int |grad u|^2 from first differences of v (matches the discrete energy)
    double dirichlet(const Vec& u) const;
    double dirichlet(const CVec& u) const;
    double h1_norm(const CVec& u) const;
    // Omega(u, w) = int (Re u Im w - Im u Re w) = -Im int u conj(w)
    double omega(const CVec& u, const CVec& w) const;

    Vec laplacian(const Vec& u) const;

    bool operator==(const RadialGrid& o) const { return r_max_ == o.r_max_ && size() == o.size(); }

private:
    double r_max_ = 0.0;
    double h_ = 0.0;
    Vec r_;
    Vec w_;
};

// Symmetric tridiagonal matrix on the v-grid.
struct SymTridiag {
    Vec diag;
    Vec off;  // size n - 1

    Vec apply(const Vec& v) const;
    Vec solve(const Vec& rhs) const;  // partial pivoting, throws LinearSolveFailure
};

// General banded matrix, LU with partial pivoting.
class BandMatrix {
public:
    BandMatrix(int n, int kl, int ku);
    double& operator()(int i, int j);
    Vec solve(const Vec& rhs) const;  // throws LinearSolveFailure

private:
    int n_, kl_, ku_, ld_;
    std::vector<double> ab_;
};

// -d^2/dr^2 + shift + potential, acting on v
SymTridiag schrodinger_v(const RadialGrid& grid, double shift, const Vec& potential);

}  // namespace nlsosc
