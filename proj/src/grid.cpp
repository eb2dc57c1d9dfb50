#include "nlsosc/grid.hpp"

#include "nlsosc/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

extern "C" void dgtsv_(const int* n, const int* nrhs, double* dl, double* d, double* du, double* b,
                       const int* ldb, int* info);

extern "C" void dgbsv_(const int* n, const int* kl, const int* ku, const int* nrhs, double* ab, const int* ldab,
                       int* ipiv, double* b, const int* ldb, int* info);

namespace nlsosc {

RadialGrid::RadialGrid(double r_max, int n_points) : r_max_(r_max)
{
    if (!(r_max > 0.0) || n_points < 16)
        fail(ErrorCode::ConfigInvalid, "grid needs r_max > 0 and at least 16 points");
    h_ = r_max / (n_points + 1);
    r_.resize(n_points);
    w_.resize(n_points);
    for (int i = 0; i < n_points; ++i) {
        r_[i] = (i + 1) * h_;
        w_[i] = 4.0 * std::numbers::pi * h_ * r_[i] * r_[i];
    }
}

double RadialGrid::inner(const Vec& a, const Vec& b) const { return (w_.array() * a.array() * b.array()).sum(); }

double RadialGrid::inner(const CVec& a, const CVec& b) const
{
    return (w_.array() * (a.array() * b.array().conjugate()).real()).sum();
}

double RadialGrid::norm(const Vec& a) const { return std::sqrt(inner(a, a)); }
double RadialGrid::norm(const CVec& a) const { return std::sqrt(inner(a, a)); }

double RadialGrid::dirichlet(const Vec& u) const
{
    const int n = size();
    double s = 0.0;
    double prev = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double v = i < n ? r_[i] * u[i] : 0.0;
        s += (v - prev) * (v - prev);
        prev = v;
    }
    return 4.0 * std::numbers::pi * s / h_;
}

double RadialGrid::dirichlet(const CVec& u) const { return dirichlet(Vec(u.real())) + dirichlet(Vec(u.imag())); }

double RadialGrid::h1_norm(const CVec& u) const { return std::sqrt(inner(u, u) + dirichlet(u)); }

double RadialGrid::omega(const CVec& u, const CVec& w) const
{
    return (w_.array() * (u.real().array() * w.imag().array() - u.imag().array() * w.real().array())).sum();
}

Vec RadialGrid::laplacian(const Vec& u) const
{
    const int n = size();
    Vec out(n);
    const double ih2 = 1.0 / (h_ * h_);
    for (int i = 0; i < n; ++i) {
        const double vm = i > 0 ? r_[i - 1] * u[i - 1] : 0.0;
        const double vp = i + 1 < n ? r_[i + 1] * u[i + 1] : 0.0;
        out[i] = (vp - 2.0 * r_[i] * u[i] + vm) * ih2 / r_[i];
    }
    return out;
}

Vec SymTridiag::apply(const Vec& v) const
{
    const auto n = diag.size();
    Vec out = diag.cwiseProduct(v);
    out.head(n - 1) += off.cwiseProduct(v.tail(n - 1));
    out.tail(n - 1) += off.cwiseProduct(v.head(n - 1));
    return out;
}

Vec SymTridiag::solve(const Vec& rhs) const
{
    const int n = static_cast<int>(diag.size());
    Vec dl = off, d = diag, du = off, b = rhs;
    const int nrhs = 1;
    int info = 0;
    dgtsv_(&n, &nrhs, dl.data(), d.data(), du.data(), b.data(), &n, &info);
    if (info != 0) fail(ErrorCode::LinearSolveFailure, "tridiagonal solve, info = " + std::to_string(info));
    return b;
}

BandMatrix::BandMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1), ab_(static_cast<std::size_t>(ld_) * n, 0.0)
{
}

double& BandMatrix::operator()(int i, int j)
{
    if (i - j > kl_ || j - i > ku_ || i < 0 || j < 0 || i >= n_ || j >= n_)
        fail(ErrorCode::OutOfRange, "entry outside the band");
    return ab_[static_cast<std::size_t>(j) * ld_ + (kl_ + ku_ + i - j)];
}

Vec BandMatrix::solve(const Vec& rhs) const
{
    std::vector<double> ab = ab_;
    std::vector<int> ipiv(n_);
    Vec b = rhs;
    const int nrhs = 1;
    int info = 0;
    dgbsv_(&n_, &kl_, &ku_, &nrhs, ab.data(), &ld_, ipiv.data(), b.data(), &n_, &info);
    if (info != 0) fail(ErrorCode::LinearSolveFailure, "banded solve, info = " + std::to_string(info));
    return b;
}

SymTridiag schrodinger_v(const RadialGrid& grid, double shift, const Vec& potential)
{
    const int n = grid.size();
    const double ih2 = 1.0 / (grid.h() * grid.h());
    SymTridiag m;
    m.diag = Vec::Constant(n, 2.0 * ih2 + shift) + potential;
    m.off = Vec::Constant(n - 1, -ih2);
    return m;
}

}  // namespace nlsosc
