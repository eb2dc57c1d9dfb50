#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include "nlsosc/linearization.hpp"

#include <random>

using namespace nlsosc;
using testing::error_of;
using testing::rel;

namespace {

Vec random_decaying(const RadialGrid& grid, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    Vec u(grid.size());
    for (int i = 0; i < grid.size(); ++i) u[i] = n01(rng) * std::exp(-grid.r()[i] / 20.0);
    // smooth so the operator values stay O(1)
    Vec s = u;
    for (int k = 0; k < 50; ++k)
        for (int i = 1; i + 1 < grid.size(); ++i) s[i] = 0.25 * u[i - 1] + 0.5 * u[i] + 0.25 * u[i + 1], u = s;
    return u;
}

}  // namespace

TEST_CASE("operators are symmetric in the radial pairing") {
    const auto& f = testing::bundle().family;
    auto ops = assemble_operators(*f, 0.05);
    const auto& g = ops.grid;
    Vec a = random_decaying(g, 1), b = random_decaying(g, 2);
    double sp = g.inner(ops.apply_plus(a), b), sp2 = g.inner(a, ops.apply_plus(b));
    double sm = g.inner(ops.apply_minus(a), b), sm2 = g.inner(a, ops.apply_minus(b));
    CHECK(std::abs(sp - sp2) <= 1e-12 * (std::abs(sp) + g.norm(a) * g.norm(b)));
    CHECK(std::abs(sm - sm2) <= 1e-12 * (std::abs(sm) + g.norm(a) * g.norm(b)));
}

TEST_CASE("phi spans the kernel of L- and d_omega phi solves L+ dphi = -phi") {
    const auto& f = *testing::bundle().family;
    const auto& g = f.grid();
    double w = 0.05, s = 1e-5;
    auto ops = assemble_operators(f, w);
    CHECK(g.norm(ops.apply_minus(ops.phi)) < 1e-8 * g.norm(ops.phi));
    // independent d_omega phi from two fresh solves
    auto lo = solve_ground_state(w - s, g, f.nonlinearity());
    auto hi = solve_ground_state(w + s, g, f.nonlinearity());
    Vec fd = (hi.u - lo.u) / (2 * s);
    CHECK(g.norm(Vec(fd - ops.dphi)) < 1e-4 * g.norm(ops.dphi));
    CHECK(g.norm(Vec(ops.apply_plus(ops.dphi) + ops.phi)) < 1e-6 * g.norm(ops.phi));
    Vec back = ops.solve_plus(ops.apply_plus(fd));
    CHECK(g.norm(Vec(back - fd)) < 1e-8 * g.norm(fd));
}

TEST_CASE("generalized kernel chain") {
    const auto& b = testing::bundle();
    const auto& f = *b.family;
    for (double w : {0.046, b.critical.omega_star, 0.055}) {
        CAPTURE(w);
        auto ops = assemble_operators(f, w);
        auto k = generalized_kernel(ops);
        auto c = chain_residuals(ops, k);
        CHECK(c.minus_phi < 1e-8);
        CHECK(c.plus_dphi < 1e-6);
        CHECK(c.plus_zeta < 1e-6);
        CHECK(c.minus_eta < 1e-6);
        CHECK(c.eta_phi < 1e-10);
        CHECK(k.A > 0.0);
        // a = -q'/A, with q' taken from the family interpolant
        CHECK(std::abs(k.a + f.dq(w) / k.A) <= 1e-3 * std::abs(f.dq(w) / k.A) + 1e-12);
        CHECK(std::abs(k.dq - f.dq(w)) < 1e-6 * b.critical.d2q_star * 0.01);
    }
}

TEST_CASE("pairing matrix structure") {
    const auto& b = testing::bundle();
    const auto& f = *b.family;
    auto k = kernel_at(f, 0.052);
    Eigen::Matrix4d M = pairing_matrix(f.grid(), k);
    CHECK((M + M.transpose()).cwiseAbs().maxCoeff() < 1e-12 * M.cwiseAbs().maxCoeff());
    // Omega(Psi1, Psi2) = -q', Omega(Psi2, Psi3) = A, Omega(Psi3, Psi4) = B
    CHECK(rel(M(0, 1), -f.dq(0.052)) < 1e-6);
    CHECK(rel(M(1, 2), k.A) < 1e-12);
    CHECK(rel(M(2, 3), k.B) < 1e-12);
    CHECK(std::abs(M(0, 2)) < 1e-10 * k.A);
    CHECK(std::abs(M(1, 3)) < 1e-8 * k.A);
    CHECK(error_of([&] { k.psi(5); }) == ErrorCode::OutOfRange);
}

TEST_CASE("pairings at the critical frequency") {
    const auto& b = testing::bundle();
    auto k = kernel_at(*b.family, b.critical.omega_star);
    // natural scale of a on the window: q''* |omega - omega*| / A at the window edge
    CHECK(std::abs(k.a) < 1e-6 * b.critical.d2q_star * 0.008 / k.A);
    CHECK(rel(k.A, 7.0466e4) < 5e-3);
    CHECK(rel(b.table.A_star, k.A) < 1e-3);
    CHECK(k.B > 0.0);
}

TEST_CASE("small eigenvalues follow lambda^2 = a") {
    const auto& b = testing::bundle();
    const auto& f = *b.family;
    for (double dw : {-0.004, 0.004}) {
        double w = b.critical.omega_star + dw;
        auto ops = assemble_operators(f, w);
        auto k = generalized_kernel(ops);
        EigenOptions eo;
        eo.radius = std::min(0.8 * w, std::max(2 * std::sqrt(std::abs(k.a)), 1e-3));
        auto ev = small_eigenvalues(ops, k, eo);
        REQUIRE(!ev.empty());
        auto l2 = ev.back() * ev.back();
        CHECK(std::abs(l2.real() - k.a) < 0.04 * std::abs(k.a));
        // stable side (q' > 0): a < 0, purely imaginary pair; unstable side: real pair
        if (dw > 0) CHECK(std::abs(ev.back().real()) < 1e-3 * std::abs(ev.back()));
        else CHECK(std::abs(ev.back().imag()) < 1e-3 * std::abs(ev.back()));
    }
}

TEST_CASE("kernel table is smooth and centred on omega*") {
    const auto& t = testing::bundle().table;
    REQUIRE(t.omega.size() == 17);
    CHECK(std::abs(t.omega[8] - t.omega_star) < 1e-12);
    for (std::size_t i = 1; i + 1 < t.omega.size(); ++i) {
        double second = t.A[i + 1] - 2 * t.A[i] + t.A[i - 1];
        CHECK(std::abs(second) < 1e-2 * t.A[i]);
        CHECK(t.a[i] * t.dq[i] <= 0.0);
    }
}

TEST_CASE("four small eigenvalues at the critical frequency") {
    const auto& b = testing::bundle();
    auto ops = assemble_operators(*b.family, b.critical.omega_star);
    auto k = generalized_kernel(ops);
    EigenOptions eo;
    eo.radius = 1e-3;
    auto ev = small_eigenvalues(ops, k, eo);
    REQUIRE(ev.size() >= 4);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(ev[i]) <= 1e-3);
}
