#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include "nlsosc/ground_family.hpp"
#include "nlsosc/hermite.hpp"

#include <cmath>
#include <numbers>

using namespace nlsosc;
using testing::error_of;
using testing::rel;

namespace {

// Continuum shooting in r with classical RK4, independent of the finite-difference solver.
// u'' + 2u'/r = omega u + g(u^2) u with g(s) = -s/(1+s).
struct Shot {
    int sign = 0;  // +1 crosses zero, -1 turns upward
    double mass = 0.0;
};

Shot shoot(double u0, double w, double h, double r_mass) {
    auto g = [](double s) { return -s / (1.0 + s); };
    double r = 1e-3;
    double c = (w + g(u0 * u0)) * u0 / 6.0;
    double u = u0 + c * r * r, up = 2.0 * c * r;
    double m = 0.5 * 4.0 * std::numbers::pi * u0 * u0 * r * r * r / 3.0;
    auto f = [&](double rr, double uu, double pp, double& du, double& dp) {
        du = pp;
        dp = -2.0 * pp / rr + (w + g(uu * uu)) * uu;
    };
    while (r < 200.0) {
        double k1u, k1p, k2u, k2p, k3u, k3p, k4u, k4p;
        f(r, u, up, k1u, k1p);
        f(r + h / 2, u + h / 2 * k1u, up + h / 2 * k1p, k2u, k2p);
        f(r + h / 2, u + h / 2 * k2u, up + h / 2 * k2p, k3u, k3p);
        f(r + h, u + h * k3u, up + h * k3p, k4u, k4p);
        double uo = u, ro = r;
        u += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
        up += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
        r += h;
        if (r < r_mass) {
            double um = 0.5 * (uo + u), rm = 0.5 * (ro + r);
            m += 0.5 * 4.0 * std::numbers::pi * h * (uo * uo * ro * ro + 4 * um * um * rm * rm + u * u * r * r) / 6.0;
        }
        if (u < 0.0) return {1, m};
        if (up > 0.0) return {-1, m};
    }
    return {0, m};
}

double oracle_peak(double w, double h = 0.005) {
    double lo = 0.1, hi = 5.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        double mid = 0.5 * (lo + hi);
        (shoot(mid, w, h, 0.0).sign > 0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double oracle_mass(double w, double h = 0.005) { return shoot(oracle_peak(w, h), w, h, 50.0).mass; }

// Frozen oracle values (h = 0.005, unchanged at h = 0.0025 to 1e-11).
constexpr double kPeak05 = 0.899100369037;
constexpr double kMass05 = 78.933619888086;
constexpr double kOmegaStar = 0.0503159016;
constexpr double kMassStar = 78.9330628128;

double peak_at_origin(const RadialGrid& grid, const Vec& u) {
    double r1 = grid.r()[0], r2 = grid.r()[1];
    return (u[0] * r2 * r2 - u[1] * r1 * r1) / (r2 * r2 - r1 * r1);
}

const Nonlinearity kSat = Nonlinearity::from_label("saturated");

template <class F>
double five_point(F f, double x, double s) {
    return (f(x - 2 * s) - 8 * f(x - s) + 8 * f(x + s) - f(x + 2 * s)) / (12 * s);
}

}  // namespace

TEST_CASE("shooting oracle reproduces the frozen values") {
    CHECK(std::abs(oracle_peak(0.05) - kPeak05) < 1e-10);
    CHECK(rel(oracle_mass(0.05), kMass05) < 1e-10);
}

TEST_CASE("ground state peak and mass match the continuum oracle") {
    RadialGrid grid(100.0, 4096);
    auto p = solve_ground_state(0.05, grid, kSat);
    CHECK(p.residual < 1e-9);
    CHECK(rel(peak_at_origin(grid, p.u), kPeak05) < 5e-5);
    CHECK(rel(mass(grid, p.u), kMass05) < 1e-4);
}

TEST_CASE("ground state converges at second order under refinement") {
    std::vector<double> err;
    for (int n : {1024, 2048, 4096}) {
        RadialGrid grid(100.0, n);
        auto p = solve_ground_state(0.05, grid, kSat);
        err.push_back(std::abs(peak_at_origin(grid, p.u) - kPeak05));
    }
    CHECK(std::log2(err[0] / err[1]) >= 1.8);
    CHECK(std::log2(err[1] / err[2]) >= 1.8);
}

TEST_CASE("profile is positive, decreasing and decays like exp(-sqrt(omega) r)/r") {
    RadialGrid grid(100.0, 4096);
    for (double w : {0.042, 0.05, 0.06}) {
        auto p = solve_ground_state(w, grid, kSat);
        for (int i = 0; i + 1 < grid.size(); ++i) {
            REQUIRE(p.u[i] > 0.0);
            REQUIRE(p.u[i + 1] <= p.u[i]);
        }
        auto at = [&](double r) { return static_cast<int>(std::lround(r / grid.h())) - 1; };
        int i1 = at(40.0), i2 = at(70.0);
        double slope = (std::log(grid.r()[i2] * p.u[i2]) - std::log(grid.r()[i1] * p.u[i1])) /
                       (grid.r()[i2] - grid.r()[i1]);
        CHECK(rel(-slope, std::sqrt(w)) < 0.02);
    }
}

TEST_CASE("shooting seed and Newton agree") {
    RadialGrid grid(100.0, 2048);
    auto s = shoot_ground_state(0.05, grid, kSat);
    auto p = solve_ground_state(0.05, grid, kSat);
    CHECK(rel(s.u[0], p.u[0]) < 1e-3);
}

TEST_CASE("ground state failures") {
    RadialGrid grid(100.0, 1024);
    CHECK(error_of([&] { solve_ground_state(-0.1, grid, kSat); }) == ErrorCode::NoGroundState);
    CHECK(error_of([&] { solve_ground_state(0.05, RadialGrid(20.0, 512), kSat); }) == ErrorCode::DomainTooSmall);
    Vec bad = Vec::Ones(10);
    CHECK(error_of([&] { solve_ground_state(0.05, grid, kSat, {}, &bad); }) == ErrorCode::ConfigInvalid);
    // Saturated g is bounded below by -1, so no ground state exists for omega >= 1.
    CHECK(error_of([&] { solve_ground_state(1.2, grid, kSat); }) == ErrorCode::NoGroundState);
}

TEST_CASE("family critical point matches the oracle") {
    const auto& b = testing::bundle();
    CHECK(std::abs(b.critical.omega_star - kOmegaStar) < 1e-5);
    CHECK(rel(b.critical.q_star, kMassStar) < 1e-4);
    CHECK(std::abs(b.family->dq(b.critical.omega_star)) < 1e-8 * b.critical.d2q_star);
    CHECK(b.critical.d2q_star > 0.0);
    CHECK(rel(b.critical.d2q_star, 11131.25) < 2e-3);
}

TEST_CASE("oracle critical frequency (slow bisection)") {
    auto dq = [](double w) { return (oracle_mass(w + 2e-4) - oracle_mass(w - 2e-4)) / 4e-4; };
    double a = 0.049, b = 0.052;
    for (int i = 0; i < 20; ++i) {
        double m = 0.5 * (a + b);
        (dq(m) < 0.0 ? a : b) = m;
    }
    CHECK(std::abs(0.5 * (a + b) - kOmegaStar) < 1e-8);
}

TEST_CASE("family interpolants are consistent with the nodes") {
    const auto& f = *testing::bundle().family;
    const auto& nodes = f.nodes();
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
        const auto& n = nodes[i];
        CHECK(rel(f.q(n.omega), n.q) < 1e-13);
        CHECK(std::abs(f.dq(n.omega) - n.dq) < 1e-9 * std::abs(n.q));
        // d' = q by construction of the Legendre-type pair
        double dd = five_point([&](double w) { return f.d(w); }, n.omega, 1e-4);
        CHECK(rel(dd, n.q) < 1e-10);
        CHECK(rel(f.d(n.omega), n.d) < 1e-8);
    }
    // dq from the discrete derivative agrees with a difference quotient of node masses
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
        double fd = (nodes[i + 1].q - nodes[i - 1].q) / (nodes[i + 1].omega - nodes[i - 1].omega);
        double scale = 11131.25 * (nodes[i + 1].omega - nodes[i].omega);
        CHECK(std::abs(fd - nodes[i].dq) < 0.05 * scale);
    }
}

TEST_CASE("d equals E + omega q at the nodes") {
    const auto& f = *testing::bundle().family;
    const auto& n = f.nodes()[f.nearest(0.05)];
    CHECK(rel(n.d, n.energy + n.omega * n.q) < 1e-12);
    CHECK(rel(energy(f.grid(), f.nonlinearity(), n.phi), n.energy) < 1e-12);
}

TEST_CASE("potential well geometry") {
    const auto& b = testing::bundle();
    const auto& f = *b.family;
    for (double eps : {0.03, 0.06, 0.1}) {
        double Q = b.critical.q_star + eps * eps;
        auto w = potential_well(f, Q);
        CHECK(w.omega_minus < b.critical.omega_star);
        CHECK(w.omega_plus > b.critical.omega_star);
        CHECK(std::abs(f.q_excess(w.omega_minus, Q)) < 1e-9);
        CHECK(std::abs(f.q_excess(w.omega_plus, Q)) < 1e-9);
        CHECK(w.barrier > 0.0);
        // leading order: omega_pm - omega* = +-eps sqrt(2/q''), barrier = (4/3) eps^3 sqrt(2/q'')
        double k = std::sqrt(2.0 / b.critical.d2q_star);
        CHECK(rel(w.omega_plus - w.omega_minus, 2 * eps * k) < 0.15);
        CHECK(rel(w.barrier, 4.0 / 3.0 * eps * eps * eps * k) < 0.3);
        // V_Q' = q - Q
        double x = 0.5 * (w.omega_minus + w.omega_plus);
        double dv = five_point([&](double y) { return evaluate_VQ(f, y, Q); }, x, 1e-4);
        CHECK(std::abs(dv - f.q_excess(x, Q)) < 1e-6 * eps * eps);
    }
    CHECK(error_of([&] { potential_well(f, b.critical.q_star - 1e-4); }) == ErrorCode::NoWell);
    CHECK(error_of([&] { potential_well(f, b.critical.q_star + 1.0); }) == ErrorCode::OutOfRange);
    CHECK(error_of([&] { f.q(0.07); }) == ErrorCode::OutOfRange);
}

TEST_CASE("family construction errors") {
    RadialGrid grid(100.0, 512);
    CHECK(error_of([&] { build_family(grid, kSat, linspace(0.04, 0.06, 5)); }) == ErrorCode::InsufficientPoints);
    auto w = linspace(0.04, 0.06, 11);
    std::swap(w[3], w[4]);
    CHECK(error_of([&] { build_family(grid, kSat, w); }) == ErrorCode::NonMonotoneGrid);
    // cubic focusing in 3D: q is monotone in omega, no critical point
    auto cubic = build_family(RadialGrid(60.0, 512), Nonlinearity::from_label("cubic"), linspace(0.3, 0.6, 9));
    CHECK(error_of([&] { find_critical_frequency(cubic); }) == ErrorCode::NoCriticalPoint);
}

TEST_CASE("quintic Hermite is exact on quintics") {
    auto p = [](double x) { return 1 - 2 * x + 0.5 * x * x * x - 0.1 * std::pow(x, 5); };
    auto dp = [](double x) { return -2 + 1.5 * x * x - 0.5 * std::pow(x, 4); };
    auto d2p = [](double x) { return 3 * x - 2 * std::pow(x, 3); };
    std::vector<double> x{-1.0, -0.3, 0.4, 1.5}, f, df, d2f;
    for (double xi : x) {
        f.push_back(p(xi));
        df.push_back(dp(xi));
        d2f.push_back(d2p(xi));
    }
    QuinticHermite h(x, f, df, d2f);
    for (double t : {-0.9, -0.1, 0.77, 1.2}) {
        CHECK(std::abs(h(t) - p(t)) < 1e-12);
        CHECK(std::abs(h.derivative(t) - dp(t)) < 1e-11);
        CHECK(std::abs(h.derivative(t, 2) - d2p(t)) < 1e-10);
    }
    auto P = [](double x) { return x - x * x + 0.125 * std::pow(x, 4) - std::pow(x, 6) / 60.0; };
    CHECK(std::abs(h.integral(-0.8, 1.3) - (P(1.3) - P(-0.8))) < 1e-12);
    CHECK(error_of([&] { h(2.0); }) == ErrorCode::OutOfRange);
    CHECK(error_of([&] { QuinticHermite({0.0, 0.0}, {1, 1}, {0, 0}, {0, 0}); }) == ErrorCode::NonMonotoneGrid);
}
