#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include "nlsosc/modulation.hpp"

#include <complex>

using namespace nlsosc;
using testing::error_of;
using testing::rel;

namespace {

const std::complex<double> I(0.0, 1.0);

CVec bump(const RadialGrid& g, double amp) {
    CVec r(g.size());
    for (int i = 0; i < g.size(); ++i) {
        double x = g.r()[i] / 8.0;
        r[i] = amp * (std::exp(-x * x) * std::cos(g.r()[i]) + 0.5 * I * std::exp(-0.5 * x * x));
    }
    return r;
}

ModulationOptions options() {
    const auto& t = testing::bundle().table;
    ModulationOptions o;
    o.window_lo = t.omega.front();
    o.window_hi = t.omega.back();
    return o;
}

struct Synthetic {
    KernelBasis k;
    CVec r;
    CVec u;
    double theta = 0.4, lambda = 2e-5, mu = -3e-6;
};

Synthetic synthetic(double omega, double amp) {
    const auto& f = *testing::bundle().family;
    Synthetic s;
    s.k = kernel_at(f, omega);
    s.r = project_continuous(f.grid(), s.k, bump(f.grid(), amp));
    s.u = reconstruct(s.k, s.theta, s.lambda, s.mu, s.r);
    return s;
}

}  // namespace

TEST_CASE("projection removes the generalized kernel") {
    const auto& f = *testing::bundle().family;
    auto k = kernel_at(f, 0.0505);
    CVec p = project_continuous(f.grid(), k, bump(f.grid(), 1e-2));
    for (int j = 1; j <= 4; ++j)
        CHECK(std::abs(f.grid().omega(p, k.psi(j))) < 1e-12 * f.grid().norm(p) * f.grid().norm(k.psi(j)));
    CVec pp = project_continuous(f.grid(), k, p);
    CHECK(f.grid().norm(CVec(pp - p)) < 1e-12 * f.grid().norm(p));
}

TEST_CASE("decomposition inverts reconstruction") {
    for (double w : {0.0499, 0.0503171864, 0.0508}) {
        CAPTURE(w);
        auto s = synthetic(w, 3e-3);
        ModulationCoords guess;
        guess.theta = s.theta + 0.05;
        guess.omega = w + 2e-4;
        auto c = decompose(s.u, *testing::bundle().family, guess, options());
        CHECK(std::abs(c.theta - s.theta) < 1e-10);
        CHECK(std::abs(c.omega - w) < 1e-9);
        CHECK(std::abs(c.lambda - s.lambda) < 1e-10);
        CHECK(std::abs(c.mu - s.mu) < 1e-10);
        const auto& g = testing::bundle().family->grid();
        CHECK(g.norm(CVec(c.r - s.r)) < 1e-8 * g.norm(s.r));
        CHECK(c.r_L2 == doctest::Approx(g.norm(c.r)));
    }
}

TEST_CASE("decomposition is gauge equivariant") {
    auto s = synthetic(0.0506, 2e-3);
    ModulationCoords guess;
    guess.theta = s.theta;
    guess.omega = 0.0506;
    const auto& f = *testing::bundle().family;
    auto a = decompose(s.u, f, guess, options());
    double alpha = 1.1;
    guess.theta += alpha;
    auto b = decompose(CVec(s.u * std::polar(1.0, alpha)), f, guess, options());
    CHECK(std::abs(b.theta - a.theta - alpha) < 1e-10);
    CHECK(std::abs(b.omega - a.omega) < 1e-10);
    CHECK(std::abs(b.lambda - a.lambda) < 1e-11);
    CHECK(std::abs(b.mu - a.mu) < 1e-11);
}

TEST_CASE("phase guess may be off by most of a turn") {
    auto s = synthetic(0.0503, 1e-3);
    ModulationCoords guess;
    guess.theta = s.theta - 2.5;
    guess.omega = 0.0503;
    auto c = decompose(s.u, *testing::bundle().family, guess, options());
    CHECK(std::abs(c.theta - s.theta) < 1e-10);
}

TEST_CASE("decomposition failures") {
    const auto& f = *testing::bundle().family;
    auto s = synthetic(0.0503, 1e-3);
    ModulationCoords guess;
    guess.omega = 0.03;
    CHECK(error_of([&] { decompose(s.u, f, guess, options()); }) == ErrorCode::NewtonDiverged);
    // far from the family: a wide Gaussian of the same mass
    CVec wide(f.grid().size());
    for (int i = 0; i < f.grid().size(); ++i) wide[i] = 0.2 * std::exp(-std::pow(f.grid().r()[i] / 12.0, 2));
    guess.omega = 0.0503;
    CHECK(error_of([&] { decompose(wide, f, guess, options()); }) == ErrorCode::NewtonDiverged);
}

TEST_CASE("mass fixes mu") {
    const auto& b = testing::bundle();
    const auto& f = *b.family;
    const auto& g = f.grid();
    auto k = kernel_at(f, 0.0506);
    CVec r = project_continuous(g, k, bump(g, 2e-3));
    double Q = b.critical.q_star + 0.05 * 0.05;
    double mu = mu_from_Q(g, k, Q, 1e-5, r);
    CHECK(rel(mass(g, reconstruct(k, 0.0, 1e-5, mu, r)), Q) < 1e-13);
    // leading order: A mu = Q - q(omega) - |r|^2/2, exact up to quadratic terms in (lambda, mu, r)
    double lead = mu_leading(g, k, Q, r);
    CHECK(std::abs(mu - lead) < 1e-2 * std::abs(lead) + 1e-9);
    CHECK(error_of([&] { mu_from_Q(g, k, -1.0, 0.0, r); }) == ErrorCode::MuSolveFailed);
}

TEST_CASE("initial field has the requested mass and coordinates") {
    const auto& b = testing::bundle();
    const auto& f = *b.family;
    double Q = b.critical.q_star + 0.06 * 0.06;
    auto init = init_field(f, 0.0504, 1e-5, Q, bump(f.grid(), 1e-3), 0.3);
    CHECK(rel(init.conserved.Q, Q) < 1e-12);
    ModulationCoords guess;
    guess.omega = 0.0504;
    guess.theta = 0.3;
    auto c = decompose(init.field.u, f, guess, options());
    CHECK(std::abs(c.omega - 0.0504) < 1e-10);
    CHECK(std::abs(c.lambda - 1e-5) < 1e-11);
    CHECK(std::abs(c.mu - init.mu) < 1e-11);
    auto plain = init_field(f, 0.0504, 0.0, f.q(0.0504), std::nullopt, 0.0);
    CHECK(std::abs(plain.mu) < 1e-12);
    CHECK(error_of([&] { init_field(f, 0.0504, 0.0, Q, CVec::Zero(5), 0.0); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("tracker continues through a rotating family and detects jumps") {
    const auto& b = testing::bundle();
    const auto& f = *b.family;
    ModulationCoords guess;
    guess.omega = 0.0503;
    ModulationTracker tracker(f, options(), f.q(0.0503), guess, 1e-3);
    auto k = kernel_at(f, 0.0503);
    for (int n = 0; n < 5; ++n) {
        double t = 10.0 * n;
        FieldState s{f.grid(), reconstruct(k, 0.0503 * t, 0.0, 0.0, CVec()), t};
        REQUIRE(tracker.feed(s));
    }
    const auto& tr = tracker.track();
    CHECK(tr.samples.size() == 5);
    CHECK(std::abs(tr.samples.back().theta - 0.0503 * 40.0) < 1e-9);
    auto far = kernel_at(f, 0.0525);
    CHECK_FALSE(tracker.feed(FieldState{f.grid(), reconstruct(far, 0.0503 * 50.0, 0.0, 0.0, CVec()), 50.0}));
    CHECK(tracker.track().lost_lock);
    CHECK(tracker.track().reason.find("LostLock") != std::string::npos);
    CHECK_FALSE(tracker.feed(FieldState{f.grid(), reconstruct(k, 0.0, 0.0, 0.0, CVec()), 60.0}));
}

TEST_CASE("drift and shadow diagnostics") {
    const auto& b = testing::bundle();
    double eps = 0.05;
    ReducedModel m(b.family, b.table, b.critical.q_star + eps * eps, true);
    auto red = integrate_reduced(m, m.well().omega_plus - 1e-4, 0.0, 100.0, 1.0);
    ModulationTrack track;
    for (std::size_t i = 0; i < red.t.size(); i += 10)
        track.samples.push_back({red.t[i], 0.0, red.omega[i] + 1e-7, red.lambda[i], 0.0, 0.0, 0.0});
    auto dr = energy_drift(track, m);
    CHECK(dr.series.size() == track.samples.size());
    CHECK(error_of([&] { shadow_compare(track, red, eps, 100.0); }) == ErrorCode::TimeGridMismatch);
    ReducedTrajectory matched;
    for (std::size_t i = 0; i < red.t.size(); i += 10) {
        matched.t.push_back(red.t[i]);
        matched.omega.push_back(red.omega[i]);
        matched.lambda.push_back(red.lambda[i]);
    }
    auto sr = shadow_compare(track, matched, eps, 100.0);
    CHECK(sr.D_omega == doctest::Approx(1e-7 / std::pow(eps, 3)).epsilon(1e-6));
    CHECK(sr.D_lambda == 0.0);
}
