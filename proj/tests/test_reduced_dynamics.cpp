#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include "nlsosc/reduced_dynamics.hpp"

#include <numbers>

using namespace nlsosc;
using testing::error_of;
using testing::rel;

namespace {

ReducedModel model_at(double eps, bool frozen = true) {
    const auto& b = testing::bundle();
    return ReducedModel(b.family, b.table, b.critical.q_star + eps * eps, frozen);
}

// start on the omega_+ side of the well with E_Q = fraction * barrier
double start_at(const ReducedModel& m, double fraction) {
    const auto& w = m.well();
    double lo = w.omega_minus, hi = w.omega_plus;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (m.potential(mid) > fraction * w.barrier ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("energy is even in lambda and vanishes at the well bottom") {
    for (bool frozen : {true, false}) {
        auto m = model_at(0.05, frozen);
        CHECK(std::abs(m.energy(m.well().omega_plus, 0.0)) < 1e-12 * m.well().barrier);
        CHECK(rel(m.potential(m.well().omega_minus), m.well().barrier) < 1e-9);
        for (double w : {0.0495, 0.0505, 0.051})
            CHECK(m.energy(w, 1e-4) == doctest::Approx(m.energy(w, -1e-4)).epsilon(1e-14));
    }
}

TEST_CASE("vector field is the Hamiltonian flow of E_Q") {
    // d/dt E_Q = dE/domega * omega' + dE/dlambda * lambda' = 0 along the field
    for (bool frozen : {true, false}) {
        auto m = model_at(0.06, frozen);
        for (double w : {0.0497, 0.0503, 0.0509}) {
            double lam = 3e-5, s = 1e-7, sl = 1e-8;
            auto f = m.rhs(w, lam);
            double Ew = (m.energy(w + s, lam) - m.energy(w - s, lam)) / (2 * s);
            double El = (m.energy(w, lam + sl) - m.energy(w, lam - sl)) / (2 * sl);
            double scale = std::abs(Ew * f[0]) + std::abs(El * f[1]);
            CHECK(std::abs(Ew * f[0] + El * f[1]) < 1e-6 * scale);
        }
    }
}

TEST_CASE("pairing A: frozen constant or spline through the table") {
    const auto& t = testing::bundle().table;
    auto frozen = model_at(0.05, true);
    auto live = model_at(0.05, false);
    for (std::size_t i = 0; i < t.omega.size(); ++i) {
        CHECK(frozen.A(t.omega[i]) == t.A_star);
        CHECK(rel(live.A(t.omega[i]), t.A[i]) < 1e-10);
    }
    CHECK(frozen.dA(0.05) == 0.0);
    CHECK(error_of([&] { live.A(0.03); }) == ErrorCode::OutOfRange);
}

TEST_CASE("midpoint flow conserves E_Q and is time reversible") {
    auto m = model_at(0.05, false);
    double w0 = start_at(m, 0.3);
    double T = 3 * m.harmonic_period(), dt = m.harmonic_period() / 2000;
    auto fwd = integrate_reduced(m, w0, 0.0, T, dt);
    CHECK(fwd.classification.kind == Trapping::Trapped);
    double drift = 0.0;
    for (double e : fwd.energy) drift = std::max(drift, std::abs(e - fwd.energy.front()));
    CHECK(drift / (m.well().barrier * T) < 1e-9);
    auto back = integrate_reduced(m, fwd.omega.back(), -fwd.lambda.back(), T, dt);
    CHECK(std::abs(back.omega.back() - w0) < 1e-10 * (m.well().omega_plus - m.well().omega_minus));
    CHECK(std::abs(back.lambda.back()) < 1e-9 * std::pow(m.epsilon(), 1.5));
}

TEST_CASE("trapped orbits are periodic with period scaling like eps^-1/2") {
    std::vector<double> P;
    for (double eps : {0.025, 0.1}) {
        auto m = model_at(eps);
        double w0 = start_at(m, 0.01);
        double Th = m.harmonic_period();
        auto tr = integrate_reduced(m, w0, 0.0, 5 * Th, Th / 1000);
        auto pe = measure_period(tr);
        CHECK(pe.cycles >= 3);
        CHECK(rel(pe.period, Th) < 0.02);
        CHECK(pe.spread < 1e-3 * pe.period);
        P.push_back(pe.period);
    }
    CHECK(rel(P[0] / P[1], 2.0) < 0.05);
}

TEST_CASE("classification") {
    auto m = model_at(0.05);
    const auto& w = m.well();
    CHECK(classify_trapping(m, start_at(m, 0.5), 0.0).kind == Trapping::Trapped);
    CHECK(classify_trapping(m, start_at(m, 0.95), 0.0).kind == Trapping::Escaping);
    CHECK(classify_trapping(m, start_at(m, 0.95), 0.0, 0.99).kind == Trapping::Trapped);
    auto bottom = classify_trapping(m, w.omega_plus, 0.0);
    CHECK(bottom.kind == Trapping::Trapped);
    CHECK(bottom.degenerate);
    CHECK(classify_trapping(m, w.omega_minus - 1e-4, 0.0).kind == Trapping::Escaping);
    auto below = model_at(0.0, true);
    CHECK_FALSE(below.has_well());
    CHECK(error_of([&] { below.well(); }) == ErrorCode::NoWell);
    CHECK(classify_trapping(below, 0.05, 0.0).kind == Trapping::Escaping);
}

TEST_CASE("integrator argument checks") {
    auto m = model_at(0.05);
    CHECK(error_of([&] { integrate_reduced(m, 0.0505, 0.0, 10.0, 0.0); }) == ErrorCode::ConfigInvalid);
    CHECK(error_of([&] { integrate_reduced(m, 0.0505, 0.0, -1.0, 0.1); }) == ErrorCode::ConfigInvalid);
    double limit = 0.05 / std::sqrt(m.c0() * 0.05);
    CHECK(error_of([&] { integrate_reduced(m, 0.0505, 0.0, 10.0, 1.01 * limit); }) == ErrorCode::StepTooLarge);
}

TEST_CASE("escaping orbit leaves the window") {
    auto m = model_at(0.05);
    auto tr = integrate_reduced(m, m.well().omega_minus - 1e-4, 0.0, 20 * m.harmonic_period(), 1.0);
    CHECK(tr.window_exit);
    CHECK(tr.omega.back() < m.well().omega_minus);
}

TEST_CASE("crossing detection") {
    std::vector<double> t, y;
    for (int i = 0; i <= 4000; ++i) {
        t.push_back(i * 0.01);
        y.push_back(std::sin(t.back() - 0.3));
    }
    auto c = upward_crossings(t, y, 0.0, 1.0);
    REQUIRE(c.size() == 7);
    for (std::size_t k = 0; k < c.size(); ++k) CHECK(std::abs(c[k] - (0.3 + 2 * std::numbers::pi * k)) < 1e-4);
    auto p = period_from_crossings(c);
    CHECK(std::abs(p.period - 2 * std::numbers::pi) < 1e-4);
    CHECK(p.cycles == 6);
    CHECK(error_of([&] { period_from_crossings({1.0}); }) == ErrorCode::NotPeriodic);
}

TEST_CASE("rescaled view is centred on omega_+") {
    auto m = model_at(0.05);
    auto tr = integrate_reduced(m, m.well().omega_plus, 0.0, 100.0, 1.0);
    auto rv = rescaled_view(m, tr);
    CHECK(std::abs(rv.zeta.front()) < 1e-12);
    CHECK(rv.tau.back() == doctest::Approx(std::sqrt(m.well().epsilon) * 100.0));
}

TEST_CASE("kernel table argument checks") {
    const auto& f = *testing::bundle().family;
    CHECK(error_of([&] { build_kernel_table(f, 0.05, 0.051, 3); }) == ErrorCode::InsufficientPoints);
    CHECK(error_of([&] { build_kernel_table(f, 0.051, 0.05, 9); }) == ErrorCode::NonMonotoneGrid);
}
