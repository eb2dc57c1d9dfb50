#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include "nlsosc/nls_evolver.hpp"

#include <complex>
#include <numbers>

using namespace nlsosc;
using testing::error_of;
using testing::rel;

namespace {

const Nonlinearity kSat = Nonlinearity::from_label("saturated");
const std::complex<double> I(0.0, 1.0);

struct Setup {
    RadialGrid grid{100.0, 1024};
    double omega = 0.05;
    Vec phi;
    Setup() { phi = solve_ground_state(omega, grid, kSat).u; }
};

const Setup& setup() {
    static const Setup s;
    return s;
}

// ground state with a smooth localized bump, so the dynamics is not a pure phase rotation
FieldState perturbed() {
    const auto& s = setup();
    FieldState f{s.grid, CVec(s.grid.size()), 0.0};
    for (int i = 0; i < s.grid.size(); ++i) {
        double r = s.grid.r()[i];
        f.u[i] = s.phi[i] * (1.0 + 0.05 * std::exp(-r * r / 50.0)) + 0.02 * I * std::exp(-r * r / 30.0);
    }
    return f;
}

double max_diff(const CVec& a, const CVec& b) { return (a - b).cwiseAbs().maxCoeff(); }

FieldState run(FieldState f, double dt, double T, int order) {
    EvolveOptions eo;
    eo.dt = dt;
    eo.T = T;
    eo.cadence = T;
    eo.order = order;
    return evolve(std::move(f), kSat, eo).final_state;
}

}  // namespace

TEST_CASE("single steps conserve the discrete mass") {
    auto f = perturbed();
    double q0 = conserved_quantities(f, kSat).Q;
    SplitStepper st(f.grid, kSat, 0.05);
    for (int n = 0; n < 20; ++n) {
        st.step(f);
        CHECK(std::abs(conserved_quantities(f, kSat).Q - q0) <= 1e-12 * q0);
    }
    CHECK(f.t == doctest::Approx(1.0));
}

TEST_CASE("ground state rotates as exp(+i omega t)") {
    const auto& s = setup();
    FieldState f{s.grid, s.phi.cast<std::complex<double>>(), 0.0};
    double T = 40.0;
    auto g = run(f, 0.02, T, 4);
    CHECK(max_diff(g.u.cwiseAbs().cast<std::complex<double>>(), f.u) < 1e-7);
    double phase = std::arg(g.u[0] * std::exp(-I * s.omega * T));
    CHECK(std::abs(phase) < 1e-7);
}

TEST_CASE("gauge covariance") {
    auto f = perturbed();
    double alpha = 0.7;
    FieldState g = f;
    g.u *= std::exp(I * alpha);
    auto a = run(f, 0.02, 4.0, 2);
    auto b = run(g, 0.02, 4.0, 2);
    CHECK(max_diff(b.u, std::exp(I * alpha) * a.u) < 1e-13);
}

TEST_CASE("Strang steps are time reversible") {
    auto f = perturbed();
    FieldState g = f;
    SplitStepper fwd(f.grid, kSat, 0.05), bwd(f.grid, kSat, -0.05);
    for (int n = 0; n < 10; ++n) fwd.step(g);
    for (int n = 0; n < 10; ++n) bwd.step(g);
    CHECK(max_diff(g.u, f.u) < 1e-12);
    CHECK(std::abs(g.t) < 1e-14);
}

TEST_CASE("temporal convergence orders") {
    auto f = perturbed();
    double T = 4.0;
    auto ref = run(f, 0.0025, T, 4);
    auto e2a = max_diff(run(f, 0.04, T, 2).u, ref.u), e2b = max_diff(run(f, 0.02, T, 2).u, ref.u);
    auto e4a = max_diff(run(f, 0.08, T, 4).u, ref.u), e4b = max_diff(run(f, 0.04, T, 4).u, ref.u);
    CHECK(std::log2(e2a / e2b) == doctest::Approx(2.0).epsilon(0.1));
    CHECK(std::log2(e4a / e4b) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("energy error of Strang scales like dt^2") {
    auto f = perturbed();
    std::vector<double> drift;
    for (double dt : {0.04, 0.02}) {
        EvolveOptions eo;
        eo.dt = dt;
        eo.T = 20.0;
        eo.cadence = dt;
        drift.push_back(evolve(f, kSat, eo).energy_drift);
    }
    double order = std::log2(drift[0] / drift[1]);
    CHECK(order >= 1.8);
    CHECK(order <= 2.2);
}

TEST_CASE("observer cadence and early stop") {
    auto f = perturbed();
    EvolveOptions eo;
    eo.dt = 0.02;
    eo.T = 2.0;
    eo.cadence = 0.5;
    std::vector<double> times;
    auto res = evolve(f, kSat, eo, [&](const FieldState& s) {
        times.push_back(s.t);
        return times.size() < 3;
    });
    CHECK(res.stopped_by_observer);
    REQUIRE(times.size() == 3);
    CHECK(times[1] == doctest::Approx(0.5));
    CHECK(times[2] == doctest::Approx(1.0));
    // snapshot at t = 1 agrees with a run that simply ends there
    auto direct = run(f, 0.02, 1.0, 2);
    CHECK(max_diff(res.final_state.u, direct.u) < 1e-13);
}

TEST_CASE("sponge removes mass") {
    auto f = perturbed();
    EvolveOptions eo;
    eo.dt = 0.05;
    eo.T = 150.0;
    eo.cadence = 10.0;
    eo.sponge.enabled = true;
    eo.sponge.start_fraction = 0.5;
    eo.sponge.strength = 0.2;
    auto res = evolve(f, kSat, eo);
    for (std::size_t i = 1; i < res.series.size(); ++i) CHECK(res.series[i].Q <= res.series[i - 1].Q + 1e-12);
    CHECK(res.series.back().Q < res.series.front().Q);
}

TEST_CASE("radiation reaching the boundary is reported") {
    const auto& s = setup();
    FieldState f{s.grid, CVec(s.grid.size()), 0.0};
    for (int i = 0; i < s.grid.size(); ++i) f.u[i] = 0.3 * std::exp(-std::pow(s.grid.r()[i] / 30.0, 2));
    CHECK(tail_level(f) < 1e-3);
    EvolveOptions eo;
    eo.dt = 0.05;
    eo.T = 2000.0;
    eo.cadence = 10.0;
    CHECK(error_of([&] { evolve(f, kSat, eo); }) == ErrorCode::TailContamination);
}

TEST_CASE("argument checks") {
    auto f = perturbed();
    CHECK(error_of([&] { SplitStepper(f.grid, kSat, 0.0); }) == ErrorCode::ConfigInvalid);
    CHECK(error_of([&] { SplitStepper(f.grid, kSat, -0.1, SpongeOptions{true, 0.8, 0.05}); }) ==
          ErrorCode::ConfigInvalid);
    EvolveOptions eo;
    eo.T = 1.0;
    eo.order = 3;
    CHECK(error_of([&] { evolve(f, kSat, eo); }) == ErrorCode::ConfigInvalid);
    eo.order = 2;
    eo.T = 1e6;
    eo.step_cap = 1000;
    CHECK(error_of([&] { evolve(f, kSat, eo); }) == ErrorCode::StepTooLarge);
}
