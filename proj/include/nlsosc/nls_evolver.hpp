#pragma once

#include "nlsosc/grid.hpp"
#include "nlsosc/nonlinearity.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace nlsosc {

struct FieldState {
    RadialGrid grid;
    CVec u;
    double t = 0.0;
};

struct ConservedPair {
    double Q = 0.0;
    double E = 0.0;
};

ConservedPair conserved_quantities(const FieldState& field, const Nonlinearity& nl);

// Smooth damping band near r_max. Breaks exact mass conservation.
struct SpongeOptions {
    bool enabled = false;
    double start_fraction = 0.8;
    double strength = 0.05;
};

// Strang splitting: half nonlinear phase rotation, Crank-Nicolson step for
// i v_t = -v_rr on v = r u with Dirichlet ends, half rotation.
class SplitStepper {
public:
    SplitStepper(const RadialGrid& grid, const Nonlinearity& nl, double dt, SpongeOptions sponge = {});

    double dt() const { return dt_; }
    void step(FieldState& field) const;
    void rotate(CVec& u, double tau) const;  // exact nonlinear flow over time tau
    void linear(CVec& u) const;              // one CN step of length dt
    void damp(CVec& u) const;

private:
    RadialGrid grid_;
    Nonlinearity nl_;
    double dt_;
    SpongeOptions sponge_;
    std::complex<double> off_;   // off-diagonal of I - i dt/2 D2 (and its negation on the right side)
    std::vector<std::complex<double>> cprime_;
    std::vector<std::complex<double>> denom_;
    Vec damping_;
    mutable std::vector<std::complex<double>> scratch_v_, scratch_d_;
};

FieldState step(const FieldState& field, double dt, const Nonlinearity& nl);

struct EvolveOptions {
    double dt = 0.02;
    double T = 0.0;
    double cadence = 1.0;     // observer interval, rounded to whole steps
    long step_cap = 20000000;
    double tail_floor = 1e-3;  // |u| over the outer 5% of the domain relative to the peak
    int order = 2;             // 2: Strang, 4: triple-jump composition of Strang steps
    SpongeOptions sponge;
};

struct ConservedSample {
    double t = 0.0;
    double Q = 0.0;
    double E = 0.0;
};

struct EvolutionResult {
    std::vector<ConservedSample> series;
    double mass_drift = 0.0;    // max |Q(t) - Q(0)| / Q(0)
    double energy_drift = 0.0;  // max |E(t) - E(0)| / |E(0)|
    long steps = 0;
    bool stopped_by_observer = false;
    FieldState final_state;
};

// Observer gets each synchronized snapshot (including t = 0); returning false stops the run.
using Observer = std::function<bool(const FieldState&)>;

EvolutionResult evolve(FieldState field, const Nonlinearity& nl, const EvolveOptions& opts,
                       const Observer& observer = {});

double tail_level(const FieldState& field);

}  // namespace nlsosc
