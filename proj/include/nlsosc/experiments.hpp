#pragma once

#include "nlsosc/artifacts.hpp"
#include "nlsosc/config.hpp"
#include "nlsosc/modulation.hpp"
#include "nlsosc/nls_evolver.hpp"
#include "nlsosc/reduced_dynamics.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nlsosc {

// Family, mass level and amplitude shared by every experiment kind.
struct Context {
    ExperimentConfig config;
    FamilyBundle bundle;
    std::optional<double> Q;
    double epsilon = 0.0;  // sqrt|Q - q*|
    bool trapped = true;

    const GroundStateFamily& family() const { return *bundle.family; }
    double require_Q() const;
    ReducedModel model(bool frozen_A) const;
};

Context make_context(const ExperimentConfig& cfg);
Context make_context(const ExperimentConfig& cfg, double epsilon);

// omega_+ - eps sqrt(2/q'') on the trapped side, omega* otherwise.
double default_omega0(const Context& ctx);
// Turning point left of omega_+ with E_Q = fraction * barrier.
double turning_point(const ReducedModel& model, double fraction);
// Period of the reduced orbit through (omega0, lambda0); harmonic period when it does not close.
double reduced_period(const ReducedModel& model, double omega0, double lambda0);

CVec perturbation_profile(const RadialGrid& grid, const PerturbationSpec& spec);

struct PdeRun {
    double Q = 0.0;
    double epsilon = 0.0;
    double omega0 = 0.0;
    double lambda0 = 0.0;
    double T = 0.0;
    double interval = 0.0;   // observation spacing
    double period_ref = 0.0; // reduced period used to size the run
    InitialData init;
    EvolutionResult evolution;
    ModulationTrack track;
    std::vector<double> E_Q;  // NaN outside the kernel window
    double max_tail = 0.0;
    double seconds = 0.0;
};

PdeRun run_pde(const Context& ctx);

// Reduced flow from the first track sample, sampled on the track times.
ReducedTrajectory reduced_on_track(const ReducedModel& model, const ModulationTrack& track, double t_max);

struct PeriodTableRow {
    double epsilon = 0.0;
    double Q = 0.0;
    double period = 0.0;
    double harmonic = 0.0;
    double spread = 0.0;
    int cycles = 0;
    double drift_rate = 0.0;  // max |E_Q - E_Q(0)| / (barrier T)
};

std::vector<PeriodTableRow> period_sweep(const Context& base, const std::vector<double>& epsilons, double fraction,
                                         bool frozen_A, double n_periods, int workers);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

std::vector<double> crossing_times(const std::vector<double>& t, const std::vector<double>& y, double level);

struct SpectrumPoint {
    double omega = 0.0;
    double a = 0.0;
    double A = 0.0;
    double B = 0.0;
    double dq = 0.0;                     // family interpolant, independent of the chain solve
    std::vector<std::complex<double>> eigenvalues;
    double lambda2_error = 0.0;          // |lambda^2 - a| / |a| for the outermost small pair
    ChainResiduals chain;
    double a_consistency = 0.0;          // |a + q'/A| / |a|
    double pair12 = 0.0;                 // |Omega(Psi1,Psi2) + q'| / max(|q'|, q''* 1e-4)
    double pair13 = 0.0;                 // |Omega(Psi1,Psi3)| / (|Psi1| |Psi3|)
    double pair14 = 0.0;                 // |Omega(Psi1,Psi4) + <dphi,eta>| / A
    double pair24 = 0.0;                 // |Omega(Psi2,Psi4)| / (|Psi2| |Psi4|)
    double quadratic_form = 0.0;         // |<L- eta, eta> - (A - a B)| / A
};

SpectrumPoint spectrum_point(const GroundStateFamily& family, const CriticalPoint& cp, double omega);
std::vector<double> spectrum_frequencies(const SpectrumSpec& spec, double omega_star);

// Runs one experiment kind and writes its artifacts (plus the resolved config) to out_dir.
nlohmann::json run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace nlsosc
