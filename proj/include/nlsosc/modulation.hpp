#pragma once

#include "nlsosc/ground_family.hpp"
#include "nlsosc/linearization.hpp"
#include "nlsosc/nls_evolver.hpp"
#include "nlsosc/reduced_dynamics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nlsosc {

struct ModulationCoords {
    double theta = 0.0;
    double omega = 0.0;
    double lambda = 0.0;
    double mu = 0.0;
    double r_L2 = 0.0;
    double r_H1 = 0.0;
    CVec r;
    int iterations = 0;
};

struct ModulationOptions {
    double window_lo = 0.0;  // frequencies the Newton iterate may visit
    double window_hi = 0.0;
    double chart_radius = 0.25;  // |r| / |phi| accepted as inside the chart
    int max_iterations = 30;
    double step_tol = 1e-12;     // field-size change per step relative to |phi|
    double omega_fd = 1e-7;      // relative frequency increment of the finite-difference column
};

// u = e^{i theta} (phi_omega + i lambda eta + mu zeta + r),  Omega(r, Psi_j) = 0.
ModulationCoords decompose(const CVec& u, const GroundStateFamily& family, const ModulationCoords& guess,
                           const ModulationOptions& opts);

CVec reconstruct(const KernelBasis& k, double theta, double lambda, double mu, const CVec& r);

// Removes the Psi_1..Psi_4 components using the Gram matrix of Omega.
CVec project_continuous(const RadialGrid& grid, const KernelBasis& k, const CVec& f);

// mu with Q(phi + i lambda eta + mu zeta + r) = Q, by scalar Newton from the leading guess.
double mu_from_Q(const RadialGrid& grid, const KernelBasis& k, double Q, double lambda, const CVec& r);
double mu_leading(const RadialGrid& grid, const KernelBasis& k, double Q, const CVec& r);

struct InitialData {
    FieldState field;
    double mu = 0.0;
    ConservedPair conserved;
    KernelBasis kernel;
};

InitialData init_field(const GroundStateFamily& family, double omega0, double lambda0, double Q_target,
                       const std::optional<CVec>& r_pert, double theta0);

struct TrackSample {
    double t = 0.0;
    double theta = 0.0;
    double omega = 0.0;
    double lambda = 0.0;
    double mu = 0.0;
    double r_L2 = 0.0;
    double r_H1 = 0.0;
};

struct ModulationTrack {
    double Q = 0.0;
    std::vector<TrackSample> samples;
    bool lost_lock = false;
    std::string reason;
};

// Online continuation over snapshots; stops at the first failed decomposition.
class ModulationTracker {
public:
    ModulationTracker(const GroundStateFamily& family, ModulationOptions opts, double Q, ModulationCoords initial_guess,
                      double jump_threshold);

    bool feed(const FieldState& field);
    const ModulationTrack& track() const { return track_; }

private:
    const GroundStateFamily& family_;
    ModulationOptions opts_;
    double jump_;
    ModulationCoords guess_;
    ModulationTrack track_;
};

struct DriftReport {
    double drift = 0.0;
    std::vector<double> series;
};

DriftReport energy_drift(const ModulationTrack& track, const ReducedModel& model);

struct ShadowReport {
    double D_omega = 0.0;
    double D_lambda = 0.0;
    double n_periods = 0.0;
    double epsilon = 0.0;
    double t_max = 0.0;
    double systematic_budget = 0.0;  // eps^-3 sup |B/(2A) mu|
};

ShadowReport shadow_compare(const ModulationTrack& track, const ReducedTrajectory& reduced, double epsilon,
                            double t_max, const ReducedModel* model = nullptr, const KernelTable* table = nullptr);

}  // namespace nlsosc
