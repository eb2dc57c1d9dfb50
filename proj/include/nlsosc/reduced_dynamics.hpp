#pragma once

#include "nlsosc/ground_family.hpp"
#include "nlsosc/linearization.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include <array>
#include <memory>
#include <vector>

namespace nlsosc {

// Pairings sampled on a uniform frequency window around omega*.
struct KernelTable {
    std::vector<double> omega;
    std::vector<double> A;
    std::vector<double> B;
    std::vector<double> a;
    std::vector<double> dq;
    double omega_star = 0.0;
    double A_star = 0.0;
    double B_star = 0.0;
};

KernelTable build_kernel_table(const GroundStateFamily& family, double lo, double hi, int n_nodes);

enum class Trapping { Trapped, Escaping };
const char* to_string(Trapping t);

struct TrappingResult {
    Trapping kind = Trapping::Escaping;
    bool degenerate = false;
    double energy = 0.0;
};

// E_Q = 1/2 A(omega) lambda^2 + V_Q(omega) - V_Q(omega_+),  V_Q' = q - Q.
// Below the critical mass there is no well and the potential is referenced to omega*.
class ReducedModel {
public:
    ReducedModel(std::shared_ptr<const GroundStateFamily> family, const KernelTable& table, double Q,
                 bool frozen_A = true);

    const GroundStateFamily& family() const { return *family_; }
    double Q() const { return Q_; }
    double epsilon() const { return epsilon_; }
    bool has_well() const { return has_well_; }
    const WellGeometry& well() const;
    const CriticalPoint& critical() const { return critical_; }
    bool frozen_A() const { return frozen_; }
    double c0() const { return c0_; }
    double window_lo() const { return lo_; }
    double window_hi() const { return hi_; }
    bool in_window(double omega) const { return omega >= lo_ && omega <= hi_; }

    double A(double omega) const;
    double dA(double omega) const;
    double d2A(double omega) const;
    // V_Q(omega) - V_Q(reference)
    double potential(double omega) const;
    double energy(double omega, double lambda) const;
    std::array<double, 2> rhs(double omega, double lambda) const;
    // 2 pi / sqrt(A^{-1} V_Q'') at the well bottom
    double harmonic_period() const;

private:
    void check(double omega) const;

    std::shared_ptr<const GroundStateFamily> family_;
    double Q_;
    double epsilon_ = 0.0;
    bool has_well_ = false;
    WellGeometry well_;
    CriticalPoint critical_;
    bool frozen_;
    double A_star_;
    double c0_ = 0.0;
    double lo_, hi_;
    double reference_;
    std::shared_ptr<const boost::math::interpolators::cardinal_cubic_b_spline<double>> spline_;
};

TrappingResult classify_trapping(const ReducedModel& model, double omega0, double lambda0, double c = 0.9);

struct ReducedTrajectory {
    std::vector<double> t;
    std::vector<double> omega;
    std::vector<double> lambda;
    std::vector<double> energy;
    double dt = 0.0;
    TrappingResult classification;
    bool window_exit = false;
};

// Implicit midpoint in the canonical pair (omega, p = A(omega) lambda).
ReducedTrajectory integrate_reduced(const ReducedModel& model, double omega0, double lambda0, double T, double dt,
                                    double c = 0.9);

std::vector<double> upward_crossings(const std::vector<double>& t, const std::vector<double>& y, double level,
                                     double merge_window);

struct PeriodEstimate {
    double period = 0.0;
    double spread = 0.0;  // standard deviation across cycles
    int cycles = 0;
};

PeriodEstimate measure_period(const ReducedTrajectory& traj);
PeriodEstimate period_from_crossings(const std::vector<double>& crossings);

struct RescaledTrajectory {
    std::vector<double> tau;
    std::vector<double> zeta;
    std::vector<double> kappa;
};

RescaledTrajectory rescaled_view(const ReducedModel& model, const ReducedTrajectory& traj);

}  // namespace nlsosc
