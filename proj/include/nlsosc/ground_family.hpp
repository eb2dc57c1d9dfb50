#pragma once

#include "nlsosc/grid.hpp"
#include "nlsosc/hermite.hpp"
#include "nlsosc/nonlinearity.hpp"

#include <cstddef>
#include <vector>

namespace nlsosc {

struct GroundStateOptions {
    double tol = 1e-10;        // sup residual relative to the peak
    int max_newton = 60;
    double tail_floor = 1e-8;  // profile near r_max relative to the peak
};

struct RadialProfile {
    double omega = 0.0;
    Vec u;
    double residual = 0.0;
    int newton_iterations = 0;
};

// sup_i | -Lap u + omega u + g(u^2) u |
double stationary_residual(const RadialGrid& grid, const Nonlinearity& nl, double omega, const Vec& u);
double mass(const RadialGrid& grid, const Vec& u);
double mass(const RadialGrid& grid, const CVec& u);
double energy(const RadialGrid& grid, const Nonlinearity& nl, const Vec& u);
double energy(const RadialGrid& grid, const Nonlinearity& nl, const CVec& u);

// Peak value from shooting with bisection on u(0); profile used to seed Newton.
RadialProfile shoot_ground_state(double omega, const RadialGrid& grid, const Nonlinearity& nl);

// Positive radially decreasing solution of 0 = -Lap phi + omega phi + g(phi^2) phi.
// Without a seed the Newton iteration starts from the shooting profile.
RadialProfile solve_ground_state(double omega, const RadialGrid& grid, const Nonlinearity& nl,
                                 const GroundStateOptions& opts = {}, const Vec* seed = nullptr);

struct FamilyNode {
    double omega = 0.0;
    double q = 0.0;       // 1/2 |phi|^2
    double dq = 0.0;      // <phi, d_omega phi>
    double d2q = 0.0;
    double energy = 0.0;
    double d = 0.0;       // E + omega q
    double residual = 0.0;
    Vec phi;
    Vec dphi;
};

// Mass and its omega-derivatives at a converged profile, from the exact
// derivative of the discrete stationary equation.
FamilyNode make_family_node(const RadialGrid& grid, const Nonlinearity& nl, const RadialProfile& profile);

struct CriticalPoint {
    double omega_star = 0.0;
    double q_star = 0.0;
    double d2q_star = 0.0;
};

struct WellGeometry {
    double Q = 0.0;
    double epsilon = 0.0;
    double omega_minus = 0.0;
    double omega_plus = 0.0;
    double omega_plusplus = 0.0;
    double barrier = 0.0;
};

class GroundStateFamily {
public:
    GroundStateFamily(RadialGrid grid, Nonlinearity nl, std::vector<FamilyNode> nodes, GroundStateOptions opts = {});

    const RadialGrid& grid() const { return grid_; }
    const Nonlinearity& nonlinearity() const { return nl_; }
    const GroundStateOptions& options() const { return opts_; }
    const std::vector<FamilyNode>& nodes() const { return nodes_; }
    double omega_min() const { return nodes_.front().omega; }
    double omega_max() const { return nodes_.back().omega; }
    bool contains(double omega) const { return omega >= omega_min() && omega <= omega_max(); }

    double q(double omega) const { return q_ref_ + q_shift_(omega); }
    double dq(double omega) const { return q_shift_.derivative(omega, 1); }
    double d2q(double omega) const { return q_shift_.derivative(omega, 2); }
    // d anchored at the central node and continued by integrating q
    double d(double omega) const;
    // q(omega) - Q without cancellation against the mass scale
    double q_excess(double omega, double Q) const { return q_shift_(omega) - (Q - q_ref_); }
    // int_a^b (q - Q)
    double q_minus_Q_integral(double a, double b, double Q) const;

    std::size_t nearest(double omega) const;
    // Converged profile at arbitrary omega (fresh solve seeded from the nearest node)
    RadialProfile profile_at(double omega) const;

private:
    RadialGrid grid_;
    Nonlinearity nl_;
    std::vector<FamilyNode> nodes_;
    GroundStateOptions opts_;
    double q_ref_ = 0.0;
    QuinticHermite q_shift_;  // q - q_ref
    std::size_t anchor_ = 0;
};

std::vector<double> linspace(double a, double b, int n);

GroundStateFamily build_family(const RadialGrid& grid, const Nonlinearity& nl, const std::vector<double>& omegas,
                               const GroundStateOptions& opts = {});

CriticalPoint find_critical_frequency(const GroundStateFamily& family);

WellGeometry potential_well(const GroundStateFamily& family, double Q);

// V_Q(omega) = d(omega) - omega Q
double evaluate_VQ(const GroundStateFamily& family, double omega, double Q);

}  // namespace nlsosc
