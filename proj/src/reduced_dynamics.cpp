#include "nlsosc/reduced_dynamics.hpp"

#include "nlsosc/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace nlsosc {

KernelTable build_kernel_table(const GroundStateFamily& family, double lo, double hi, int n_nodes)
{
    if (n_nodes < 5) fail(ErrorCode::InsufficientPoints, "the pairing table needs at least 5 frequencies");
    if (!(hi > lo)) fail(ErrorCode::NonMonotoneGrid, "pairing window must have lo < hi");
    KernelTable t;
    const CriticalPoint cp = find_critical_frequency(family);
    t.omega_star = cp.omega_star;
    for (double w : linspace(lo, hi, n_nodes)) {
        const KernelBasis k = kernel_at(family, w);
        t.omega.push_back(w);
        t.A.push_back(k.A);
        t.B.push_back(k.B);
        t.a.push_back(k.a);
        t.dq.push_back(k.dq);
    }
    const KernelBasis ks = kernel_at(family, cp.omega_star);
    t.A_star = ks.A;
    t.B_star = ks.B;
    return t;
}

const char* to_string(Trapping t) { return t == Trapping::Trapped ? "Trapped" : "Escaping"; }

ReducedModel::ReducedModel(std::shared_ptr<const GroundStateFamily> family, const KernelTable& table, double Q,
                           bool frozen_A)
    : family_(std::move(family)), Q_(Q), frozen_(frozen_A), A_star_(table.A_star)
{
    if (table.omega.size() < 5) fail(ErrorCode::InsufficientPoints, "pairing table too small");
    critical_ = find_critical_frequency(*family_);
    lo_ = std::max(table.omega.front(), family_->omega_min());
    hi_ = std::min(table.omega.back(), family_->omega_max());
    const double h = table.omega[1] - table.omega[0];
    spline_ = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
        table.A.begin(), table.A.end(), table.omega.front(), h);
    for (double a : table.A)
        if (!(a > 0.0)) fail(ErrorCode::SingularSolve, "pairing A not positive on the window");

    const double gap = Q - critical_.q_star;
    epsilon_ = std::sqrt(std::abs(gap));
    if (gap > 0.0) {
        has_well_ = true;
        well_ = potential_well(*family_, Q);
        reference_ = well_.omega_plus;
    } else {
        reference_ = critical_.omega_star;
    }
    c0_ = std::sqrt(2.0 * critical_.d2q_star) / A_star_;
}

const WellGeometry& ReducedModel::well() const
{
    if (!has_well_) fail(ErrorCode::NoWell, "mass below the critical value has no potential well");
    return well_;
}

void ReducedModel::check(double omega) const
{
    if (!in_window(omega)) fail(ErrorCode::OutOfRange, "omega = " + std::to_string(omega) + " outside the window");
}

double ReducedModel::A(double omega) const
{
    check(omega);
    return frozen_ ? A_star_ : (*spline_)(omega);
}

double ReducedModel::dA(double omega) const
{
    check(omega);
    return frozen_ ? 0.0 : spline_->prime(omega);
}

double ReducedModel::d2A(double omega) const
{
    check(omega);
    return frozen_ ? 0.0 : spline_->double_prime(omega);
}

double ReducedModel::potential(double omega) const
{
    check(omega);
    return family_->q_minus_Q_integral(reference_, omega, Q_);
}

double ReducedModel::energy(double omega, double lambda) const
{
    return 0.5 * A(omega) * lambda * lambda + potential(omega);
}

std::array<double, 2> ReducedModel::rhs(double omega, double lambda) const
{
    const double a = A(omega);
    return {lambda, -(family_->q_excess(omega, Q_) + 0.5 * dA(omega) * lambda * lambda) / a};
}

double ReducedModel::harmonic_period() const
{
    const double w = well().omega_plus;
    return 2.0 * std::numbers::pi / std::sqrt(family_->dq(w) / A(w));
}

TrappingResult classify_trapping(const ReducedModel& model, double omega0, double lambda0, double c)
{
    TrappingResult res;
    res.energy = model.energy(omega0, lambda0);
    if (!model.has_well()) return res;
    const WellGeometry& wg = model.well();
    const double tiny = 1e-12 * wg.barrier;
    if (omega0 > wg.omega_minus && std::abs(res.energy) <= tiny) {
        res.kind = Trapping::Trapped;
        res.degenerate = true;
    } else if (omega0 > wg.omega_minus && res.energy > 0.0 && res.energy < c * wg.barrier) {
        res.kind = Trapping::Trapped;
    }
    return res;
}

ReducedTrajectory integrate_reduced(const ReducedModel& model, double omega0, double lambda0, double T, double dt,
                                    double c)
{
    if (!(dt > 0.0) || !(T >= 0.0)) fail(ErrorCode::ConfigInvalid, "need dt > 0 and T >= 0");
    const double scale = model.c0() * std::max(model.epsilon(), 1e-12);
    if (dt > 0.05 / std::sqrt(scale))
        fail(ErrorCode::StepTooLarge, "dt = " + std::to_string(dt) + " exceeds 0.05/sqrt(c0 eps) = " +
                                          std::to_string(0.05 / std::sqrt(scale)));

    ReducedTrajectory traj;
    traj.dt = dt;
    traj.classification = classify_trapping(model, omega0, lambda0, c);
    const auto steps = static_cast<long>(std::llround(T / dt));

    double w = omega0;
    double p = model.A(w) * lambda0;
    auto record = [&](double t) {
        const double lam = p / model.A(w);
        traj.t.push_back(t);
        traj.omega.push_back(w);
        traj.lambda.push_back(lam);
        traj.energy.push_back(model.energy(w, lam));
    };
    record(0.0);

    const double Q = model.Q();
    const GroundStateFamily& fam = model.family();
    for (long n = 1; n <= steps; ++n) {
        double w1 = w + dt * p / model.A(w);
        double p1 = p - dt * (-p * p * model.dA(w) / (2.0 * model.A(w) * model.A(w)) + fam.q_excess(w, Q));
        bool ok = false;
        for (int it = 0; it < 40; ++it) {
            const double wm = 0.5 * (w + w1), pm = 0.5 * (p + p1);
            if (!model.in_window(wm) || !model.in_window(w1)) break;
            const double A = model.A(wm), dA = model.dA(wm), d2A = model.d2A(wm);
            const double Hp = pm / A;
            const double Hw = -pm * pm * dA / (2.0 * A * A) + fam.q_excess(wm, Q);
            const double Hpp = 1.0 / A;
            const double Hpw = -pm * dA / (A * A);
            const double Hww = pm * pm * (dA * dA / (A * A * A) - d2A / (2.0 * A * A)) + fam.dq(wm);
            const double r1 = w1 - w - dt * Hp;
            const double r2 = p1 - p + dt * Hw;
            const double j11 = 1.0 - 0.5 * dt * Hpw, j12 = -0.5 * dt * Hpp;
            const double j21 = 0.5 * dt * Hww, j22 = 1.0 + 0.5 * dt * Hpw;
            const double det = j11 * j22 - j12 * j21;
            const double dw = (r1 * j22 - r2 * j12) / det;
            const double dp = (j11 * r2 - j21 * r1) / det;
            w1 -= dw;
            p1 -= dp;
            const bool small_w = std::abs(dw) <= 1e-15 * std::abs(w1);
            const bool small_p = std::abs(dp) <= 1e-13 * (std::abs(p) + std::abs(p1)) || dp == 0.0;
            if ((small_w && small_p) || (it >= 6 && std::abs(dw) <= 1e-13 * std::abs(w1))) {
                ok = true;
                break;
            }
        }
        if (!ok || !model.in_window(w1)) {
            traj.window_exit = true;
            traj.classification.kind = Trapping::Escaping;
            break;
        }
        w = w1;
        p = p1;
        record(n * dt);
    }
    return traj;
}

std::vector<double> upward_crossings(const std::vector<double>& t, const std::vector<double>& y, double level,
                                     double merge_window)
{
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < y.size(); ++k) {
        const double a = y[k] - level, b = y[k + 1] - level;
        if (a < 0.0 && b >= 0.0) {
            const double tc = t[k] + (t[k + 1] - t[k]) * (-a) / (b - a);
            if (!out.empty() && tc - out.back() <= merge_window) continue;
            out.push_back(tc);
        }
    }
    return out;
}

PeriodEstimate period_from_crossings(const std::vector<double>& crossings)
{
    if (crossings.size() < 2) fail(ErrorCode::NotPeriodic, "fewer than two crossings");
    std::vector<double> periods;
    for (std::size_t i = 1; i < crossings.size(); ++i) periods.push_back(crossings[i] - crossings[i - 1]);
    PeriodEstimate est;
    est.cycles = static_cast<int>(periods.size());
    est.period = std::accumulate(periods.begin(), periods.end(), 0.0) / periods.size();
    double var = 0.0;
    for (double p : periods) var += (p - est.period) * (p - est.period);
    est.spread = std::sqrt(var / periods.size());
    return est;
}

PeriodEstimate measure_period(const ReducedTrajectory& traj)
{
    return period_from_crossings(upward_crossings(traj.t, traj.lambda, 0.0, traj.dt));
}

RescaledTrajectory rescaled_view(const ReducedModel& model, const ReducedTrajectory& traj)
{
    const WellGeometry& wg = model.well();
    const double e = wg.epsilon;
    RescaledTrajectory out;
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        out.tau.push_back(std::sqrt(e) * traj.t[k]);
        out.zeta.push_back((traj.omega[k] - wg.omega_plus) / e);
        out.kappa.push_back(traj.lambda[k] / std::pow(e, 1.5));
    }
    return out;
}

}  // namespace nlsosc
