#include "nlsosc/modulation.hpp"

#include "nlsosc/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace nlsosc {

namespace {

const std::complex<double> I(0.0, 1.0);

struct Residual {
    CVec w;  // e^{-i theta} u
    CVec R;
    Eigen::Vector4d F;
};

Residual residual(const RadialGrid& grid, const KernelBasis& k, const CVec& u, double theta, double lambda, double mu)
{
    Residual res;
    res.w = u * std::polar(1.0, -theta);
    res.R = res.w - k.phi.cast<std::complex<double>>() - I * lambda * k.eta.cast<std::complex<double>>() -
            mu * k.zeta.cast<std::complex<double>>();
    for (int j = 0; j < 4; ++j) res.F[j] = grid.omega(res.R, k.psi(j + 1));
    return res;
}

struct Scales {
    double psi[4];
    double phi, dphi, eta, zeta;
};

Scales scales(const RadialGrid& grid, const KernelBasis& k)
{
    Scales s;
    for (int j = 0; j < 4; ++j) s.psi[j] = grid.norm(k.psi(j + 1));
    s.phi = s.psi[0];
    s.dphi = s.psi[1];
    s.eta = s.psi[2];
    s.zeta = s.psi[3];
    return s;
}

double scaled_norm(const Eigen::Vector4d& F, const Scales& s)
{
    double m = 0.0;
    for (int j = 0; j < 4; ++j) m = std::max(m, std::abs(F[j]) / s.psi[j]);
    return m;
}

}  // namespace

CVec reconstruct(const KernelBasis& k, double theta, double lambda, double mu, const CVec& r)
{
    CVec base = k.phi.cast<std::complex<double>>() + I * lambda * k.eta.cast<std::complex<double>>() +
                mu * k.zeta.cast<std::complex<double>>();
    if (r.size() == base.size()) base += r;
    return base * std::polar(1.0, theta);
}

CVec project_continuous(const RadialGrid& grid, const KernelBasis& k, const CVec& f)
{
    const Eigen::Matrix4d gram = pairing_matrix(grid, k);
    Eigen::Vector4d rhs;
    for (int j = 0; j < 4; ++j) rhs[j] = grid.omega(f, k.psi(j + 1));
    // sum_j c_j Omega(Psi_j, Psi_k) = Omega(f, Psi_k)
    const Eigen::Vector4d c = gram.transpose().fullPivLu().solve(rhs);
    CVec out = f;
    for (int j = 0; j < 4; ++j) out -= c[j] * k.psi(j + 1);
    return out;
}

double mu_leading(const RadialGrid& grid, const KernelBasis& k, double Q, const CVec& r)
{
    const double qr = r.size() == k.phi.size() ? mass(grid, r) : 0.0;
    return -(mass(grid, k.phi) - Q + qr) / k.A;
}

double mu_from_Q(const RadialGrid& grid, const KernelBasis& k, double Q, double lambda, const CVec& r)
{
    CVec base = k.phi.cast<std::complex<double>>() + I * lambda * k.eta.cast<std::complex<double>>();
    if (r.size() == base.size()) base += r;
    const CVec zeta = k.zeta.cast<std::complex<double>>();
    const double c = mass(grid, base) - Q;
    const double b = grid.inner(base, zeta);
    const double a2 = grid.inner(zeta, zeta);
    const double zn = std::sqrt(a2), pn = grid.norm(k.phi);

    double mu = mu_leading(grid, k, Q, r);
    for (int it = 0; it < 50; ++it) {
        const double G = c + b * mu + 0.5 * a2 * mu * mu;
        const double dG = b + a2 * mu;
        if (dG == 0.0 || !std::isfinite(dG)) break;
        const double step = G / dG;
        mu -= step;
        if (std::abs(step) * zn <= 1e-15 * pn) {
            if (std::abs(c + b * mu + 0.5 * a2 * mu * mu) <= 1e-12 * std::max(Q, 1e-300)) return mu;
            break;
        }
    }
    fail(ErrorCode::MuSolveFailed, "no mu reproduces the mass " + std::to_string(Q));
}

ModulationCoords decompose(const CVec& u, const GroundStateFamily& family, const ModulationCoords& guess,
                           const ModulationOptions& opts)
{
    const RadialGrid& grid = family.grid();
    double lo = opts.window_lo, hi = opts.window_hi;
    if (!(hi > lo)) {
        lo = family.omega_min();
        hi = family.omega_max();
    }
    auto inside = [&](double w) { return w >= lo && w <= hi && family.contains(w); };
    if (!inside(guess.omega)) fail(ErrorCode::NewtonDiverged, "frequency left the modulation window");

    double theta = guess.theta, omega = guess.omega, lambda = guess.lambda, mu = guess.mu;
    KernelBasis k = kernel_at(family, omega);
    // phase of the overlap with phi, as a correction in (-pi, pi] to keep theta continuous
    std::complex<double> overlap = 0.0;
    const Vec& wq = grid.weights();
    for (int i = 0; i < grid.size(); ++i) overlap += wq[i] * k.phi[i] * u[i];
    if (std::abs(overlap) > 0.0) theta += std::remainder(std::arg(overlap) - theta, 2.0 * std::numbers::pi);
    Residual res = residual(grid, k, u, theta, lambda, mu);
    Scales sc = scales(grid, k);

    double prev_size = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opts.max_iterations; ++it) {
        const double dw = opts.omega_fd * omega;
        const double wd = inside(omega + dw) ? omega + dw : omega - dw;
        const KernelBasis kd = kernel_at(family, wd);
        const Residual resd = residual(grid, kd, u, theta, lambda, mu);

        Eigen::Matrix4d J;
        const CVec miw = -I * res.w;
        const CVec psi3 = k.psi(3), psi4 = k.psi(4);
        for (int j = 0; j < 4; ++j) {
            const CVec pj = k.psi(j + 1);
            J(j, 0) = grid.omega(miw, pj);
            J(j, 1) = (resd.F[j] - res.F[j]) / (wd - omega);
            J(j, 2) = -grid.omega(psi3, pj);
            J(j, 3) = -grid.omega(psi4, pj);
        }
        Eigen::Matrix4d Js = J;
        for (int j = 0; j < 4; ++j) Js.row(j) /= sc.psi[j];
        const Eigen::FullPivLU<Eigen::Matrix4d> lu(Js);
        double colprod = 1.0;
        for (int c = 0; c < 4; ++c) colprod *= Js.col(c).norm();
        if (lu.rank() < 4 || std::abs(Js.determinant()) < 1e-13 * colprod)
            fail(ErrorCode::JacobianSingular, "pairing Jacobian degenerate at omega = " + std::to_string(omega));
        Eigen::Vector4d rhs;
        for (int j = 0; j < 4; ++j) rhs[j] = -res.F[j] / sc.psi[j];
        const Eigen::Vector4d delta = lu.solve(rhs);

        const double size = std::abs(delta[0]) * sc.phi + std::abs(delta[1]) * sc.dphi +
                            std::abs(delta[2]) * sc.eta + std::abs(delta[3]) * sc.zeta;
        const double f0 = scaled_norm(res.F, sc);

        bool accepted = false;
        double alpha = 1.0;
        for (int halving = 0; halving <= 8; ++halving, alpha *= 0.5) {
            const double wn = omega + alpha * delta[1];
            if (!inside(wn)) continue;
            KernelBasis kn = kernel_at(family, wn);
            Residual rn = residual(grid, kn, u, theta + alpha * delta[0], lambda + alpha * delta[2],
                                   mu + alpha * delta[3]);
            const Scales sn = scales(grid, kn);
            if (scaled_norm(rn.F, sn) <= f0 || size <= 1e3 * opts.step_tol * sc.phi) {
                theta += alpha * delta[0];
                omega = wn;
                lambda += alpha * delta[2];
                mu += alpha * delta[3];
                k = std::move(kn);
                res = std::move(rn);
                sc = sn;
                accepted = true;
                break;
            }
        }
        if (!accepted) fail(ErrorCode::NewtonDiverged, "damped Newton step failed to reduce the residual");

        // below 1e3 step_tol a step that no longer contracts is the noise floor of the kernel solves
        const bool floor = size <= 1e3 * opts.step_tol * sc.phi && size >= 0.25 * prev_size;
        prev_size = size;
        if (alpha == 1.0 && (size <= opts.step_tol * sc.phi || floor)) {
            ModulationCoords out;
            out.theta = theta;
            out.omega = omega;
            out.lambda = lambda;
            out.mu = mu;
            out.iterations = it;
            out.r = project_continuous(grid, k, res.R);
            out.r_L2 = grid.norm(out.r);
            out.r_H1 = grid.h1_norm(out.r);
            if (out.r_L2 > opts.chart_radius * sc.phi)
                fail(ErrorCode::NewtonDiverged, "field outside the coordinate chart (|r|/|phi| = " +
                                                    std::to_string(out.r_L2 / sc.phi) + ")");
            return out;
        }
    }
    fail(ErrorCode::NewtonDiverged, "modulation Newton did not converge");
}

InitialData init_field(const GroundStateFamily& family, double omega0, double lambda0, double Q_target,
                       const std::optional<CVec>& r_pert, double theta0)
{
    const RadialGrid& grid = family.grid();
    InitialData out;
    out.kernel = kernel_at(family, omega0);
    CVec r;
    if (r_pert) {
        if (r_pert->size() != grid.size()) fail(ErrorCode::ConfigInvalid, "perturbation does not match the grid");
        r = project_continuous(grid, out.kernel, *r_pert);
    }
    out.mu = mu_from_Q(grid, out.kernel, Q_target, lambda0, r);
    out.field.grid = grid;
    out.field.u = reconstruct(out.kernel, theta0, lambda0, out.mu, r);
    out.field.t = 0.0;
    out.conserved = conserved_quantities(out.field, family.nonlinearity());
    if (std::abs(out.conserved.Q - Q_target) > 1e-8 * Q_target)
        fail(ErrorCode::MassMismatch, "initial mass " + std::to_string(out.conserved.Q) + " vs target " +
                                          std::to_string(Q_target));
    return out;
}

ModulationTracker::ModulationTracker(const GroundStateFamily& family, ModulationOptions opts, double Q,
                                     ModulationCoords initial_guess, double jump_threshold)
    : family_(family), opts_(opts), jump_(jump_threshold), guess_(std::move(initial_guess))
{
    track_.Q = Q;
}

bool ModulationTracker::feed(const FieldState& field)
{
    if (track_.lost_lock) return false;
    ModulationCoords c;
    try {
        c = decompose(field.u, family_, guess_, opts_);
    } catch (const Error& e) {
        track_.lost_lock = true;
        track_.reason = e.what();
        return false;
    }
    const auto& s = track_.samples;
    if (!s.empty() && std::abs(c.omega - s.back().omega) > jump_) {
        track_.lost_lock = true;
        track_.reason = "LostLock: frequency jump " + std::to_string(c.omega - s.back().omega);
        return false;
    }
    TrackSample ts{field.t, c.theta, c.omega, c.lambda, c.mu, c.r_L2, c.r_H1};
    ModulationCoords next;
    if (!s.empty()) {
        const TrackSample& p = s.back();
        const double f = (field.t - p.t) > 0.0 ? 1.0 : 0.0;
        next.theta = c.theta + f * (c.theta - p.theta);
        next.omega = c.omega + f * (c.omega - p.omega);
        next.lambda = c.lambda + f * (c.lambda - p.lambda);
        next.mu = c.mu + f * (c.mu - p.mu);
    } else {
        next.theta = c.theta;
        next.omega = c.omega;
        next.lambda = c.lambda;
        next.mu = c.mu;
    }
    if (!(next.omega >= family_.omega_min() && next.omega <= family_.omega_max())) next.omega = c.omega;
    guess_ = next;
    track_.samples.push_back(ts);
    return true;
}

DriftReport energy_drift(const ModulationTrack& track, const ReducedModel& model)
{
    DriftReport rep;
    for (const auto& s : track.samples) {
        if (!model.in_window(s.omega)) break;
        rep.series.push_back(model.energy(s.omega, s.lambda));
    }
    for (double e : rep.series) rep.drift = std::max(rep.drift, std::abs(e - rep.series.front()));
    return rep;
}

ShadowReport shadow_compare(const ModulationTrack& track, const ReducedTrajectory& reduced, double epsilon,
                            double t_max, const ReducedModel* model, const KernelTable* table)
{
    ShadowReport rep;
    rep.epsilon = epsilon;
    rep.t_max = t_max;
    const double e3 = std::pow(epsilon, 3.0), e52 = std::pow(epsilon, 2.5);
    std::size_t used = 0;
    for (std::size_t k = 0; k < track.samples.size(); ++k) {
        const TrackSample& s = track.samples[k];
        if (s.t > t_max * (1.0 + 1e-12)) break;
        if (k >= reduced.t.size() || std::abs(reduced.t[k] - s.t) > 1e-9 * (1.0 + std::abs(s.t)))
            fail(ErrorCode::TimeGridMismatch, "reduced trajectory and track do not share the time grid");
        rep.D_omega = std::max(rep.D_omega, std::abs(s.omega - reduced.omega[k]) / e3);
        rep.D_lambda = std::max(rep.D_lambda, std::abs(s.lambda - reduced.lambda[k]) / e52);
        if (table) rep.systematic_budget = std::max(rep.systematic_budget,
                                                    std::abs(table->B_star / (2.0 * table->A_star) * s.mu) / e3);
        ++used;
    }
    if (model && model->has_well()) {
        try {
            rep.n_periods = t_max / measure_period(reduced).period;
        } catch (const Error&) {
            rep.n_periods = 0.0;
        }
    }
    if (used == 0) fail(ErrorCode::TimeGridMismatch, "no common samples");
    return rep;
}

}  // namespace nlsosc
