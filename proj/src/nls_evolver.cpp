#include "nlsosc/nls_evolver.hpp"

#include "nlsosc/error.hpp"
#include "nlsosc/ground_family.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nlsosc {

ConservedPair conserved_quantities(const FieldState& field, const Nonlinearity& nl)
{
    return {mass(field.grid, field.u), energy(field.grid, nl, field.u)};
}

SplitStepper::SplitStepper(const RadialGrid& grid, const Nonlinearity& nl, double dt, SpongeOptions sponge)
    : grid_(grid), nl_(nl), dt_(dt), sponge_(sponge)
{
    if (!(std::isfinite(dt) && dt != 0.0)) fail(ErrorCode::ConfigInvalid, "time step must be finite and nonzero");
    if (sponge.enabled && dt < 0.0) fail(ErrorCode::ConfigInvalid, "sponge needs a forward time step");
    const int n = grid.size();
    const double mu = dt / (grid.h() * grid.h());
    const std::complex<double> I(0.0, 1.0);
    const std::complex<double> diag = 1.0 + I * mu;
    off_ = -0.5 * I * mu;
    cprime_.resize(n);
    denom_.resize(n);
    denom_[0] = diag;
    cprime_[0] = off_ / diag;
    for (int i = 1; i < n; ++i) {
        denom_[i] = diag - off_ * cprime_[i - 1];
        if (std::abs(denom_[i]) == 0.0) fail(ErrorCode::LinearSolveFailure, "Crank-Nicolson factorization breakdown");
        cprime_[i] = off_ / denom_[i];
    }
    damping_ = Vec::Ones(n);
    if (sponge_.enabled) {
        const double r0 = sponge_.start_fraction * grid.r_max();
        for (int i = 0; i < n; ++i) {
            const double r = grid.r()[i];
            if (r > r0) {
                const double x = (r - r0) / (grid.r_max() - r0);
                damping_[i] = std::exp(-sponge_.strength * x * x * dt);
            }
        }
    }
}

void SplitStepper::rotate(CVec& u, double tau) const
{
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] *= std::polar(1.0, -nl_.g(std::norm(u[i])) * tau);
}

void SplitStepper::linear(CVec& u) const
{
    const int n = grid_.size();
    const Vec& r = grid_.r();
    // right side (I + i dt/2 D2) v, then forward/back substitution
    std::vector<std::complex<double>>& v = scratch_v_;
    std::vector<std::complex<double>>& d = scratch_d_;
    v.resize(n);
    d.resize(n);
    for (int i = 0; i < n; ++i) v[i] = r[i] * u[i];
    const std::complex<double> diag_rhs = 1.0 + 2.0 * off_;  // 1 - i mu
    for (int i = 0; i < n; ++i) {
        std::complex<double> acc = diag_rhs * v[i];
        if (i > 0) acc -= off_ * v[i - 1];
        if (i + 1 < n) acc -= off_ * v[i + 1];
        d[i] = acc;
    }
    d[0] /= denom_[0];
    for (int i = 1; i < n; ++i) d[i] = (d[i] - off_ * d[i - 1]) / denom_[i];
    for (int i = n - 2; i >= 0; --i) d[i] -= cprime_[i] * d[i + 1];
    for (int i = 0; i < n; ++i) u[i] = d[i] / r[i];
}

void SplitStepper::damp(CVec& u) const
{
    if (sponge_.enabled) u.array() *= damping_.array().cast<std::complex<double>>();
}

void SplitStepper::step(FieldState& field) const
{
    rotate(field.u, 0.5 * dt_);
    linear(field.u);
    damp(field.u);
    rotate(field.u, 0.5 * dt_);
    field.t += dt_;
}

FieldState step(const FieldState& field, double dt, const Nonlinearity& nl)
{
    FieldState out = field;
    SplitStepper(field.grid, nl, dt).step(out);
    return out;
}

double tail_level(const FieldState& field)
{
    const int n = field.grid.size();
    const int start = static_cast<int>(0.95 * n);
    const double peak = field.u.cwiseAbs().maxCoeff();
    if (peak == 0.0) return 0.0;
    return field.u.tail(n - start).cwiseAbs().maxCoeff() / peak;
}

EvolutionResult evolve(FieldState field, const Nonlinearity& nl, const EvolveOptions& opts, const Observer& observer)
{
    const long steps = std::lround(opts.T / opts.dt);
    if (steps > opts.step_cap)
        fail(ErrorCode::StepTooLarge, "T/dt = " + std::to_string(steps) + " exceeds the step cap");
    const long every = std::max(1L, std::lround(opts.cadence / opts.dt));
    std::vector<double> weights{1.0};
    if (opts.order == 4) {
        const double cbrt2 = std::cbrt(2.0);
        const double w1 = 1.0 / (2.0 - cbrt2);
        weights = {w1, -cbrt2 * w1, w1};
    } else if (opts.order != 2) {
        fail(ErrorCode::ConfigInvalid, "splitting order must be 2 or 4");
    }
    const SplitStepper full(field.grid, nl, opts.dt, opts.sponge);
    std::vector<SplitStepper> sub;
    for (double w : weights) sub.emplace_back(field.grid, nl, w * opts.dt);
    const double t0 = field.t;

    EvolutionResult res;
    const ConservedPair c0 = conserved_quantities(field, nl);
    res.series.push_back({field.t, c0.Q, c0.E});
    auto observe = [&](const FieldState& f) {
        const ConservedPair c = conserved_quantities(f, nl);
        res.series.push_back({f.t, c.Q, c.E});
        res.mass_drift = std::max(res.mass_drift, std::abs(c.Q - c0.Q) / c0.Q);
        res.energy_drift = std::max(res.energy_drift, std::abs(c.E - c0.E) / std::abs(c0.E));
        if (!std::isfinite(c.Q) || !std::isfinite(c.E)) fail(ErrorCode::LinearSolveFailure, "non-finite field");
        if (tail_level(f) > opts.tail_floor)
            fail(ErrorCode::TailContamination, "field near r_max reached " + std::to_string(tail_level(f)) +
                                                   " of the peak at t = " + std::to_string(f.t));
        return observer ? observer(f) : true;
    };
    if (observer && !observer(field)) {
        res.stopped_by_observer = true;
        res.final_state = std::move(field);
        return res;
    }

    // each step is a symmetric composition of Strang steps; adjacent half rotations are fused
    // and split again only at observation times
    const double head = 0.5 * weights.front() * opts.dt;
    full.rotate(field.u, head);
    for (long n = 1; n <= steps; ++n) {
        for (std::size_t k = 0; k < sub.size(); ++k) {
            sub[k].linear(field.u);
            if (k + 1 < sub.size()) full.rotate(field.u, 0.5 * (weights[k] + weights[k + 1]) * opts.dt);
        }
        full.damp(field.u);
        field.t = t0 + n * opts.dt;
        if (n % every == 0 || n == steps) {
            full.rotate(field.u, head);
            res.steps = n;
            if (!observe(field)) {
                res.stopped_by_observer = true;
                break;
            }
            if (n < steps) full.rotate(field.u, head);
        } else {
            full.rotate(field.u, 2.0 * head);
        }
    }
    res.final_state = std::move(field);
    return res;
}

}  // namespace nlsosc
