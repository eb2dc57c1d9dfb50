#include "nlsosc/acceptance.hpp"

#include "nlsosc/error.hpp"
#include "nlsosc/experiments.hpp"
#include "nlsosc/linearization.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>

namespace nlsosc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Tolerances and amplitude sets of the criteria; deliberately not configurable.
const std::vector<double> kWellEpsilons{0.025, 0.05, 0.1};
constexpr double kConstantSpread = 1.5;  // max C / min C
constexpr int kSpectrumSide = 5;
constexpr double kLambda2Tol = 0.04;
const std::vector<double> kSweepEpsilons{0.02, 0.03, 0.045, 0.067, 0.1};
constexpr double kSweepFraction = 0.3;
constexpr double kSlopeLo = -0.55, kSlopeHi = -0.45;
constexpr double kHarmonicTol = 0.10;
constexpr double kMinusPhiTol = 1e-8;
constexpr double kPlusDphiTol = 1e-3;
constexpr double kChainTol = 1e-6;
constexpr double kRelTol = 1e-3;
constexpr double kAStarTol = 1e-6;
constexpr double kSymmetryTol = 1e-12;
constexpr double kPdeEpsilon = 0.08;
constexpr double kPdeEpsilonSmall = 0.04;
constexpr double kPerturbationScale = 0.5;
constexpr int kMinCrossings = 6;
constexpr double kTrackPeriods = 3.0;
constexpr double kOmegaBound = 3.0, kLambdaBound = 3.0;
constexpr double kPeriodTol = 0.10;
constexpr double kMonotoneSlack = 1e-10;
constexpr double kDriftRatio = 4.0;
constexpr double kShadowPeriods = 2.0;
constexpr double kShadowRatio = 3.0;
constexpr double kMassPer1e4 = 1e-10;
constexpr double kOrderLo = 1.8, kOrderHi = 2.2;
const std::vector<double> kOrderDts{0.04, 0.02, 0.01};
constexpr double kOrderT = 50.0;
constexpr double kReducedDriftRate = 1e-9;
constexpr double kRoundTripTol = 1e-8;

// The barrier remainder is O(eps^5): the eps^4 term cancels by parity, so C_barrier
// shrinks by 4x over the amplitude set and the spread bound cannot hold.
const std::map<int, std::string> kKnownFailures{
    {2, "barrier remainder is O(eps^5), so the eps^4 constant is not amplitude independent"}};

struct Outcome {
    bool pass = false;
    std::string summary;
    json measured;
};

std::string fmt(double x)
{
    char b[32];
    std::snprintf(b, sizeof b, "%.4g", x);
    return b;
}

double spread(const std::vector<double>& v)
{
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo;
}

// PDE runs shared between criteria with identical resolved configs.
class RunCache {
public:
    const PdeRun& get(const ExperimentConfig& cfg, double eps)
    {
        ExperimentConfig c = cfg;
        c.Q.reset();
        c.epsilon = eps;
        const std::string key = to_json(c).dump();
        auto it = runs_.find(key);
        if (it != runs_.end()) return *it->second;
        auto run = std::make_unique<PdeRun>(run_pde(make_context(c)));
        return *runs_.emplace(key, std::move(run)).first->second;
    }

private:
    std::map<std::string, std::unique_ptr<PdeRun>> runs_;
};

ExperimentConfig pde_config(const ExperimentConfig& cfg)
{
    ExperimentConfig c = cfg;
    c.side = "trapped";
    c.perturbation.amplitude = kPerturbationScale;
    c.initial.omega0.reset();
    c.initial.lambda0 = 0.0;
    c.evolve.T.reset();
    c.evolve.n_periods = std::max(c.evolve.n_periods, kTrackPeriods + 0.1);
    return c;
}

double eq_drift(const PdeRun& run, double t_max)
{
    double d = 0.0;
    for (std::size_t i = 0; i < run.track.samples.size(); ++i) {
        if (run.track.samples[i].t > t_max) break;
        if (std::isfinite(run.E_Q[i])) d = std::max(d, std::abs(run.E_Q[i] - run.E_Q.front()));
    }
    return d;
}

Outcome well_criterion(const ExperimentConfig& cfg, bool barrier)
{
    const Context ctx = make_context(cfg);
    const CriticalPoint& cp = ctx.bundle.critical;
    const double s1 = std::sqrt(2.0 / cp.d2q_star);
    std::vector<double> cp_plus, cp_minus, cb;
    json rows = json::array();
    for (double e : kWellEpsilons) {
        const WellGeometry w = potential_well(ctx.family(), cp.q_star + e * e);
        const double cplus = std::abs(w.omega_plus - cp.omega_star - e * s1) / (e * e);
        const double cminus = std::abs(w.omega_minus - cp.omega_star + e * s1) / (e * e);
        const double cbar = std::abs(w.barrier - 4.0 / 3.0 * e * e * e * s1) / std::pow(e, 4);
        cp_plus.push_back(cplus);
        cp_minus.push_back(cminus);
        cb.push_back(cbar);
        rows.push_back({{"epsilon", e},
                        {"omega_minus", w.omega_minus},
                        {"omega_plus", w.omega_plus},
                        {"barrier", w.barrier},
                        {"C_plus", cplus},
                        {"C_minus", cminus},
                        {"C_barrier", cbar}});
    }
    Outcome o;
    o.measured = {{"omega_star", cp.omega_star}, {"d2q_star", cp.d2q_star}, {"rows", rows}, {"tolerance_spread", kConstantSpread}};
    if (barrier) {
        const double sp = spread(cb);
        o.pass = sp <= kConstantSpread;
        o.measured["spread"] = sp;
        std::vector<double> le, lerr;
        for (std::size_t i = 0; i < kWellEpsilons.size(); ++i) {
            le.push_back(std::log(kWellEpsilons[i]));
            lerr.push_back(std::log(cb[i] * std::pow(kWellEpsilons[i], 4)));
        }
        o.measured["observed_order"] = fit_line(le, lerr).slope;
        o.summary = "C_barrier in [" + fmt(*std::min_element(cb.begin(), cb.end())) + ", " +
                    fmt(*std::max_element(cb.begin(), cb.end())) + "], max/min " + fmt(sp) + " <= " + fmt(kConstantSpread) +
                    ", observed remainder order " + fmt(o.measured["observed_order"].get<double>());
    } else {
        const double sp = std::max(spread(cp_plus), spread(cp_minus));
        o.pass = sp <= kConstantSpread;
        o.measured["spread"] = sp;
        o.summary = "C_+ ~ " + fmt(cp_plus[1]) + ", C_- ~ " + fmt(cp_minus[1]) + ", max/min " + fmt(sp) +
                    " <= " + fmt(kConstantSpread);
    }
    return o;
}

Outcome spectral_criterion(const ExperimentConfig& cfg)
{
    const Context ctx = make_context(cfg);
    const CriticalPoint& cp = ctx.bundle.critical;
    SpectrumSpec spec = cfg.spectrum;
    spec.omegas.clear();
    spec.n_side = kSpectrumSide;
    double worst = 0.0;
    json rows = json::array();
    double star_max = 0.0;
    for (double om : spectrum_frequencies(spec, cp.omega_star)) {
        const SpectrumPoint p = spectrum_point(ctx.family(), cp, om);
        if (om == cp.omega_star) {
            for (std::size_t i = 0; i < std::min<std::size_t>(4, p.eigenvalues.size()); ++i)
                star_max = std::max(star_max, std::abs(p.eigenvalues[i]));
            continue;
        }
        const auto top = p.eigenvalues.back();
        worst = std::max(worst, p.lambda2_error);
        rows.push_back({{"omega", om}, {"a", p.a}, {"eig_re", top.real()}, {"eig_im", std::abs(top.imag())}, {"error", p.lambda2_error}});
    }
    Outcome o;
    o.pass = worst <= kLambda2Tol;
    o.measured = {{"rows", rows}, {"max_error", worst}, {"tolerance", kLambda2Tol}, {"omega_star_max_modulus", star_max}};
    o.summary = "max |lambda^2 - a|/|a| = " + fmt(worst) + " <= " + fmt(kLambda2Tol) + " over " +
                std::to_string(2 * kSpectrumSide) + " frequencies";
    return o;
}

Outcome period_criterion(const ExperimentConfig& cfg)
{
    const Context ctx = make_context(cfg);
    const auto rows =
        period_sweep(ctx, kSweepEpsilons, kSweepFraction, cfg.reduced.frozen_A, cfg.reduced.n_periods, cfg.sweep.workers);
    std::vector<double> le, lt;
    json jr = json::array();
    for (const auto& r : rows) {
        le.push_back(std::log(r.epsilon));
        lt.push_back(std::log(r.period));
        jr.push_back({{"epsilon", r.epsilon}, {"period", r.period}, {"harmonic", r.harmonic}});
    }
    const LineFit f = fit_line(le, lt);
    const double harm = std::abs(rows.front().period - rows.front().harmonic) / rows.front().harmonic;
    Outcome o;
    o.pass = f.slope >= kSlopeLo && f.slope <= kSlopeHi && harm <= kHarmonicTol;
    o.measured = {{"rows", jr}, {"slope", f.slope}, {"harmonic_error", harm}};
    o.summary = "slope " + fmt(f.slope) + " in [" + fmt(kSlopeLo) + ", " + fmt(kSlopeHi) + "], T(eps=" +
                fmt(rows.front().epsilon) + ") vs harmonic " + fmt(harm) + " <= " + fmt(kHarmonicTol);
    return o;
}

Outcome chain_criterion(const ExperimentConfig& cfg)
{
    const Context ctx = make_context(cfg);
    const CriticalPoint& cp = ctx.bundle.critical;
    const GroundStateFamily& fam = ctx.family();
    SpectrumSpec spec = cfg.spectrum;
    spec.omegas.clear();
    spec.n_side = kSpectrumSide;
    std::map<std::string, double> worst;
    auto bump = [&](const std::string& k, double v) { worst[k] = std::max(worst[k], v); };
    double a_scale = 0.0, a_star = 0.0, A_star = 0.0, A_quad_star = 0.0;
    for (double om : spectrum_frequencies(spec, cp.omega_star)) {
        const SpectrumPoint p = spectrum_point(fam, cp, om);
        bump("minus_phi", p.chain.minus_phi);
        bump("plus_dphi", p.chain.plus_dphi);
        bump("plus_zeta", p.chain.plus_zeta);
        bump("minus_eta", p.chain.minus_eta);
        bump("eta_phi", p.chain.eta_phi);
        bump("pair12", p.pair12);
        bump("pair13", p.pair13);
        bump("pair14", p.pair14);
        bump("pair24", p.pair24);
        bump("quadratic_form", p.quadratic_form);
        if (om == cp.omega_star) {
            a_star = p.a;
            A_star = p.A;
            const LinearizedOperators ops = assemble_operators(fam, om);
            const KernelBasis k = kernel_at(fam, om);
            A_quad_star = std::abs(fam.grid().inner(ops.apply_minus(k.eta), k.eta) - k.A) / k.A;
        } else {
            bump("a_consistency", p.a_consistency);
            a_scale = std::max(a_scale, std::abs(p.a));
        }
    }
    // symmetry of the discrete operators on reproducible pseudo-random vectors
    const LinearizedOperators ops = assemble_operators(fam, cp.omega_star);
    const int n = fam.grid().size();
    Vec u(n), v(n);
    for (int i = 0; i < n; ++i) {
        u[i] = std::sin(0.37 * i + 1.0) * std::exp(-fam.grid().r()[i] / 30.0);
        v[i] = std::cos(0.11 * i * i + 0.5) * std::exp(-fam.grid().r()[i] / 20.0);
    }
    auto sym = [&](const Vec& au, const Vec& av) {
        const double l = fam.grid().inner(au, v), r = fam.grid().inner(u, av);
        return std::abs(l - r) / std::max(std::abs(l), std::abs(r));
    };
    const double sym_plus = sym(ops.apply_plus(u), ops.apply_plus(v));
    const double sym_minus = sym(ops.apply_minus(u), ops.apply_minus(v));

    const double a_star_rel = std::abs(a_star) / a_scale;
    Outcome o;
    o.pass = worst["minus_phi"] <= kMinusPhiTol && worst["plus_dphi"] <= kPlusDphiTol &&
             worst["plus_zeta"] <= kChainTol && worst["minus_eta"] <= kChainTol && worst["eta_phi"] <= kChainTol &&
             worst["pair12"] <= kRelTol && worst["pair13"] <= kRelTol && worst["pair14"] <= kRelTol &&
             worst["pair24"] <= kRelTol && worst["quadratic_form"] <= kRelTol && worst["a_consistency"] <= kRelTol &&
             a_star_rel <= kAStarTol && A_star > 0.0 && A_quad_star <= kRelTol && sym_plus <= kSymmetryTol &&
             sym_minus <= kSymmetryTol;
    o.measured = json(worst);
    o.measured["a_star_relative"] = a_star_rel;
    o.measured["A_star"] = A_star;
    o.measured["A_quadratic_at_star"] = A_quad_star;
    o.measured["symmetry_plus"] = sym_plus;
    o.measured["symmetry_minus"] = sym_minus;
    double pair_worst = std::max({worst["pair12"], worst["pair13"], worst["pair14"], worst["pair24"]});
    o.summary = "chain " + fmt(std::max(worst["plus_zeta"], worst["minus_eta"])) + " <= " + fmt(kChainTol) +
                ", pairings " + fmt(pair_worst) + " <= " + fmt(kRelTol) + ", a=-q'/A " + fmt(worst["a_consistency"]) +
                ", |a*|/scale " + fmt(a_star_rel) + ", A* = " + fmt(A_star);
    return o;
}

Outcome oscillation_criterion(const ExperimentConfig& cfg, RunCache& cache)
{
    const PdeRun& run = cache.get(pde_config(cfg), kPdeEpsilon);
    const Context ctx = make_context(pde_config(cfg), kPdeEpsilon);
    const WellGeometry w = potential_well(ctx.family(), run.Q);
    const double t_max = kTrackPeriods * run.period_ref;
    std::vector<double> t, om, la;
    double sup_w = 0.0, sup_l = 0.0;
    for (const auto& s : run.track.samples) {
        if (s.t > t_max) break;
        t.push_back(s.t);
        om.push_back(s.omega);
        la.push_back(s.lambda);
        sup_w = std::max(sup_w, std::abs(s.omega - ctx.bundle.critical.omega_star));
        sup_l = std::max(sup_l, std::abs(s.lambda));
    }
    const std::size_t crossings = crossing_times(t, om, w.omega_plus).size();
    double period = 0.0;
    try {
        period = period_from_crossings(upward_crossings(t, la, 0.0, 0.1 * run.period_ref)).period;
    } catch (const Error&) {
    }
    const double perr = period > 0.0 ? std::abs(period - run.period_ref) / run.period_ref : 1.0;
    const double eps = kPdeEpsilon;
    Outcome o;
    o.pass = !run.track.lost_lock && crossings >= static_cast<std::size_t>(kMinCrossings) &&
             sup_w <= kOmegaBound * eps && sup_l <= kLambdaBound * std::pow(eps, 1.5) && perr <= kPeriodTol;
    o.measured = {{"crossings", crossings},      {"sup_omega", sup_w},      {"sup_lambda", sup_l},
                  {"pde_period", period},        {"reduced_period", run.period_ref}, {"period_error", perr},
                  {"lost_lock", run.track.lost_lock}, {"runtime_seconds", run.seconds}};
    o.summary = std::to_string(crossings) + " omega_+ crossings (>= " + std::to_string(kMinCrossings) + "), period " +
                fmt(period) + " vs reduced " + fmt(run.period_ref) + " (" + fmt(perr) + " <= " + fmt(kPeriodTol) +
                "), sup|lambda| " + fmt(sup_l) + " <= " + fmt(kLambdaBound * std::pow(eps, 1.5));
    if (run.track.lost_lock) o.summary += ", lost lock: " + run.track.reason;
    return o;
}

Outcome instability_criterion(const ExperimentConfig& cfg)
{
    ExperimentConfig c = cfg;
    c.Q.reset();
    c.epsilon = kPdeEpsilon;
    c.side = "unstable";
    c.initial.omega0.reset();
    c.initial.lambda0 = 0.0;
    const Context ctx = make_context(c);
    const PdeRun run = run_pde(ctx);
    double worst_rise = 0.0;
    const auto& s = run.track.samples;
    for (std::size_t i = 1; i < s.size(); ++i) worst_rise = std::max(worst_rise, s[i].omega - s[i - 1].omega);
    const bool exited = run.track.lost_lock || (!s.empty() && s.back().omega <= ctx.bundle.table.omega.front());
    Outcome o;
    o.pass = worst_rise <= kMonotoneSlack && exited && s.size() >= 2;
    o.measured = {{"samples", s.size()},
                  {"max_rise", worst_rise},
                  {"lost_lock", run.track.lost_lock},
                  {"reason", run.track.reason},
                  {"omega_first", s.empty() ? 0.0 : s.front().omega},
                  {"omega_last", s.empty() ? 0.0 : s.back().omega},
                  {"t_last", s.empty() ? 0.0 : s.back().t},
                  {"runtime_seconds", run.seconds}};
    o.summary = "omega " + fmt(o.measured["omega_first"]) + " -> " + fmt(o.measured["omega_last"]) + " by t = " +
                fmt(o.measured["t_last"]) + ", max rise " + fmt(worst_rise) + " <= " + fmt(kMonotoneSlack) +
                (run.track.lost_lock ? ", ended by lost lock" : exited ? ", left the window" : ", still locked");
    return o;
}

Outcome drift_criterion(const ExperimentConfig& cfg, RunCache& cache)
{
    const ExperimentConfig c = pde_config(cfg);
    const PdeRun& big = cache.get(c, kPdeEpsilon);
    const PdeRun& small = cache.get(c, kPdeEpsilonSmall);
    const double d_big = eq_drift(big, kTrackPeriods * big.period_ref);
    const double d_small = eq_drift(small, kTrackPeriods * small.period_ref);
    const double ratio = d_big / d_small;
    Outcome o;
    o.pass = !big.track.lost_lock && !small.track.lost_lock && ratio >= kDriftRatio;
    o.measured = {{"drift_large", d_big}, {"drift_small", d_small}, {"ratio", ratio}, {"tolerance", kDriftRatio}};
    o.summary = "E_Q drift " + fmt(d_big) + " (eps " + fmt(kPdeEpsilon) + ") / " + fmt(d_small) + " (eps " +
                fmt(kPdeEpsilonSmall) + ") = " + fmt(ratio) + " >= " + fmt(kDriftRatio);
    return o;
}

Outcome shadow_criterion(const ExperimentConfig& cfg, RunCache& cache)
{
    const ExperimentConfig c = pde_config(cfg);
    std::vector<double> dw, dl;
    json rows = json::array();
    for (double e : {kPdeEpsilon, kPdeEpsilonSmall}) {
        const PdeRun& run = cache.get(c, e);
        const Context ctx = make_context(c, e);
        const ReducedModel model = ctx.model(c.reduced.frozen_A);
        const double t_max = kShadowPeriods * run.period_ref;
        const ReducedTrajectory red = reduced_on_track(model, run.track, t_max);
        const ShadowReport sr = shadow_compare(run.track, red, e, t_max, &model, &ctx.bundle.table);
        dw.push_back(sr.D_omega);
        dl.push_back(sr.D_lambda);
        rows.push_back({{"epsilon", e}, {"D_omega", sr.D_omega}, {"D_lambda", sr.D_lambda}, {"n_periods", sr.n_periods},
                        {"systematic_budget", sr.systematic_budget}});
    }
    const double rw = spread(dw), rl = spread(dl);
    Outcome o;
    o.pass = rw <= kShadowRatio && rl <= kShadowRatio;
    o.measured = {{"rows", rows}, {"ratio_omega", rw}, {"ratio_lambda", rl}, {"tolerance", kShadowRatio}};
    o.summary = "D_omega " + fmt(dw[0]) + "/" + fmt(dw[1]) + " (x" + fmt(rw) + "), D_lambda " + fmt(dl[0]) + "/" +
                fmt(dl[1]) + " (x" + fmt(rl) + "), both <= x" + fmt(kShadowRatio);
    return o;
}

Outcome gates_criterion(const ExperimentConfig& cfg, RunCache& cache)
{
    const ExperimentConfig c = pde_config(cfg);
    const PdeRun& run = cache.get(c, kPdeEpsilon);
    const double mass_rate = run.evolution.mass_drift * 1e4 / static_cast<double>(run.evolution.steps);

    // energy drift order of plain Strang steps on the perturbed initial datum
    const Context ctx = make_context(c, kPdeEpsilon);
    const GroundStateFamily& fam = ctx.family();
    std::vector<double> ld, le;
    json orders = json::array();
    for (double dt : kOrderDts) {
        EvolveOptions eo;
        eo.dt = dt;
        eo.T = kOrderT;
        eo.cadence = dt;
        eo.order = 2;
        const EvolutionResult r = evolve(run.init.field, fam.nonlinearity(), eo);
        ld.push_back(std::log(dt));
        le.push_back(std::log(r.energy_drift));
        orders.push_back({{"dt", dt}, {"energy_drift", r.energy_drift}});
    }
    const double order = fit_line(ld, le).slope;

    // reduced integrator drift per unit time relative to the barrier
    const ReducedModel model = ctx.model(c.reduced.frozen_A);
    const double Th = model.harmonic_period();
    const ReducedTrajectory tr = integrate_reduced(model, turning_point(model, kSweepFraction), 0.0, 4.0 * Th, Th / 2000.0);
    double drift = 0.0;
    for (double E : tr.energy) drift = std::max(drift, std::abs(E - tr.energy.front()));
    const double red_rate = drift / (model.well().barrier * tr.t.back());

    // decompose o reconstruct
    const KernelBasis k = kernel_at(fam, run.omega0);
    CVec r = project_continuous(fam.grid(), k, perturbation_profile(fam.grid(), c.perturbation));
    r *= 0.5 * std::pow(kPdeEpsilon, 1.5) / fam.grid().h1_norm(r);
    const double theta = 0.7, lambda = 0.4 * std::pow(kPdeEpsilon, 1.5) * 1e-3;
    const double mu = mu_from_Q(fam.grid(), k, run.Q, lambda, r);
    const CVec u = reconstruct(k, theta, lambda, mu, r);
    ModulationOptions mo;
    mo.window_lo = model.window_lo();
    mo.window_hi = model.window_hi();
    ModulationCoords guess;
    guess.theta = theta + 0.01;
    guess.omega = run.omega0 * (1.0 + 1e-4);
    const ModulationCoords got = decompose(u, fam, guess, mo);
    const KernelBasis kg = kernel_at(fam, got.omega);
    const double field_err = fam.grid().norm(CVec(reconstruct(kg, got.theta, got.lambda, got.mu, got.r) - u)) / fam.grid().norm(u);
    const double omega_err = std::abs(got.omega - run.omega0) / run.omega0;
    const double r_err = fam.grid().norm(CVec(got.r - r)) / fam.grid().norm(r);
    const double round_trip = std::max({field_err, omega_err, std::abs(got.theta - theta)});

    Outcome o;
    o.pass = mass_rate <= kMassPer1e4 && order >= kOrderLo && order <= kOrderHi && red_rate <= kReducedDriftRate &&
             round_trip <= kRoundTripTol;
    o.measured = {{"mass_drift_per_1e4_steps", mass_rate},
                  {"energy_order", order},
                  {"energy_drifts", orders},
                  {"reduced_drift_rate", red_rate},
                  {"round_trip", round_trip},
                  {"round_trip_r", r_err}};
    o.summary = "mass " + fmt(mass_rate) + "/1e4 steps, energy order " + fmt(order) + ", reduced drift " +
                fmt(red_rate) + "/barrier/time, round trip " + fmt(round_trip);
    return o;
}

const char* kNames[] = {"",
                        "critical-point asymptotics",
                        "barrier asymptotics",
                        "spectral cross-check",
                        "period scaling",
                        "Jordan chain and pairings",
                        "full PDE oscillation",
                        "instability side",
                        "energy almost-conservation",
                        "shadowing uniformity",
                        "conservation and convergence gates"};

}  // namespace

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Skipped: return "SKIPPED";
    case Verdict::ConfigError: return "CONFIG_ERROR";
    }
    return "?";
}

fs::path criterion_config(const fs::path& config_dir, int id)
{
    char name[32];
    std::snprintf(name, sizeof name, "criterion_%02d.json", id);
    return config_dir / name;
}

std::vector<CriterionResult> acceptance_suite(const fs::path& config_dir, const fs::path& out_dir,
                                              const std::vector<int>& only)
{
    RunCache cache;
    std::vector<CriterionResult> results;
    for (int id = 1; id <= 10; ++id) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        CriterionResult r;
        r.id = id;
        r.name = kNames[id];
        const fs::path path = criterion_config(config_dir, id);
        const auto t0 = std::chrono::steady_clock::now();
        if (!fs::exists(path)) {
            r.verdict = Verdict::Skipped;
            r.summary = "no config at " + path.string();
            results.push_back(r);
            continue;
        }
        try {
            const ExperimentConfig cfg = load_config(path);
            Outcome o;
            switch (id) {
            case 1: o = well_criterion(cfg, false); break;
            case 2: o = well_criterion(cfg, true); break;
            case 3: o = spectral_criterion(cfg); break;
            case 4: o = period_criterion(cfg); break;
            case 5: o = chain_criterion(cfg); break;
            case 6: o = oscillation_criterion(cfg, cache); break;
            case 7: o = instability_criterion(cfg); break;
            case 8: o = drift_criterion(cfg, cache); break;
            case 9: o = shadow_criterion(cfg, cache); break;
            case 10: o = gates_criterion(cfg, cache); break;
            }
            r.verdict = o.pass ? Verdict::Pass : Verdict::Fail;
            r.summary = o.summary;
            r.measured = o.measured;
        } catch (const Error& e) {
            r.verdict = e.code() == ErrorCode::ConfigInvalid ? Verdict::ConfigError : Verdict::Fail;
            r.summary = e.what();
        } catch (const std::exception& e) {
            r.verdict = Verdict::Fail;
            r.summary = e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (r.verdict == Verdict::Fail && kKnownFailures.count(id)) {
            r.known_failure = true;
            r.known_reason = kKnownFailures.at(id);
        }
        results.push_back(r);
    }
    if (!out_dir.empty()) write_json(out_dir / "acceptance_report.json", acceptance_json(results));
    return results;
}

json acceptance_json(const std::vector<CriterionResult>& results)
{
    json j;
    j["schema_version"] = kSchemaVersion;
    j["criteria"] = json::array();
    for (const auto& r : results)
        j["criteria"].push_back({{"id", r.id},
                                 {"name", r.name},
                                 {"verdict", to_string(r.verdict)},
                                 {"summary", r.summary},
                                 {"measured", r.measured},
                                 {"known_failure", r.known_failure},
                                 {"known_reason", r.known_reason},
                                 {"runtime_seconds", r.seconds}});
    return j;
}

std::string format_result_line(const CriterionResult& r)
{
    char head[96];
    std::snprintf(head, sizeof head, "criterion %2d %-8s %-36s", r.id, to_string(r.verdict).c_str(), r.name.c_str());
    char tail[32];
    std::snprintf(tail, sizeof tail, " [%.1fs]", r.seconds);
    std::string line = std::string(head) + r.summary + tail;
    if (r.known_failure) line += " (known failure: " + r.known_reason + ")";
    return line;
}

}  // namespace nlsosc
