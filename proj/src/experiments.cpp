#include "nlsosc/experiments.hpp"

#include "nlsosc/error.hpp"
#include "nlsosc/linearization.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace nlsosc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTailFloor = 1e-3;

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Uniform double in [0, 1) from the raw engine output, identical on every standard library.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<std::pair<std::string, std::string>> run_meta(const Context& ctx, double dt, const std::string& cls)
{
    std::vector<std::pair<std::string, std::string>> m;
    m.emplace_back("Q", ctx.Q ? format_double(*ctx.Q) : "nan");
    m.emplace_back("epsilon", format_double(ctx.epsilon));
    m.emplace_back("dt", format_double(dt));
    m.emplace_back("classification", cls);
    m.emplace_back("omega_star", format_double(ctx.bundle.critical.omega_star));
    return m;
}

void write_trajectory(const fs::path& path, const ReducedModel& model, const ReducedTrajectory& tr,
                      const Context& ctx)
{
    CsvWriter w(path, {"t", "omega", "lambda", "E_Q"}, run_meta(ctx, tr.dt, to_string(tr.classification.kind)));
    for (std::size_t i = 0; i < tr.t.size(); ++i) w.row({tr.t[i], tr.omega[i], tr.lambda[i], tr.energy[i]});
    w.close();
    const RescaledTrajectory rs = rescaled_view(model, tr);
    CsvWriter r(fs::path(path).replace_filename(path.stem().string() + "_rescaled.csv"), {"tau", "zeta", "kappa"},
                run_meta(ctx, tr.dt, to_string(tr.classification.kind)));
    for (std::size_t i = 0; i < rs.tau.size(); ++i) r.row({rs.tau[i], rs.zeta[i], rs.kappa[i]});
    r.close();
}

void write_track(const fs::path& path, const PdeRun& run, const Context& ctx, double dt)
{
    auto meta = run_meta(ctx, dt, run.track.lost_lock ? "lost_lock" : "locked");
    meta.emplace_back("interval", format_double(run.interval));
    CsvWriter w(path, {"t", "theta", "omega", "lambda", "mu", "r_L2", "r_H1", "E_Q"}, meta);
    for (std::size_t i = 0; i < run.track.samples.size(); ++i) {
        const TrackSample& s = run.track.samples[i];
        w.row({s.t, s.theta, s.omega, s.lambda, s.mu, s.r_L2, s.r_H1, run.E_Q[i]});
    }
    w.close();
}

void write_snapshot(const fs::path& path, const FieldState& f, double dt)
{
    CsvWriter w(path, {"r", "re_u", "im_u"},
                {{"t", format_double(f.t)},
                 {"dt", format_double(dt)},
                 {"r_max", format_double(f.grid.r_max())},
                 {"n_points", std::to_string(f.grid.size())}});
    for (int i = 0; i < f.grid.size(); ++i) w.row({f.grid.r()[i], f.u[i].real(), f.u[i].imag()});
    w.close();
}

void write_conserved(const fs::path& path, const EvolutionResult& res, double dt)
{
    CsvWriter w(path, {"t", "Q", "E"}, {{"dt", format_double(dt)}});
    for (const auto& c : res.series) w.row({c.t, c.Q, c.E});
    w.close();
}

json well_json(const WellGeometry& w)
{
    return {{"Q", w.Q},
            {"epsilon", w.epsilon},
            {"omega_minus", w.omega_minus},
            {"omega_plus", w.omega_plus},
            {"omega_plusplus", w.omega_plusplus},
            {"barrier", w.barrier}};
}

json critical_json(const CriticalPoint& cp)
{
    return {{"omega_star", cp.omega_star}, {"q_star", cp.q_star}, {"d2q_star", cp.d2q_star}};
}

}  // namespace

double Context::require_Q() const
{
    if (!Q) fail(ErrorCode::ConfigInvalid, "Q or epsilon: this experiment needs a mass level");
    return *Q;
}

ReducedModel Context::model(bool frozen_A) const
{
    return ReducedModel(bundle.family, bundle.table, require_Q(), frozen_A);
}

Context make_context(const ExperimentConfig& cfg)
{
    Context ctx;
    ctx.config = cfg;
    ctx.bundle = load_or_build(cfg.family);
    const double qs = ctx.bundle.critical.q_star;
    if (cfg.epsilon) {
        const double e2 = *cfg.epsilon * *cfg.epsilon;
        ctx.Q = cfg.side == "trapped" ? qs + e2 : qs - e2;
    } else if (cfg.Q) {
        ctx.Q = *cfg.Q;
    }
    if (ctx.Q) {
        ctx.epsilon = cfg.epsilon ? *cfg.epsilon : std::sqrt(std::abs(*ctx.Q - qs));
        ctx.trapped = *ctx.Q > qs;
    }
    return ctx;
}

Context make_context(const ExperimentConfig& cfg, double epsilon)
{
    ExperimentConfig c = cfg;
    c.Q.reset();
    c.epsilon = epsilon;
    return make_context(c);
}

double default_omega0(const Context& ctx)
{
    const CriticalPoint& cp = ctx.bundle.critical;
    if (!ctx.trapped) return cp.omega_star;
    const WellGeometry w = potential_well(ctx.family(), ctx.require_Q());
    return w.omega_plus - ctx.epsilon * std::sqrt(2.0 / cp.d2q_star);
}

double turning_point(const ReducedModel& model, double fraction)
{
    const WellGeometry& w = model.well();
    const double target = fraction * w.barrier;
    double lo = w.omega_minus, hi = w.omega_plus;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (model.potential(mid) > target ? lo : hi) = mid;
    }
    return hi;
}

double reduced_period(const ReducedModel& model, double omega0, double lambda0)
{
    const double Th = model.harmonic_period();
    if (!model.has_well()) return Th;
    try {
        const ReducedTrajectory tr = integrate_reduced(model, omega0, lambda0, 3.5 * Th, Th / 2000.0);
        if (tr.window_exit) return Th;
        return measure_period(tr).period;
    } catch (const Error&) {
        return Th;
    }
}

CVec perturbation_profile(const RadialGrid& grid, const PerturbationSpec& spec)
{
    const int n = grid.size();
    CVec r = CVec::Zero(n);
    if (spec.profile == "none" || spec.amplitude == 0.0) return r;
    const double w = spec.width;
    if (spec.profile == "gaussian") {
        for (int i = 0; i < n; ++i) {
            const double x = grid.r()[i] / w;
            r[i] = {std::exp(-x * x) * std::cos(grid.r()[i]), 0.5 * std::exp(-0.5 * x * x)};
        }
        return r;
    }
    std::mt19937_64 rng(spec.seed);
    for (int b = 0; b < 8; ++b) {
        const double c = 3.0 * w * unit(rng);
        const double s = 0.25 * w + 0.75 * w * unit(rng);
        const std::complex<double> amp(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0);
        for (int i = 0; i < n; ++i) {
            const double x = (grid.r()[i] - c) / s;
            r[i] += amp * std::exp(-x * x);
        }
    }
    return r;
}

PdeRun run_pde(const Context& ctx)
{
    const auto t_start = std::chrono::steady_clock::now();
    const ExperimentConfig& cfg = ctx.config;
    const GroundStateFamily& fam = ctx.family();
    PdeRun run;
    run.Q = ctx.require_Q();
    run.epsilon = ctx.epsilon;
    const ReducedModel model = ctx.model(cfg.reduced.frozen_A);
    run.omega0 = cfg.initial.omega0 ? *cfg.initial.omega0 : default_omega0(ctx);
    run.lambda0 = cfg.initial.lambda0;
    if (!model.in_window(run.omega0))
        fail(ErrorCode::ConfigInvalid, "initial.omega0: outside the kernel window");

    // below the critical mass there is no orbit; the trapped-side time scale 2 pi / sqrt(c0 eps) sizes the run
    run.period_ref = ctx.trapped ? reduced_period(model, run.omega0, run.lambda0)
                                 : 2.0 * M_PI / std::sqrt(model.c0() * ctx.epsilon);
    const double dt = cfg.evolve.dt;
    const long every = std::max(1L, std::lround(run.period_ref / cfg.evolve.samples_per_period / dt));
    run.interval = every * dt;
    const double T = cfg.evolve.T ? *cfg.evolve.T : cfg.evolve.n_periods * run.period_ref;
    run.T = std::ceil(T / run.interval - 1e-9) * run.interval;

    std::optional<CVec> r0;
    const CVec raw = perturbation_profile(fam.grid(), cfg.perturbation);
    if (raw.cwiseAbs().maxCoeff() > 0.0) {
        const KernelBasis k0 = kernel_at(fam, run.omega0);
        CVec p = project_continuous(fam.grid(), k0, raw);
        p *= cfg.perturbation.amplitude * std::pow(ctx.epsilon, 1.5) / fam.grid().h1_norm(p);
        r0 = p;
    }
    run.init = init_field(fam, run.omega0, run.lambda0, run.Q, r0, cfg.initial.theta0);

    ModulationOptions mo;
    mo.window_lo = model.window_lo();
    mo.window_hi = model.window_hi();
    ModulationCoords guess;
    guess.theta = cfg.initial.theta0;
    guess.omega = run.omega0;
    guess.lambda = run.lambda0;
    guess.mu = run.init.mu;
    ModulationTracker tracker(fam, mo, run.Q, guess, 0.1 * cfg.family.kernel_halfwidth);

    EvolveOptions eo;
    eo.dt = dt;
    eo.T = run.T;
    eo.cadence = run.interval;
    eo.tail_floor = kTailFloor;
    eo.order = cfg.evolve.order;
    eo.sponge = {cfg.evolve.sponge, cfg.evolve.sponge_start, cfg.evolve.sponge_strength};
    run.evolution = evolve(run.init.field, fam.nonlinearity(), eo, [&](const FieldState& f) {
        run.max_tail = std::max(run.max_tail, tail_level(f));
        return tracker.feed(f);
    });
    run.track = tracker.track();
    for (const auto& s : run.track.samples)
        run.E_Q.push_back(model.in_window(s.omega) ? model.energy(s.omega, s.lambda) : kNaN);
    run.seconds = seconds_since(t_start);
    return run;
}

ReducedTrajectory reduced_on_track(const ReducedModel& model, const ModulationTrack& track, double t_max)
{
    const auto& s = track.samples;
    if (s.size() < 2) fail(ErrorCode::TimeGridMismatch, "track has fewer than two samples");
    const double interval = s[1].t - s[0].t;
    std::size_t last = 0;
    while (last + 1 < s.size() && s[last + 1].t <= t_max * (1.0 + 1e-12)) ++last;
    const double dt_target = std::min(model.harmonic_period() / 2000.0, 0.02 / std::sqrt(model.c0() * model.epsilon()));
    const long m = std::max(1L, static_cast<long>(std::ceil(interval / dt_target)));
    const double dt = interval / m;
    const ReducedTrajectory full =
        integrate_reduced(model, s[0].omega, s[0].lambda, s[last].t - s[0].t + 0.5 * dt, dt);
    ReducedTrajectory out;
    out.dt = dt;
    out.classification = full.classification;
    out.window_exit = full.window_exit;
    for (std::size_t k = 0; k <= last; ++k) {
        const std::size_t j = k * m;
        if (j >= full.t.size()) break;
        out.t.push_back(s[k].t);
        out.omega.push_back(full.omega[j]);
        out.lambda.push_back(full.lambda[j]);
        out.energy.push_back(full.energy[j]);
    }
    return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

std::vector<double> crossing_times(const std::vector<double>& t, const std::vector<double>& y, double level)
{
    std::vector<double> out;
    for (std::size_t i = 1; i < y.size(); ++i) {
        const double a = y[i - 1] - level, b = y[i] - level;
        if ((a < 0.0 && b >= 0.0) || (a >= 0.0 && b < 0.0)) out.push_back(t[i - 1] + (t[i] - t[i - 1]) * a / (a - b));
    }
    return out;
}

std::vector<PeriodTableRow> period_sweep(const Context& base, const std::vector<double>& epsilons, double fraction,
                                         bool frozen_A, double n_periods, int workers)
{
    std::vector<PeriodTableRow> rows(epsilons.size());
    std::vector<std::string> errors(epsilons.size());
    std::atomic<std::size_t> next{0};
    const double qs = base.bundle.critical.q_star;
    auto work = [&] {
        for (std::size_t i = next++; i < epsilons.size(); i = next++) {
            try {
                const double e = epsilons[i];
                const ReducedModel model(base.bundle.family, base.bundle.table, qs + e * e, frozen_A);
                const double Th = model.harmonic_period();
                const double w0 = turning_point(model, fraction);
                const ReducedTrajectory tr = integrate_reduced(model, w0, 0.0, n_periods * 1.15 * Th, Th / 2000.0);
                const PeriodEstimate p = measure_period(tr);
                double drift = 0.0;
                for (double E : tr.energy) drift = std::max(drift, std::abs(E - tr.energy.front()));
                rows[i] = {e, model.Q(), p.period, Th, p.spread, p.cycles, drift / (model.well().barrier * tr.t.back())};
            } catch (const std::exception& ex) {
                errors[i] = ex.what();
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(epsilons.size())));
    for (int k = 1; k < n; ++k) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty()) fail(ErrorCode::NotPeriodic, "sweep at eps = " + format_double(epsilons[i]) + ": " + errors[i]);
    return rows;
}

std::vector<double> spectrum_frequencies(const SpectrumSpec& spec, double omega_star)
{
    if (!spec.omegas.empty()) return spec.omegas;
    std::vector<double> out;
    for (int k = spec.n_side; k >= 1; --k) out.push_back(omega_star - spec.offset * k / spec.n_side);
    out.push_back(omega_star);
    for (int k = 1; k <= spec.n_side; ++k) out.push_back(omega_star + spec.offset * k / spec.n_side);
    return out;
}

SpectrumPoint spectrum_point(const GroundStateFamily& family, const CriticalPoint& cp, double omega)
{
    SpectrumPoint p;
    p.omega = omega;
    const LinearizedOperators ops = assemble_operators(family, omega);
    const KernelBasis k = kernel_at(family, omega);
    const RadialGrid& g = family.grid();
    p.a = k.a;
    p.A = k.A;
    p.B = k.B;
    p.dq = family.dq(omega);
    p.chain = chain_residuals(ops, k);
    p.a_consistency = std::abs(k.a + p.dq / k.A) / std::max(std::abs(k.a), std::numeric_limits<double>::min());

    const Eigen::Matrix4d om = pairing_matrix(g, k);
    const double n1 = g.norm(k.psi(1)), n2 = g.norm(k.psi(2)), n3 = g.norm(k.psi(3)), n4 = g.norm(k.psi(4));
    p.pair12 = std::abs(om(0, 1) + p.dq) / std::max(std::abs(p.dq), 1e-4 * cp.d2q_star);
    p.pair13 = std::abs(om(0, 2)) / (n1 * n3);
    p.pair14 = std::abs(om(0, 3) + g.inner(k.dphi, k.eta)) / k.A;
    p.pair24 = std::abs(om(1, 3)) / (n2 * n4);
    p.quadratic_form = std::abs(g.inner(ops.apply_minus(k.eta), k.eta) - (k.A - k.a * k.B)) / k.A;

    EigenOptions eo;
    // stay below the continuous spectrum, which starts at +-i omega
    eo.radius = std::min(0.8 * omega, std::max(2.0 * std::sqrt(std::abs(k.a)), 1e-3));
    p.eigenvalues = small_eigenvalues(ops, k, eo);
    const std::complex<double> top = p.eigenvalues.back();
    p.lambda2_error = std::abs(top * top - k.a) / std::max(std::abs(k.a), std::numeric_limits<double>::min());
    return p;
}

json run_experiment(const ExperimentConfig& cfg_in, const fs::path& out_dir)
{
    if (cfg_in.kind.empty()) fail(ErrorCode::ConfigInvalid, "kind: missing");
    const auto t0 = std::chrono::steady_clock::now();
    const Context ctx = make_context(cfg_in);
    const ExperimentConfig& cfg = ctx.config;
    fs::create_directories(out_dir);
    write_json(out_dir / "resolved_config.json", to_json(cfg));

    json rep;
    rep["schema_version"] = kSchemaVersion;
    rep["kind"] = cfg.kind;
    rep["critical"] = critical_json(ctx.bundle.critical);
    rep["cache_key"] = ctx.bundle.key;
    rep["family_from_cache"] = ctx.bundle.from_cache;
    if (ctx.Q) {
        rep["Q"] = *ctx.Q;
        rep["epsilon"] = ctx.epsilon;
        rep["side"] = ctx.trapped ? "trapped" : "unstable";
        if (ctx.trapped) rep["well"] = well_json(potential_well(ctx.family(), *ctx.Q));
    }
    const GroundStateFamily& fam = ctx.family();
    const CriticalPoint& cp = ctx.bundle.critical;

    if (cfg.kind == "ground") {
        save_family(fam, out_dir / "family.json", cfg.binary_sidecar);
        CsvWriter w(out_dir / "family.csv", {"omega", "q", "dq", "d2q", "d", "energy", "residual"},
                    {{"omega_star", format_double(cp.omega_star)}, {"q_star", format_double(cp.q_star)}});
        double worst = 0.0;
        for (const auto& n : fam.nodes()) {
            w.row({n.omega, n.q, n.dq, n.d2q, fam.d(n.omega), n.energy, n.residual});
            worst = std::max(worst, std::abs(n.d - fam.d(n.omega)) / std::abs(n.d));
        }
        w.close();
        json kj = kernel_table_json(ctx.bundle.table);
        const KernelBasis ks = kernel_at(fam, cp.omega_star);
        kj["basis_at_omega_star"] = {{"omega", ks.omega}, {"A", ks.A}, {"B", ks.B}, {"a", ks.a}};
        if (cfg.binary_sidecar) {
            std::vector<double> flat(ks.eta.data(), ks.eta.data() + ks.eta.size());
            flat.insert(flat.end(), ks.zeta.data(), ks.zeta.data() + ks.zeta.size());
            write_doubles_le(out_dir / "kernels.bin", flat);
            kj["basis_at_omega_star"]["sidecar"] = {{"file", "kernels.bin"}, {"layout", "eta[r] then zeta[r], float64 little-endian"}};
        } else {
            kj["basis_at_omega_star"]["eta"] = std::vector<double>(ks.eta.data(), ks.eta.data() + ks.eta.size());
            kj["basis_at_omega_star"]["zeta"] = std::vector<double>(ks.zeta.data(), ks.zeta.data() + ks.zeta.size());
        }
        write_json(out_dir / "kernels.json", kj);
        rep["max_relative_d_mismatch"] = worst;
        if (ctx.Q && ctx.trapped) {
            const ReducedModel model = ctx.model(cfg.reduced.frozen_A);
            CsvWriter pw(out_dir / "potential.csv", {"omega", "V_Q"}, run_meta(ctx, 0.0, "potential"));
            const int m = 401;
            for (int i = 0; i < m; ++i) {
                const double om = model.window_lo() + (model.window_hi() - model.window_lo()) * i / (m - 1);
                pw.row({om, model.potential(om)});
            }
            pw.close();
        }
    } else if (cfg.kind == "spectrum") {
        CsvWriter w(out_dir / "spectrum.csv",
                    {"omega", "a", "A", "B", "dq", "eig_re", "eig_im", "lambda2_error", "chain_plus_zeta",
                     "chain_minus_eta", "a_consistency", "pair12", "pair14", "quadratic_form"},
                    {{"omega_star", format_double(cp.omega_star)}});
        double worst = 0.0;
        for (double om : spectrum_frequencies(cfg.spectrum, cp.omega_star)) {
            const SpectrumPoint p = spectrum_point(fam, cp, om);
            const auto top = p.eigenvalues.back();
            w.row({p.omega, p.a, p.A, p.B, p.dq, top.real(), std::abs(top.imag()), p.lambda2_error,
                   p.chain.plus_zeta, p.chain.minus_eta, p.a_consistency, p.pair12, p.pair14, p.quadratic_form});
            if (std::abs(om - cp.omega_star) > 1e-12) worst = std::max(worst, p.lambda2_error);
        }
        w.close();
        rep["max_lambda2_error"] = worst;
    } else if (cfg.kind == "reduced") {
        const ReducedModel model = ctx.model(cfg.reduced.frozen_A);
        double w0 = cfg.initial.omega0 ? *cfg.initial.omega0 : default_omega0(ctx);
        if (cfg.initial.energy_fraction) w0 = turning_point(model, *cfg.initial.energy_fraction);
        const double Th = model.harmonic_period();
        const double dt = cfg.reduced.dt ? *cfg.reduced.dt : Th / 2000.0;
        const ReducedTrajectory tr =
            integrate_reduced(model, w0, cfg.initial.lambda0, cfg.reduced.n_periods * Th, dt, cfg.reduced.c);
        write_trajectory(out_dir / "trajectory.csv", model, tr, ctx);
        rep["classification"] = to_string(tr.classification.kind);
        rep["degenerate"] = tr.classification.degenerate;
        rep["window_exit"] = tr.window_exit;
        rep["harmonic_period"] = Th;
        rep["c0"] = model.c0();
        double drift = 0.0;
        for (double E : tr.energy) drift = std::max(drift, std::abs(E - tr.energy.front()));
        rep["energy_drift"] = drift;
        try {
            const PeriodEstimate p = measure_period(tr);
            rep["period"] = p.period;
            rep["period_spread"] = p.spread;
        } catch (const Error&) {
            rep["period"] = nullptr;
        }
    } else if (cfg.kind == "evolve" || cfg.kind == "shadow") {
        const PdeRun run = run_pde(ctx);
        write_track(out_dir / "track.csv", run, ctx, cfg.evolve.dt);
        write_conserved(out_dir / "conserved.csv", run.evolution, cfg.evolve.dt);
        write_snapshot(out_dir / "snapshot_initial.csv", run.init.field, cfg.evolve.dt);
        write_snapshot(out_dir / "snapshot_final.csv", run.evolution.final_state, cfg.evolve.dt);
        std::vector<double> t, om, la;
        double sup_w = 0.0, sup_l = 0.0;
        for (const auto& s : run.track.samples) {
            t.push_back(s.t);
            om.push_back(s.omega);
            la.push_back(s.lambda);
            sup_w = std::max(sup_w, std::abs(s.omega - cp.omega_star));
            sup_l = std::max(sup_l, std::abs(s.lambda));
        }
        rep["omega0"] = run.omega0;
        rep["mu0"] = run.init.mu;
        rep["T"] = run.T;
        rep["interval"] = run.interval;
        rep["reference_period"] = run.period_ref;
        rep["steps"] = run.evolution.steps;
        rep["mass_drift"] = run.evolution.mass_drift;
        rep["energy_drift"] = run.evolution.energy_drift;
        rep["max_tail"] = run.max_tail;
        rep["lost_lock"] = run.track.lost_lock;
        rep["lost_lock_reason"] = run.track.reason;
        rep["samples"] = run.track.samples.size();
        rep["sup_omega_minus_omega_star"] = sup_w;
        rep["sup_lambda"] = sup_l;
        rep["runtime_seconds"] = run.seconds;
        if (ctx.trapped) {
            const ReducedModel model = ctx.model(cfg.reduced.frozen_A);
            rep["omega_plus_crossings"] = crossing_times(t, om, model.well().omega_plus).size();
            try {
                rep["period"] = period_from_crossings(upward_crossings(t, la, 0.0, 0.1 * run.period_ref)).period;
            } catch (const Error&) {
                rep["period"] = nullptr;
            }
            double drift = 0.0;
            for (double E : run.E_Q)
                if (std::isfinite(E)) drift = std::max(drift, std::abs(E - run.E_Q.front()));
            rep["E_Q_drift"] = drift;
            if (cfg.kind == "shadow") {
                const double t_max = cfg.reduced.n_periods * run.period_ref;
                const ReducedTrajectory red = reduced_on_track(model, run.track, t_max);
                write_trajectory(out_dir / "reduced.csv", model, red, ctx);
                const ShadowReport sr = shadow_compare(run.track, red, ctx.epsilon, t_max, &model, &ctx.bundle.table);
                json sj = {{"schema_version", kSchemaVersion},
                           {"D_omega", sr.D_omega},
                           {"D_lambda", sr.D_lambda},
                           {"n_periods", sr.n_periods},
                           {"epsilon", sr.epsilon},
                           {"t_max", sr.t_max},
                           {"systematic_budget", sr.systematic_budget}};
                write_json(out_dir / "shadow.json", sj);
                rep["shadow"] = sj;
            }
        }
    } else if (cfg.kind == "sweep") {
        const auto rows = period_sweep(ctx, cfg.sweep.epsilons, cfg.sweep.energy_fraction, cfg.reduced.frozen_A,
                                       cfg.reduced.n_periods, cfg.sweep.workers);
        CsvWriter w(out_dir / "periods.csv", {"epsilon", "Q", "period", "harmonic", "spread", "cycles", "drift_rate"},
                    {{"energy_fraction", format_double(cfg.sweep.energy_fraction)},
                     {"omega_star", format_double(cp.omega_star)}});
        std::vector<double> le, lt;
        for (const auto& r : rows) {
            w.row({r.epsilon, r.Q, r.period, r.harmonic, r.spread, static_cast<double>(r.cycles), r.drift_rate});
            le.push_back(std::log(r.epsilon));
            lt.push_back(std::log(r.period));
        }
        w.close();
        const LineFit f = fit_line(le, lt);
        rep["slope"] = f.slope;
        rep["intercept"] = f.intercept;
    } else {
        fail(ErrorCode::ConfigInvalid, "kind: unknown kind '" + cfg.kind + "'");
    }
    rep["runtime_seconds_total"] = seconds_since(t0);
    write_json(out_dir / "report.json", rep);
    return rep;
}

}  // namespace nlsosc
