#include "nlsosc/ground_family.hpp"

#include "nlsosc/error.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace nlsosc {

namespace {

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

Vec plus_potential(const Nonlinearity& nl, const Vec& u)
{
    Vec p(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double s = u[i] * u[i];
        p[i] = nl.g(s) + 2.0 * nl.dg(s) * s;
    }
    return p;
}

Vec minus_potential(const Nonlinearity& nl, const Vec& u)
{
    Vec p(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) p[i] = nl.g(u[i] * u[i]);
    return p;
}

enum class Shot { Under, Over };

struct ShotTrace {
    Shot kind = Shot::Under;
    std::vector<double> u;  // values at grid nodes reached before the event
};

// u'' = -2u'/r + omega u + g(u^2) u from the regular series at r = hs.
ShotTrace shoot(double p, double omega, const RadialGrid& grid, const Nonlinearity& nl, bool record)
{
    const double hs = 0.5 * grid.h();
    const int n = grid.size();
    auto rhs = [&](double r, const std::array<double, 2>& y) {
        return std::array<double, 2>{y[1], -2.0 * y[1] / r + (omega + nl.g(y[0] * y[0])) * y[0]};
    };
    const double c = (omega + nl.g(p * p)) * p / 6.0;
    double r = hs;
    std::array<double, 2> y{p + c * r * r, 2.0 * c * r};
    ShotTrace out;
    const int steps = 2 * n + 1;
    for (int k = 1; k <= steps; ++k) {
        const auto k1 = rhs(r, y);
        const auto k2 = rhs(r + 0.5 * hs, {y[0] + 0.5 * hs * k1[0], y[1] + 0.5 * hs * k1[1]});
        const auto k3 = rhs(r + 0.5 * hs, {y[0] + 0.5 * hs * k2[0], y[1] + 0.5 * hs * k2[1]});
        const auto k4 = rhs(r + hs, {y[0] + hs * k3[0], y[1] + hs * k3[1]});
        y[0] += hs / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        y[1] += hs / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        r = hs * (k + 1);
        if (y[0] < 0.0) {
            out.kind = Shot::Over;
            return out;
        }
        if (y[1] > 0.0) {
            out.kind = Shot::Under;
            return out;
        }
        if (record && k % 2 == 1) out.u.push_back(y[0]);
    }
    out.kind = Shot::Under;
    return out;
}

}  // namespace

double stationary_residual(const RadialGrid& grid, const Nonlinearity& nl, double omega, const Vec& u)
{
    const Vec lap = grid.laplacian(u);
    double worst = 0.0;
    for (int i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(-lap[i] + omega * u[i] + nl.g(u[i] * u[i]) * u[i]));
    return worst;
}

double mass(const RadialGrid& grid, const Vec& u) { return 0.5 * grid.inner(u, u); }
double mass(const RadialGrid& grid, const CVec& u) { return 0.5 * grid.inner(u, u); }

double energy(const RadialGrid& grid, const Nonlinearity& nl, const Vec& u)
{
    double pot = 0.0;
    for (int i = 0; i < grid.size(); ++i) pot += grid.weights()[i] * nl.G(u[i] * u[i]);
    return 0.5 * grid.dirichlet(u) + 0.5 * pot;
}

double energy(const RadialGrid& grid, const Nonlinearity& nl, const CVec& u)
{
    double pot = 0.0;
    for (int i = 0; i < grid.size(); ++i) pot += grid.weights()[i] * nl.G(std::norm(u[i]));
    return 0.5 * grid.dirichlet(u) + 0.5 * pot;
}

RadialProfile shoot_ground_state(double omega, const RadialGrid& grid, const Nonlinearity& nl)
{
    if (!(omega > 0.0)) fail(ErrorCode::NoGroundState, "omega must be positive, got " + num(omega));
    double hi = 1.0;
    while (shoot(hi, omega, grid, nl, false).kind == Shot::Under) {
        hi *= 2.0;
        if (hi > 1e4) fail(ErrorCode::NoGroundState, "no overshooting amplitude at omega = " + num(omega));
    }
    double lo = hi;
    do {
        lo *= 0.5;
        if (lo < 1e-8) fail(ErrorCode::NoGroundState, "no undershooting amplitude at omega = " + num(omega));
    } while (shoot(lo, omega, grid, nl, false).kind == Shot::Over);

    for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (shoot(mid, omega, grid, nl, false).kind == Shot::Over ? hi : lo) = mid;
    }

    const ShotTrace trace = shoot(lo, omega, grid, nl, true);
    const int n = grid.size();
    RadialProfile prof;
    prof.omega = omega;
    prof.u.resize(n);
    int splice = 0;
    while (splice < static_cast<int>(trace.u.size()) && trace.u[splice] > 1e-6 * lo) ++splice;
    splice = std::max(splice, 1);
    for (int i = 0; i < splice; ++i) prof.u[i] = trace.u[i];
    const double kappa = std::sqrt(omega);
    const double rc = grid.r()[splice - 1];
    const double uc = prof.u[splice - 1];
    for (int i = splice; i < n; ++i) {
        const double r = grid.r()[i];
        prof.u[i] = uc * rc / r * std::exp(-kappa * (r - rc));
    }
    prof.residual = stationary_residual(grid, nl, omega, prof.u);
    return prof;
}

RadialProfile solve_ground_state(double omega, const RadialGrid& grid, const Nonlinearity& nl,
                                 const GroundStateOptions& opts, const Vec* seed)
{
    if (!(omega > 0.0)) fail(ErrorCode::NoGroundState, "omega must be positive, got " + num(omega));
    Vec u = seed ? *seed : shoot_ground_state(omega, grid, nl).u;
    if (u.size() != grid.size()) fail(ErrorCode::ConfigInvalid, "seed profile does not match the grid");
    const Vec& r = grid.r();
    Vec v = r.cwiseProduct(u);

    double last_step = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < opts.max_newton; ++it) {
        u = v.cwiseQuotient(r);
        const SymTridiag jac = schrodinger_v(grid, omega, plus_potential(nl, u));
        const Vec F = schrodinger_v(grid, omega, minus_potential(nl, u)).apply(v);
        const Vec delta = jac.solve(F);
        v -= delta;
        const double step = delta.cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff();
        if (step < 1e-13 || (it > 3 && step > 0.5 * last_step)) {
            ++it;
            break;
        }
        last_step = step;
    }
    u = v.cwiseQuotient(r);

    RadialProfile prof;
    prof.omega = omega;
    prof.newton_iterations = it;
    const double peak = u.cwiseAbs().maxCoeff();
    if (!(peak > 1e-8)) fail(ErrorCode::NoGroundState, "Newton collapsed to the trivial state at omega = " + num(omega));
    prof.residual = stationary_residual(grid, nl, omega, u);
    if (!(prof.residual <= opts.tol * peak))
        fail(ErrorCode::NotConverged,
             "ground state residual " + num(prof.residual) + " at omega = " + num(omega));
    for (int i = 0; i < grid.size(); ++i) {
        if (u[i] < -1e-12 * peak)
            fail(ErrorCode::NodalSolution, "profile changes sign at r = " + num(r[i]) + ", omega = " + num(omega));
        if (i > 0 && u[i] > u[i - 1] + 1e-12 * peak)
            fail(ErrorCode::NodalSolution, "profile not radially decreasing at r = " + num(r[i]));
    }
    if (u[0] < peak) fail(ErrorCode::NodalSolution, "peak away from the origin");
    const int tail = static_cast<int>(0.9 * grid.size());
    if (u[tail] > opts.tail_floor * peak)
        fail(ErrorCode::DomainTooSmall, "profile at r = " + num(r[tail]) + " is " + num(u[tail] / peak) +
                                            " of the peak (floor " + num(opts.tail_floor) + ")");
    prof.u = std::move(u);
    return prof;
}

FamilyNode make_family_node(const RadialGrid& grid, const Nonlinearity& nl, const RadialProfile& profile)
{
    const Vec& r = grid.r();
    const Vec& u = profile.u;
    const double omega = profile.omega;
    const SymTridiag lplus = schrodinger_v(grid, omega, plus_potential(nl, u));

    FamilyNode node;
    node.omega = omega;
    node.residual = profile.residual;
    node.phi = u;
    node.dphi = -lplus.solve(r.cwiseProduct(u)).cwiseQuotient(r);

    Vec rhs(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double s = u[i] * u[i];
        const double dp = node.dphi[i];
        rhs[i] = -2.0 * dp - 2.0 * (3.0 * nl.dg(s) + 2.0 * nl.d2g(s) * s) * u[i] * dp * dp;
    }
    const Vec d2phi = lplus.solve(r.cwiseProduct(rhs)).cwiseQuotient(r);

    node.q = mass(grid, u);
    node.dq = grid.inner(u, node.dphi);
    node.d2q = grid.inner(node.dphi, node.dphi) + grid.inner(u, d2phi);
    node.energy = energy(grid, nl, u);
    node.d = node.energy + omega * node.q;
    return node;
}

GroundStateFamily::GroundStateFamily(RadialGrid grid, Nonlinearity nl, std::vector<FamilyNode> nodes,
                                     GroundStateOptions opts)
    : grid_(std::move(grid)), nl_(std::move(nl)), nodes_(std::move(nodes)), opts_(opts)
{
    if (nodes_.size() < 9) fail(ErrorCode::InsufficientPoints, "a family needs at least 9 frequencies");
    std::vector<double> x, f, df, d2f;
    q_ref_ = nodes_.front().q;
    for (const auto& nd : nodes_) q_ref_ = std::min(q_ref_, nd.q);
    for (const auto& nd : nodes_) {
        x.push_back(nd.omega);
        f.push_back(nd.q - q_ref_);
        df.push_back(nd.dq);
        d2f.push_back(nd.d2q);
    }
    q_shift_ = QuinticHermite(x, f, df, d2f);
    anchor_ = nodes_.size() / 2;
}

double GroundStateFamily::d(double omega) const
{
    const FamilyNode& a = nodes_[anchor_];
    return a.d + q_shift_.integral(a.omega, omega) + q_ref_ * (omega - a.omega);
}

double GroundStateFamily::q_minus_Q_integral(double a, double b, double Q) const
{
    return q_shift_.integral(a, b) - (Q - q_ref_) * (b - a);
}

std::size_t GroundStateFamily::nearest(double omega) const
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (std::abs(nodes_[i].omega - omega) < std::abs(nodes_[best].omega - omega)) best = i;
    return best;
}

RadialProfile GroundStateFamily::profile_at(double omega) const
{
    if (!contains(omega)) fail(ErrorCode::OutOfRange, "omega = " + num(omega) + " outside the family range");
    const FamilyNode& nd = nodes_[nearest(omega)];
    if (nd.omega == omega) return {omega, nd.phi, nd.residual, 0};
    const Vec seed = nd.phi + (omega - nd.omega) * nd.dphi;
    return solve_ground_state(omega, grid_, nl_, opts_, &seed);
}

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return out;
}

GroundStateFamily build_family(const RadialGrid& grid, const Nonlinearity& nl, const std::vector<double>& omegas,
                               const GroundStateOptions& opts)
{
    if (omegas.size() < 9) fail(ErrorCode::InsufficientPoints, "a family needs at least 9 frequencies");
    for (std::size_t i = 1; i < omegas.size(); ++i)
        if (!(omegas[i] > omegas[i - 1])) fail(ErrorCode::NonMonotoneGrid, "frequencies must strictly increase");

    std::vector<FamilyNode> nodes;
    nodes.reserve(omegas.size());
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        RadialProfile prof;
        if (i == 0) {
            prof = solve_ground_state(omegas[i], grid, nl, opts);
        } else {
            const FamilyNode& prev = nodes.back();
            const Vec seed = prev.phi + (omegas[i] - prev.omega) * prev.dphi;
            try {
                prof = solve_ground_state(omegas[i], grid, nl, opts, &seed);
            } catch (const Error&) {
                prof = solve_ground_state(omegas[i], grid, nl, opts);
            }
        }
        nodes.push_back(make_family_node(grid, nl, prof));
    }
    return GroundStateFamily(grid, nl, std::move(nodes), opts);
}

CriticalPoint find_critical_frequency(const GroundStateFamily& family)
{
    const auto& nodes = family.nodes();
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (!(nodes[i].dq < 0.0 && nodes[i + 1].dq >= 0.0)) continue;
        auto f = [&](double w) { return family.dq(w); };
        boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 3);
        std::uintmax_t iters = 200;
        const auto [a, b] = boost::math::tools::toms748_solve(f, nodes[i].omega, nodes[i + 1].omega, nodes[i].dq,
                                                              nodes[i + 1].dq, tol, iters);
        CriticalPoint cp;
        cp.omega_star = 0.5 * (a + b);
        cp.q_star = family.q(cp.omega_star);
        cp.d2q_star = family.d2q(cp.omega_star);
        return cp;
    }
    fail(ErrorCode::NoCriticalPoint, "q'(omega) has no sign change from - to + on the family range");
}

WellGeometry potential_well(const GroundStateFamily& family, double Q)
{
    const CriticalPoint cp = find_critical_frequency(family);
    const double eps2 = Q - cp.q_star;
    if (!(eps2 > 0.0)) fail(ErrorCode::NoWell, "Q = " + num(Q) + " does not exceed q(omega*) = " + num(cp.q_star));

    boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 3);
    auto root = [&](auto&& f, double a, double b) {
        const double fa = f(a), fb = f(b);
        if (fa * fb > 0.0) fail(ErrorCode::OutOfRange, "well root leaves the family range for Q = " + num(Q));
        std::uintmax_t iters = 200;
        const auto [x0, x1] = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
        return 0.5 * (x0 + x1);
    };
    auto dq = [&](double w) { return family.q(w) - Q; };

    WellGeometry wg;
    wg.Q = Q;
    wg.epsilon = std::sqrt(eps2);
    wg.omega_minus = root(dq, family.omega_min(), cp.omega_star);
    wg.omega_plus = root(dq, cp.omega_star, family.omega_max());
    wg.barrier = -family.q_minus_Q_integral(wg.omega_minus, wg.omega_plus, Q);
    auto level = [&](double w) { return family.q_minus_Q_integral(wg.omega_minus, w, Q); };
    wg.omega_plusplus = root(level, wg.omega_plus, family.omega_max());
    return wg;
}

double evaluate_VQ(const GroundStateFamily& family, double omega, double Q) { return family.d(omega) - omega * Q; }

}  // namespace nlsosc
