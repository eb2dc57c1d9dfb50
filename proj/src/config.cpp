#include "nlsosc/config.hpp"

#include "nlsosc/error.hpp"
#include "nlsosc/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace nlsosc {

using nlohmann::json;

namespace {

// Reads the keys of one JSON object and rejects anything it did not consume.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) fail(ErrorCode::ConfigInvalid, where() + ": expected an object");
    }

    template <class T>
    void get(const char* key, T& out)
    {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception& e) {
            fail(ErrorCode::ConfigInvalid, field(key) + ": " + e.what());
        }
    }

    template <class T>
    void get(const char* key, std::optional<T>& out)
    {
        seen_.insert(key);
        if (!j_.contains(key) || j_.at(key).is_null()) return;
        T v{};
        get(key, v);
        out = v;
    }

    bool has(const char* key) const { return j_.contains(key); }
    const json& sub(const char* key)
    {
        seen_.insert(key);
        return j_.at(key);
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (seen_.count(it.key())) continue;
            std::string msg = field(it.key()) + ": unknown key";
            std::string lower = it.key();
            std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
            if (lower.find("tol") != std::string::npos)
                msg += " (tolerances are fixed in code and cannot be configured)";
            fail(ErrorCode::ConfigInvalid, msg);
        }
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    std::string where() const { return path_.empty() ? "<root>" : path_; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& what)
{
    if (!ok) fail(ErrorCode::ConfigInvalid, field + ": " + what);
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

const std::vector<std::string>& experiment_kinds()
{
    static const std::vector<std::string> kinds{"ground", "spectrum", "reduced", "evolve", "shadow", "sweep"};
    return kinds;
}

ExperimentConfig parse_config(const json& j)
{
    ExperimentConfig c;
    Section root(j, "");
    root.get("schema_version", c.schema_version);
    require(root.has("schema_version"), "schema_version", "missing");
    require(c.schema_version == kSchemaVersion, "schema_version",
            "unsupported version " + std::to_string(c.schema_version));
    root.get("kind", c.kind);
    if (!c.kind.empty())
        require(std::find(experiment_kinds().begin(), experiment_kinds().end(), c.kind) != experiment_kinds().end(),
                "kind", "unknown kind '" + c.kind + "'");
    root.get("Q", c.Q);
    root.get("epsilon", c.epsilon);
    root.get("side", c.side);
    root.get("binary_sidecar", c.binary_sidecar);
    require(c.side == "trapped" || c.side == "unstable", "side", "must be 'trapped' or 'unstable'");
    if (c.Q) require(finite_positive(*c.Q), "Q", "must be positive");
    if (c.epsilon) require(finite_positive(*c.epsilon), "epsilon", "must be positive");
    require(!(c.Q && c.epsilon), "Q", "give either Q or epsilon, not both");

    if (root.has("family")) {
        Section s(root.sub("family"), "family");
        auto& f = c.family;
        s.get("nonlinearity", f.nonlinearity);
        s.get("r_max", f.r_max);
        s.get("n_points", f.n_points);
        s.get("omega_lo", f.omega_lo);
        s.get("omega_hi", f.omega_hi);
        s.get("n_omega", f.n_omega);
        s.get("kernel_halfwidth", f.kernel_halfwidth);
        s.get("n_kernel", f.n_kernel);
        s.finish();
        const auto& labels = Nonlinearity::labels();
        require(std::find(labels.begin(), labels.end(), f.nonlinearity) != labels.end(), "family.nonlinearity",
                "unknown label '" + f.nonlinearity + "'");
        require(finite_positive(f.r_max), "family.r_max", "must be positive");
        require(f.n_points >= 16, "family.n_points", "must be at least 16");
        require(finite_positive(f.omega_lo) && f.omega_hi > f.omega_lo, "family.omega_hi", "need 0 < omega_lo < omega_hi");
        require(f.n_omega >= 9, "family.n_omega", "must be at least 9");
        require(finite_positive(f.kernel_halfwidth), "family.kernel_halfwidth", "must be positive");
        require(f.n_kernel >= 5, "family.n_kernel", "must be at least 5");
    }
    if (root.has("initial")) {
        Section s(root.sub("initial"), "initial");
        s.get("omega0", c.initial.omega0);
        s.get("lambda0", c.initial.lambda0);
        s.get("theta0", c.initial.theta0);
        s.get("energy_fraction", c.initial.energy_fraction);
        s.finish();
        if (c.initial.energy_fraction)
            require(*c.initial.energy_fraction > 0.0 && *c.initial.energy_fraction < 1.0, "initial.energy_fraction",
                    "must lie in (0, 1)");
    }
    if (root.has("perturbation")) {
        Section s(root.sub("perturbation"), "perturbation");
        auto& p = c.perturbation;
        s.get("profile", p.profile);
        s.get("amplitude", p.amplitude);
        s.get("width", p.width);
        s.get("seed", p.seed);
        s.finish();
        require(p.profile == "none" || p.profile == "gaussian" || p.profile == "random", "perturbation.profile",
                "must be none, gaussian or random");
        require(std::isfinite(p.amplitude) && p.amplitude >= 0.0, "perturbation.amplitude", "must be >= 0");
        require(finite_positive(p.width), "perturbation.width", "must be positive");
    }
    if (root.has("evolve")) {
        Section s(root.sub("evolve"), "evolve");
        auto& e = c.evolve;
        s.get("dt", e.dt);
        s.get("T", e.T);
        s.get("n_periods", e.n_periods);
        s.get("samples_per_period", e.samples_per_period);
        s.get("sponge", e.sponge);
        s.get("sponge_start", e.sponge_start);
        s.get("sponge_strength", e.sponge_strength);
        s.get("order", e.order);
        s.finish();
        require(finite_positive(e.dt), "evolve.dt", "must be positive");
        if (e.T) require(finite_positive(*e.T), "evolve.T", "must be positive");
        require(finite_positive(e.n_periods), "evolve.n_periods", "must be positive");
        require(e.samples_per_period >= 8, "evolve.samples_per_period", "must be at least 8");
        require(e.sponge_start > 0.0 && e.sponge_start < 1.0, "evolve.sponge_start", "must lie in (0, 1)");
        require(e.sponge_strength >= 0.0, "evolve.sponge_strength", "must be >= 0");
        require(e.order == 2 || e.order == 4, "evolve.order", "must be 2 or 4");
    }
    if (root.has("reduced")) {
        Section s(root.sub("reduced"), "reduced");
        auto& r = c.reduced;
        s.get("dt", r.dt);
        s.get("n_periods", r.n_periods);
        s.get("frozen_A", r.frozen_A);
        s.get("c", r.c);
        s.finish();
        if (r.dt) require(finite_positive(*r.dt), "reduced.dt", "must be positive");
        require(finite_positive(r.n_periods), "reduced.n_periods", "must be positive");
        require(r.c > 0.0 && r.c < 1.0, "reduced.c", "must lie in (0, 1)");
    }
    if (root.has("sweep")) {
        Section s(root.sub("sweep"), "sweep");
        auto& w = c.sweep;
        s.get("epsilons", w.epsilons);
        s.get("energy_fraction", w.energy_fraction);
        s.get("workers", w.workers);
        s.finish();
        require(w.epsilons.size() >= 2, "sweep.epsilons", "need at least two amplitudes");
        for (double e : w.epsilons) require(finite_positive(e), "sweep.epsilons", "must be positive");
        require(w.energy_fraction > 0.0 && w.energy_fraction < 1.0, "sweep.energy_fraction", "must lie in (0, 1)");
        require(w.workers >= 1, "sweep.workers", "must be at least 1");
    }
    if (root.has("spectrum")) {
        Section s(root.sub("spectrum"), "spectrum");
        auto& p = c.spectrum;
        s.get("omegas", p.omegas);
        s.get("n_side", p.n_side);
        s.get("offset", p.offset);
        s.finish();
        require(p.n_side >= 1, "spectrum.n_side", "must be at least 1");
        require(finite_positive(p.offset), "spectrum.offset", "must be positive");
    }
    root.finish();
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ConfigInvalid, "cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigInvalid, path + ": " + e.what());
    }
    return parse_config(j);
}

json to_json(const ExperimentConfig& c)
{
    auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
    json j;
    j["schema_version"] = c.schema_version;
    j["kind"] = c.kind;
    j["Q"] = opt(c.Q);
    j["epsilon"] = opt(c.epsilon);
    j["side"] = c.side;
    j["binary_sidecar"] = c.binary_sidecar;
    const auto& f = c.family;
    j["family"] = {{"nonlinearity", f.nonlinearity}, {"r_max", f.r_max},         {"n_points", f.n_points},
                   {"omega_lo", f.omega_lo},         {"omega_hi", f.omega_hi},   {"n_omega", f.n_omega},
                   {"kernel_halfwidth", f.kernel_halfwidth}, {"n_kernel", f.n_kernel}};
    j["initial"] = {{"omega0", opt(c.initial.omega0)},
                    {"lambda0", c.initial.lambda0},
                    {"theta0", c.initial.theta0},
                    {"energy_fraction", opt(c.initial.energy_fraction)}};
    const auto& p = c.perturbation;
    j["perturbation"] = {{"profile", p.profile}, {"amplitude", p.amplitude}, {"width", p.width}, {"seed", p.seed}};
    const auto& e = c.evolve;
    j["evolve"] = {{"dt", e.dt},
                   {"T", opt(e.T)},
                   {"n_periods", e.n_periods},
                   {"samples_per_period", e.samples_per_period},
                   {"sponge", e.sponge},
                   {"sponge_start", e.sponge_start},
                   {"sponge_strength", e.sponge_strength},
                   {"order", e.order}};
    const auto& r = c.reduced;
    j["reduced"] = {{"dt", opt(r.dt)}, {"n_periods", r.n_periods}, {"frozen_A", r.frozen_A}, {"c", r.c}};
    j["sweep"] = {{"epsilons", c.sweep.epsilons},
                  {"energy_fraction", c.sweep.energy_fraction},
                  {"workers", c.sweep.workers}};
    j["spectrum"] = {{"omegas", c.spectrum.omegas}, {"n_side", c.spectrum.n_side}, {"offset", c.spectrum.offset}};
    return j;
}

}  // namespace nlsosc
