#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nlsosc {

inline constexpr int kSchemaVersion = 1;

struct FamilySpec {
    std::string nonlinearity = "saturated";
    double r_max = 100.0;
    int n_points = 4096;
    double omega_lo = 0.04;
    double omega_hi = 0.062;
    int n_omega = 41;
    double kernel_halfwidth = 0.008;  // kernel table spans omega* +- this
    int n_kernel = 17;
};

struct PerturbationSpec {
    std::string profile = "gaussian";  // none | gaussian | random
    double amplitude = 0.5;            // |r0|_H1 = amplitude * eps^{3/2}
    double width = 10.0;
    std::uint64_t seed = 1;
};

struct InitialSpec {
    std::optional<double> omega0;     // default omega_+ - eps sqrt(2/q'')
    double lambda0 = 0.0;
    double theta0 = 0.0;
    std::optional<double> energy_fraction;  // reduced runs: start at E_Q = fraction * barrier, lambda = 0
};

struct EvolveSpec {
    double dt = 0.02;
    std::optional<double> T;
    double n_periods = 3.2;  // in units of the reduced period when T is absent
    int samples_per_period = 100;
    bool sponge = false;
    double sponge_start = 0.8;
    double sponge_strength = 0.05;
    int order = 4;  // 2: Strang, 4: composition of Strang steps
};

struct ReducedSpec {
    std::optional<double> dt;
    double n_periods = 4.0;
    bool frozen_A = true;
    double c = 0.9;
};

struct SweepSpec {
    std::vector<double> epsilons{0.02, 0.03, 0.045, 0.067, 0.1};
    double energy_fraction = 0.3;
    int workers = 1;
};

struct SpectrumSpec {
    std::vector<double> omegas;  // empty: n_side points on each side of omega*
    int n_side = 5;
    double offset = 0.006;       // outermost |omega - omega*|
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    std::string kind;
    FamilySpec family;
    std::optional<double> Q;
    std::optional<double> epsilon;
    std::string side = "trapped";  // trapped: Q = q* + eps^2, unstable: Q = q* - eps^2
    InitialSpec initial;
    PerturbationSpec perturbation;
    EvolveSpec evolve;
    ReducedSpec reduced;
    SweepSpec sweep;
    SpectrumSpec spectrum;
    bool binary_sidecar = false;
};

const std::vector<std::string>& experiment_kinds();

// Throws ConfigInvalid naming the offending field path.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

}  // namespace nlsosc
