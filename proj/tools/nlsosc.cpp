#include "nlsosc/acceptance.hpp"
#include "nlsosc/error.hpp"
#include "nlsosc/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int exit_code(const nlsosc::Error& e)
{
    return e.code() == nlsosc::ErrorCode::ConfigInvalid ? kExitConfig : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Near-critical ground-state oscillations of the radial NLS"};
    app.require_subcommand(1);
    std::string config;
    std::string out;
    std::vector<int> only;

    std::vector<CLI::App*> kinds;
    for (const auto& k : nlsosc::experiment_kinds()) {
        auto* sub = app.add_subcommand(k, "run the '" + k + "' experiment");
        sub->add_option("--config", config, "experiment config (JSON)")->required();
        sub->add_option("--out", out, "output directory (default out/<kind>)");
        kinds.push_back(sub);
    }
    auto* acc = app.add_subcommand("acceptance", "run the acceptance criteria");
    acc->add_option("--config", config, "directory holding criterion_01.json .. criterion_10.json")->required();
    acc->add_option("--out", out, "directory for acceptance_report.json (default out/acceptance)");
    acc->add_option("--only", only, "criterion ids to run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (acc->parsed()) {
            const fs::path out_dir = out.empty() ? fs::path("out/acceptance") : fs::path(out);
            fs::create_directories(out_dir);
            const auto results = nlsosc::acceptance_suite(config, out_dir, only);
            bool failed = false, config_error = false;
            for (const auto& r : results) {
                std::cout << nlsosc::format_result_line(r) << std::endl;
                failed |= r.verdict == nlsosc::Verdict::Fail && !r.known_failure;
                config_error |= r.verdict == nlsosc::Verdict::ConfigError;
            }
            if (config_error) return kExitConfig;
            return failed ? kExitNumerical : kExitOk;
        }
        for (auto* sub : kinds) {
            if (!sub->parsed()) continue;
            nlsosc::ExperimentConfig cfg = nlsosc::load_config(config);
            if (!cfg.kind.empty() && cfg.kind != sub->get_name())
                throw nlsosc::Error(nlsosc::ErrorCode::ConfigInvalid,
                                    "kind: config is for '" + cfg.kind + "', not '" + sub->get_name() + "'");
            cfg.kind = sub->get_name();
            const fs::path out_dir = out.empty() ? fs::path("out") / cfg.kind : fs::path(out);
            const auto report = nlsosc::run_experiment(cfg, out_dir);
            std::cout << report.dump(2) << std::endl;
        }
    } catch (const nlsosc::Error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitNumerical;
    }
    return kExitOk;
}
