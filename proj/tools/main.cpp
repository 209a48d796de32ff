// coneflow: config-driven verification and decay experiments on rotationally
// symmetric model manifolds. See README.md for the config format and the CSV
// schemas.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "coneflow/runner.hpp"

namespace {

int report_and_exit_code(const coneflow::SuiteReport& report) {
    for (const auto& c : report.checks)
        std::printf("%-36s %-10s measured=%-24.17g threshold=%.17g\n", c.name.c_str(),
                    coneflow::to_string(c.status).c_str(), c.measured, c.threshold);
    std::printf("%d check(s), %d failure(s); outputs in %s\n",
                static_cast<int>(report.checks.size()), report.failures(),
                report.out_dir.c_str());
    return report.all_passed() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"canonical-identification experiments on warped-product models"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "execute the suites described by a config file");
    std::string config_path;
    std::string out_dir;
    run_cmd->add_option("--config", config_path, "path to the run config")->required();
    run_cmd->add_option("--out", out_dir, "output directory (overrides config and CONEFLOW_OUT)");

    auto* verify_cmd =
        app.add_subcommand("verify", "run the identity suite with defaults for one profile");
    std::string profile = "euclid";
    int n = 4;
    double alpha = 0.5;
    double a = 1.0;
    verify_cmd->add_option("--profile", profile, "euclid, cone, or smoothed_cone")->required();
    verify_cmd->add_option("--n", n, "dimension (>= 3)");
    verify_cmd->add_option("--alpha", alpha, "asymptotic slope in (0, 1]");
    verify_cmd->add_option("--a", a, "smoothing scale (> 0)");
    verify_cmd->add_option("--out", out_dir, "output directory");

    auto* list_cmd = app.add_subcommand("list-profiles", "print the profile catalog");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list_cmd->parsed()) {
            std::puts("euclid          phi(r) = r                                (n >= 3)");
            std::puts("cone            phi(r) = alpha*r                          (alpha in (0,1])");
            std::puts("smoothed_cone   phi(r) = alpha*r + (1-alpha)*a*tanh(r/a)  (alpha in (0,1], a > 0)");
            return 0;
        }

        if (run_cmd->parsed()) {
            const coneflow::RunConfig cfg = coneflow::parse_config(config_path);
            return report_and_exit_code(coneflow::run(cfg, out_dir));
        }

        // verify
        coneflow::RunConfig cfg;
        if (profile == "euclid")
            cfg.profile = coneflow::ProfileKind::euclid;
        else if (profile == "cone")
            cfg.profile = coneflow::ProfileKind::cone;
        else if (profile == "smoothed_cone")
            cfg.profile = coneflow::ProfileKind::smoothed_cone;
        else
            throw coneflow::ValidationError("unknown profile '" + profile + "'");
        cfg.n = n;
        cfg.alpha = (cfg.profile == coneflow::ProfileKind::euclid) ? 1.0 : alpha;
        cfg.a = a;
        cfg.r_grid = coneflow::parse_grid("log:0.1:1000:50");
        cfg.t_grid = coneflow::parse_grid("log:1:16:5");
        cfg.suite_identities = true;
        cfg.suite_flow = false;
        cfg.suite_monotone = false;
        cfg.suite_decay = false;
        cfg.manifold(); // validate before running
        return report_and_exit_code(coneflow::run(cfg, out_dir));
    } catch (const coneflow::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
