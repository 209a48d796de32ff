// Acceptance suite: eight end-to-end criteria, one pass/fail line each.
// Usage: acceptance_tests [path-to-coneflow-cli]   (the CLI path is needed by
// the determinism/exit-status criterion).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "coneflow/monotone.hpp"
#include "coneflow/runner.hpp"

using namespace coneflow;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    if (!pass)
        ++g_failures;
}

std::vector<double> log_grid(double lo, double hi, int count) {
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i)
        g[i] = lo * std::pow(hi / lo, double(i) / (count - 1));
    return g;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// 1. Euclidean exactness on n in {3, 4, 6}.
void criterion_euclid() {
    double worst = 0.0;
    OdeSpec ode;
    ode.rel_tol = ode.abs_tol = 1e-13;
    for (int n : {3, 4, 6}) {
        const GreenModel model = build_green(make_profile(ProfileKind::euclid, n));
        for (double r : log_grid(0.1, 100.0, 15)) {
            worst = std::max(worst, std::abs(model.green(r) * std::pow(r, n - 2) - 1.0));
            worst = std::max(worst, std::abs(model.b(r) - r));
            const FlowLine line = flow_line(model, r, 0.5, ode);
            worst = std::max(worst, std::abs(line.radius(0.5) - std::exp(1.0) * r));
        }
        for (double r0 : {0.5, 5.0, 50.0})
            worst = std::max(worst, sup_log_ratio(model, r0, 1.0, 5.0, ode));
    }
    report(1, "euclidean exactness", worst <= 1e-9, "max deviation " + fmt(worst) + " vs 1e-9");
}

// 2. Cone fixed point (n = 3, alpha = 0.5).
void criterion_cone() {
    const GreenModel model = build_green(make_profile(ProfileKind::cone, 3, 0.5));
    const auto routes = b_infinity(model);
    double worst_binf = std::max(std::abs(routes.via_volume - 0.25),
                                 std::abs(routes.via_gradient - 0.25));

    double worst_msy = 0.0, worst_small = 0.0;
    for (double r : log_grid(0.1, 100.0, 20)) {
        worst_msy = std::max(worst_msy, std::abs(model.green(r) * r - 4.0));
        worst_small = std::max(worst_small, hessian_eigen_b2(model, r).tracefree_norm_sq);
    }
    worst_small = std::max(worst_small, hess_weighted_integral(model, model.b(1.0)));
    const double t_grid[] = {1.0, 2.0, 4.0, 8.0, 16.0};
    const DecayReport table = log_ratio_decay_table(model, model.b(1.0), t_grid, 64.0);
    for (const auto& s : table.samples)
        worst_small = std::max(worst_small, s[1]);

    const bool pass = worst_binf <= 1e-8 && worst_msy <= 1e-8 && worst_small <= 1e-9;
    report(2, "cone fixed point", pass,
           "b_inf dev " + fmt(worst_binf) + " vs 1e-8, msy dev " + fmt(worst_msy) +
               " vs 1e-8, residuals " + fmt(worst_small) + " vs 1e-9");
}

// 3. Identity suite on the smoothed cone (n = 4, alpha = 0.5, a = 1).
void criterion_identities() {
    const GreenModel model = build_green(make_profile(ProfileKind::smoothed_cone, 4, 0.5, 1.0));
    const auto grid = log_grid(0.1, 1000.0, 50);
    const IdentityReport identities = identity_residuals(model, grid);

    double worst_transport = 0.0;
    for (double r0 : grid) {
        const TransportResiduals res = check_transport(model, r0, 1.0);
        worst_transport = std::max({worst_transport, res.b_transport, res.volume_form});
    }
    const bool pass = identities.max_laplace <= 1e-8 && identities.max_flux <= 1e-10 &&
                      worst_transport <= 1e-7;
    report(3, "identity suite", pass,
           "laplace " + fmt(identities.max_laplace) + " vs 1e-8, flux " +
               fmt(identities.max_flux) + " vs 1e-10, transport " + fmt(worst_transport) +
               " vs 1e-7");
}

// 4. Second-order convergence of the derivative-formula residuals.
void criterion_gprime() {
    const GreenModel model = build_green(make_profile(ProfileKind::smoothed_cone, 4, 0.5, 1.0));
    double worst_low = 1e300, worst_high = 0.0;
    GprimeResiduals prev{};
    bool first = true;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
        const GprimeResiduals res = check_gprime(model, 1.0, 1.0, h);
        if (!first) {
            for (double ratio : {prev.radial / res.radial, prev.spherical / res.spherical}) {
                worst_low = std::min(worst_low, ratio);
                worst_high = std::max(worst_high, ratio);
            }
        }
        prev = res;
        first = false;
    }
    const bool pass = worst_low >= 3.5 && worst_high <= 4.5;
    report(4, "derivative-formula convergence", pass,
           "halving ratios in [" + fmt(worst_low) + ", " + fmt(worst_high) + "] vs 4 +- 0.5");
}

// 5. Monotonicity suite on the smoothed cone.
void criterion_monotone() {
    const GreenModel model = build_green(make_profile(ProfileKind::smoothed_cone, 4, 0.5, 1.0));
    const auto& m = model.manifold();

    double worst_A = 0.0, band = 1.0;
    double prev_A = 1e300;
    for (double r : log_grid(1.0, 1000.0, 20)) {
        const double level = model.b(r);
        const AreaA aa = area_and_A(model, level);
        worst_A = std::max(worst_A, aa.A - prev_A);
        prev_A = aa.A;
        const double normalized = aa.area / (m.unit_sphere_area * std::pow(level, m.n - 1));
        band = std::max({band, normalized, 1.0 / normalized});
    }

    double worst_H = 0.0, prev_H = 1e300;
    for (double r : log_grid(0.5, 8.0, 20)) {
        const double H = hess_weighted_integral(model, model.b(r));
        worst_H = std::max(worst_H, H - prev_H);
        prev_H = H;
    }

    double worst_vol = 0.0, prev_vol = 2.0;
    for (double r : log_grid(0.1, 1000.0, 20)) {
        const double ratio = volume_ratio(m, r);
        worst_vol = std::max(worst_vol, ratio - prev_vol);
        prev_vol = ratio;
    }

    const bool pass = worst_A <= 1e-9 && worst_H <= 0.0 && worst_vol <= 1e-10 && band <= 10.0;
    report(5, "monotonicity suite", pass,
           "A violation " + fmt(worst_A) + " vs 1e-9, H violation " + fmt(worst_H) +
               ", volume violation " + fmt(worst_vol) + " vs 1e-10, area band " + fmt(band) +
               " vs 10");
}

// 6. Inequality suite: the averaged log-ratio bound and the norm bound.
void criterion_inequalities() {
    const GreenModel model = build_green(make_profile(ProfileKind::smoothed_cone, 4, 0.5, 1.0));
    double worst_gap = -1e300;
    bool all_satisfied = true;
    for (double r : {2.0, 5.0, 20.0})
        for (double s : {0.5, 1.0, 2.0})
            for (double dt : {1.0, 2.0, 4.0}) {
                const ShellBoundResult res = log_ratio_shell_bound(model, model.b(r), s, s + dt);
                all_satisfied = all_satisfied && res.satisfied;
                worst_gap = std::max(worst_gap, res.lhs - res.rhs);
            }

    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> log_r(std::log(0.3), std::log(30.0));
    std::uniform_real_distribution<double> t_dist(0.25, 4.0);
    const double h = 1e-3;
    double worst_rate_gap = -1e300;
    for (int i = 0; i < 20; ++i) {
        const double r0 = std::exp(log_r(rng));
        const double t = t_dist(rng);
        const FlowLine line = flow_line(model, r0, t + h);
        const MetricEigen em = metric_eigen(model, line, t - h);
        const MetricEigen ep = metric_eigen(model, line, t + h);
        const double bound =
            2.0 * std::sqrt(hessian_eigen_b2(model, line.radius(t)).tracefree_norm_sq) + 1e-6;
        worst_rate_gap = std::max(
            worst_rate_gap, std::abs(std::log(ep.e_rad / em.e_rad)) / (2.0 * h) - bound);
        worst_rate_gap = std::max(
            worst_rate_gap, std::abs(std::log(ep.e_sph / em.e_sph)) / (2.0 * h) - bound);
    }

    const bool pass = all_satisfied && worst_rate_gap <= 0.0;
    report(6, "inequality suite", pass,
           "27/27 log-ratio bounds " + std::string(all_satisfied ? "hold" : "VIOLATED") +
               " (worst gap " + fmt(worst_gap) + "), norm-bound margin " + fmt(-worst_rate_gap));
}

// 7. Decay experiment in the resolvable regime (alpha = 0.3).
void criterion_decay() {
    const GreenModel model = build_green(make_profile(ProfileKind::smoothed_cone, 4, 0.3, 1.0));
    const double t_grid[] = {1.0, 2.0, 4.0, 8.0, 16.0};
    const DecayReport main_table = log_ratio_decay_table(model, model.b(1.0), t_grid, 64.0);

    bool strictly_decreasing = !main_table.fit.degenerate;
    double prev = 1e300;
    for (const auto& s : main_table.samples) {
        strictly_decreasing = strictly_decreasing && s[1] < prev && s[1] > 0.0;
        prev = s[1];
    }
    const bool main_ok = strictly_decreasing && main_table.fit.exponent < 0.0;

    std::vector<double> levels;
    for (double r : {1.0, 2.0, 3.0, 4.5, 6.5})
        levels.push_back(model.b(r));
    const DecayReport loj = loj_decay_table(model, levels, model.b(0.5));
    bool loj_decreasing = !loj.fit.degenerate;
    prev = 1e300;
    for (const auto& s : loj.samples) {
        loj_decreasing = loj_decreasing && s[1] < prev;
        prev = s[1];
    }
    const bool loj_ok = loj_decreasing && loj.fit.exponent <= -1.0 + loj.fit.rms_residual;

    report(7, "decay experiment", main_ok && loj_ok,
           "lhs strictly decreasing, exponent " + fmt(main_table.fit.exponent) + " (residual " +
               fmt(main_table.fit.rms_residual) + "); H decreasing, exponent " +
               fmt(loj.fit.exponent) + " (residual " + fmt(loj.fit.rms_residual) + ") vs <= -1");
}

// 8. CSV determinism and the exit-status contract, through the CLI binary.
void criterion_determinism(const std::string& cli) {
    if (cli.empty()) {
        report(8, "determinism and exit contract", false, "no CLI path given on the command line");
        return;
    }
    const fs::path work = fs::temp_directory_path() / "coneflow_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);

    const fs::path cfg = work / "run.cfg";
    {
        std::ofstream out(cfg);
        out << "profile = smoothed_cone\nn = 4\nalpha = 0.3\na = 1\n"
            << "[grids]\nr_grid = log:0.25:8:10\n";
    }
    auto run_cli = [&cli](const std::string& args) {
        const int rc = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
        return rc == -1 ? -1 : WEXITSTATUS(rc);
    };

    const int rc1 = run_cli("run --config " + cfg.string() + " --out " + (work / "a").string());
    const int rc2 = run_cli("run --config " + cfg.string() + " --out " + (work / "b").string());
    bool identical = rc1 == 0 && rc2 == 0;
    for (const char* name :
         {"identities.csv", "area.csv", "flow.csv", "decay_main.csv", "decay_loj.csv"}) {
        identical = identical && !slurp(work / "a" / name).empty() &&
                    slurp(work / "a" / name) == slurp(work / "b" / name);
    }

    const fs::path bad_cfg = work / "bad.cfg";
    {
        std::ofstream out(bad_cfg);
        out << "profile = smoothed_cone\nn = 4\nalpha = 0.5\n"
            << "[grids]\nr_grid = log:0.5:8:6\n"
            << "[tolerances]\nquad_abs_tol = 1e-30\nquad_rel_tol = 0\n"
            << "quad_max_subdivisions = 64\n";
    }
    const int rc_bad =
        run_cli("run --config " + bad_cfg.string() + " --out " + (work / "bad").string());
    const std::string bad_report = slurp(work / "bad" / "report.txt");
    const bool contract = rc_bad != 0 && bad_report.find("fail") != std::string::npos;

    report(8, "determinism and exit contract", identical && contract,
           std::string("CSV bytes ") + (identical ? "identical" : "DIFFER") +
               "; failing config exit=" + std::to_string(rc_bad));
}

} // namespace

int main(int argc, char** argv) {
    criterion_euclid();
    criterion_cone();
    criterion_identities();
    criterion_gprime();
    criterion_monotone();
    criterion_inequalities();
    criterion_decay();
    criterion_determinism(argc > 1 ? argv[1] : "");
    if (g_failures == 0)
        std::printf("acceptance: all 8 criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
