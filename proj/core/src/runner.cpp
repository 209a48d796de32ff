#include "coneflow/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>

#include "coneflow/green.hpp"
#include "coneflow/monotone.hpp"

namespace coneflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> subsample(const std::vector<double>& grid, std::size_t count) {
    if (grid.size() <= count)
        return grid;
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(grid[i * (grid.size() - 1) / (count - 1)]);
    return out;
}

std::vector<double> log_grid(double start, double stop, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = start * std::pow(stop / start, double(i) / double(count - 1));
    return out;
}

class Recorder {
public:
    explicit Recorder(SuiteReport& report) : report_(report) {}

    // Runs fn and records one check; any library error becomes a failure.
    void check(const std::string& name, double threshold,
               const std::function<std::pair<CheckStatus, double>()>& fn) {
        const auto start = std::chrono::steady_clock::now();
        CheckResult result{name, CheckStatus::fail, kNaN, threshold, 0.0};
        try {
            const auto [status, measured] = fn();
            result.status = status;
            result.measured = measured;
        } catch (const Error&) {
            result.status = CheckStatus::fail;
        }
        result.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report_.checks.push_back(result);
    }

    // Common case: pass iff measured <= threshold.
    void check_max(const std::string& name, double threshold,
                   const std::function<double()>& fn) {
        check(name, threshold, [&]() -> std::pair<CheckStatus, double> {
            const double measured = fn();
            return {measured <= threshold ? CheckStatus::pass : CheckStatus::fail, measured};
        });
    }

private:
    SuiteReport& report_;
};

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& header) : out_(path) {
        out_ << header << "\n";
    }
    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            if (!first)
                out_ << ",";
            out_ << format_csv_value(v);
            first = false;
        }
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

// ---------------------------------------------------------------------------
// suites
// ---------------------------------------------------------------------------

void run_identities(const RunConfig& cfg, const GreenModel& model, Recorder& rec,
                    const std::filesystem::path& dir) {
    IdentityReport report;
    try {
        report = identity_residuals(model, cfg.r_grid);
    } catch (const Error&) {
        rec.check("identities.build", 0.0,
                  []() -> std::pair<CheckStatus, double> { return {CheckStatus::fail, kNaN}; });
        return;
    }

    CsvWriter csv(dir / "identities.csv", "r,laplace_residual,flux_residual,msy_ratio");
    for (const auto& row : report.rows)
        csv.row({row.r, row.laplace_residual, row.flux_residual, row.msy_ratio});

    rec.check_max("identities.laplace_max", 1e-8, [&] { return report.max_laplace; });
    rec.check_max("identities.flux_max", 1e-10, [&] { return report.max_flux; });
    rec.check("identities.msy_bounded", 0.0, [&]() -> std::pair<CheckStatus, double> {
        const bool ok = report.msy_min > 0.0 && std::isfinite(report.msy_max);
        return {ok ? CheckStatus::pass : CheckStatus::fail, report.msy_min};
    });
    rec.check_max("identities.b_inf_routes", 1e-6, [&] {
        const auto routes = b_infinity(model);
        return std::abs(routes.via_volume - routes.via_gradient);
    });
}

void run_flow_suite(const RunConfig& cfg, const GreenModel& model, Recorder& rec,
                    const std::filesystem::path& dir) {
    const auto samples = subsample(cfg.r_grid, 8);

    rec.check_max("flow.transport_b_max", 1e-7, [&] {
        double worst = 0.0;
        for (double r0 : samples)
            worst = std::max(worst, check_transport(model, r0, 1.0, cfg.ode).b_transport);
        return worst;
    });
    rec.check_max("flow.transport_volume_max", 1e-7, [&] {
        double worst = 0.0;
        for (double r0 : samples)
            worst = std::max(worst, check_transport(model, r0, 1.0, cfg.ode).volume_form);
        return worst;
    });
    rec.check_max("flow.semigroup", 1e-8, [&] {
        const double r0 = samples[samples.size() / 2];
        const double t = 0.5, s = 0.7;
        const FlowLine whole = flow_line(model, r0, t + s, cfg.ode);
        const FlowLine first = flow_line(model, r0, t, cfg.ode);
        const FlowLine second = flow_line(model, first.radius(t), s, cfg.ode);
        const double r_err = std::abs(whole.radius(t + s) - second.radius(s)) /
                             std::max(1.0, std::abs(whole.radius(t + s)));
        const double j_err =
            std::abs(whole.jacobian(t + s) - second.jacobian(s) * first.jacobian(t)) /
            std::max(1.0, std::abs(whole.jacobian(t + s)));
        return std::max(r_err, j_err);
    });
    rec.check("flow.gprime_order", 0.0, [&]() -> std::pair<CheckStatus, double> {
        const double r0 = model.manifold().profile.a;
        const double h = 1e-2;
        const GprimeResiduals coarse = check_gprime(model, r0, 1.0, h, cfg.ode);
        if (std::max(coarse.radial, coarse.spherical) < 1e-9)
            return {CheckStatus::degenerate, std::max(coarse.radial, coarse.spherical)};
        const GprimeResiduals fine = check_gprime(model, r0, 1.0, 0.5 * h, cfg.ode);
        const double ratio = coarse.radial / fine.radial;
        const bool ok = ratio > 2.5 && ratio < 5.5;
        return {ok ? CheckStatus::pass : CheckStatus::fail, ratio};
    });

    // one representative flow line for the CSV
    const double r0 = samples[samples.size() / 2];
    const FlowLine line = flow_line(model, r0, cfg.t_grid.back(), cfg.ode);
    CsvWriter csv(dir / "flow.csv", "t,R,J,e_rad,e_sph");
    for (double t : cfg.t_grid) {
        const MetricEigen e = metric_eigen(model, line, t);
        csv.row({t, line.radius(t), line.jacobian(t), e.e_rad, e.e_sph});
    }
}

void run_monotone_suite(const RunConfig& cfg, const GreenModel& model, Recorder& rec,
                        const std::filesystem::path& dir) {
    const auto& m = model.manifold();
    const double a = m.profile.a;
    const double r_lo = std::max(cfg.r_grid.front(), 1.0 * a);
    const double r_hi = std::min(cfg.r_grid.back(), 1e3 * a);
    const auto area_radii = log_grid(r_lo, std::max(r_hi, 2.0 * r_lo), 20);

    std::vector<double> levels;
    std::vector<AreaA> rows;
    rec.check("monotone.area_A_violations", 1e-9, [&]() -> std::pair<CheckStatus, double> {
        double worst = 0.0;
        double prev = kNaN;
        for (double r : area_radii) {
            const double level = model.b(r);
            const AreaA row = area_and_A(model, level);
            levels.push_back(level);
            rows.push_back(row);
            if (!std::isnan(prev))
                worst = std::max(worst, row.A - prev);
            prev = row.A;
        }
        return {worst <= 1e-9 ? CheckStatus::pass : CheckStatus::fail, worst};
    });

    if (!rows.empty()) {
        CsvWriter csv(dir / "area.csv", "r,area,A");
        for (std::size_t i = 0; i < rows.size(); ++i)
            csv.row({levels[i], rows[i].area, rows[i].A});
    }

    rec.check_max("monotone.area_band", 10.0, [&] {
        double band = 1.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double normalized =
                rows[i].area / (m.unit_sphere_area * std::pow(levels[i], m.n - 1));
            band = std::max({band, normalized, 1.0 / normalized});
        }
        return band;
    });

    rec.check("monotone.volume_ratio_violations", 1e-10,
              [&]() -> std::pair<CheckStatus, double> {
                  double worst = 0.0;
                  double prev = kNaN;
                  for (double r : subsample(cfg.r_grid, 20)) {
                      const double ratio = volume_ratio(m, r, cfg.quad);
                      if (!std::isnan(prev))
                          worst = std::max(worst, ratio - prev);
                      prev = ratio;
                  }
                  return {worst <= 1e-10 ? CheckStatus::pass : CheckStatus::fail, worst};
              });

    rec.check("monotone.H_violations", 1e-14, [&]() -> std::pair<CheckStatus, double> {
        double worst = 0.0;
        double prev = kNaN;
        for (double r : log_grid(0.5 * a, 6.0 * a, 8)) {
            const double H = hess_weighted_integral(model, model.b(r));
            if (!std::isnan(prev))
                worst = std::max(worst, H - (prev + 1e-14 + 1e-9 * prev));
            prev = H;
        }
        return {worst <= 0.0 ? CheckStatus::pass : CheckStatus::fail, worst};
    });

    rec.check("monotone.shell_bound", 1e-9, [&]() -> std::pair<CheckStatus, double> {
        double worst = -std::numeric_limits<double>::infinity();
        for (double rr : {2.0 * a, 5.0 * a, 20.0 * a}) {
            const double level = model.b(rr);
            for (double s : {0.5, 1.0, 2.0}) {
                for (double dt : {1.0, 2.0, 4.0}) {
                    const ShellBoundResult res = log_ratio_shell_bound(model, level, s, s + dt);
                    worst = std::max(worst, res.lhs - res.rhs);
                }
            }
        }
        return {worst <= 1e-9 ? CheckStatus::pass : CheckStatus::fail, worst};
    });
}

void run_decay_suite(const RunConfig& cfg, const GreenModel& model, Recorder& rec,
                     const std::filesystem::path& dir) {
    // r0 of the main estimate: smallest grid radius with |b' - b_inf| within
    // 1% of b_inf (the measurable stand-in for the gradient-estimate radius)
    double r_hat = cfg.r_grid.back();
    for (double r : cfg.r_grid) {
        if (std::abs(model.b_prime(r) - model.b_inf()) < 0.01 * model.b_inf()) {
            r_hat = r;
            break;
        }
    }

    std::optional<DecayReport> main_table;
    try {
        main_table = log_ratio_decay_table(model, model.b(r_hat), cfg.t_grid, cfg.T);
    } catch (const Error&) {
    }

    if (main_table) {
        CsvWriter csv(dir / "decay_main.csv", "t,lhs,bound_fit");
        double intercept = 0.0;
        if (!main_table->fit.degenerate) {
            // reconstruct the fitted curve value at each t for the table
            double sx = 0.0, sy = 0.0;
            int count = 0;
            for (const auto& s : main_table->samples) {
                if (s[0] > 0.0 && s[1] > 0.0) {
                    sx += std::log(s[0]);
                    sy += std::log(s[1]);
                    ++count;
                }
            }
            intercept = (sy - main_table->fit.exponent * sx) / count;
        }
        for (const auto& s : main_table->samples) {
            const double fit_value =
                main_table->fit.degenerate
                    ? 0.0
                    : std::exp(intercept) * std::pow(s[0], main_table->fit.exponent);
            csv.row({s[0], s[1], fit_value});
        }
    }

    rec.check("decay.main_violations", 0.0, [&]() -> std::pair<CheckStatus, double> {
        if (!main_table)
            return {CheckStatus::fail, kNaN};
        if (main_table->fit.degenerate)
            return {CheckStatus::degenerate, 0.0};
        const bool ok = main_table->monotonicity_violations == 0;
        return {ok ? CheckStatus::pass : CheckStatus::fail,
                double(main_table->monotonicity_violations)};
    });
    rec.check("decay.main_exponent", 0.0, [&]() -> std::pair<CheckStatus, double> {
        if (!main_table)
            return {CheckStatus::fail, kNaN};
        if (main_table->fit.degenerate)
            return {CheckStatus::degenerate, 0.0};
        return {main_table->fit.exponent < 0.0 ? CheckStatus::pass : CheckStatus::fail,
                main_table->fit.exponent};
    });

    // Lojasiewicz-form table over b-levels of the radius grid
    const double s_base = model.b(cfg.r_grid.front());
    std::vector<double> level_grid;
    for (double r : subsample(cfg.r_grid, 10)) {
        const double level = model.b(r);
        if (level > s_base * 1.0000001 && (level_grid.empty() || level > level_grid.back()))
            level_grid.push_back(level);
    }

    std::optional<DecayReport> loj_table;
    try {
        loj_table = loj_decay_table(model, level_grid, s_base);
    } catch (const Error&) {
    }

    if (loj_table) {
        CsvWriter csv(dir / "decay_loj.csv", "r,log_ratio,H");
        for (const auto& s : loj_table->samples)
            csv.row({s_base * std::exp(s[0]), s[0], s[1]});
    }

    rec.check("decay.loj_violations", 0.0, [&]() -> std::pair<CheckStatus, double> {
        if (!loj_table)
            return {CheckStatus::fail, kNaN};
        if (loj_table->fit.degenerate)
            return {CheckStatus::degenerate, 0.0};
        const bool ok = loj_table->monotonicity_violations == 0;
        return {ok ? CheckStatus::pass : CheckStatus::fail,
                double(loj_table->monotonicity_violations)};
    });
    rec.check("decay.loj_exponent", -1.0, [&]() -> std::pair<CheckStatus, double> {
        if (!loj_table)
            return {CheckStatus::fail, kNaN};
        if (loj_table->fit.degenerate)
            return {CheckStatus::degenerate, 0.0};
        const bool ok = loj_table->fit.exponent <= -1.0 + loj_table->fit.rms_residual;
        return {ok ? CheckStatus::pass : CheckStatus::fail, loj_table->fit.exponent};
    });
}

} // namespace

std::string to_string(CheckStatus status) {
    switch (status) {
    case CheckStatus::pass:
        return "pass";
    case CheckStatus::fail:
        return "fail";
    case CheckStatus::degenerate:
        return "degenerate";
    }
    return "unknown";
}

bool SuiteReport::all_passed() const {
    return failures() == 0;
}

int SuiteReport::failures() const {
    int count = 0;
    for (const auto& c : checks)
        count += (c.status == CheckStatus::fail) ? 1 : 0;
    return count;
}

std::string format_csv_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

SuiteReport run(const RunConfig& cfg, const std::string& out_override) {
    if (cfg.r_grid.empty() || cfg.t_grid.empty())
        throw ValidationError("run: config grids must be non-empty");
    SuiteReport report;

    std::string out = cfg.out_dir;
    if (const char* env = std::getenv("CONEFLOW_OUT"); env && *env)
        out = env;
    if (!out_override.empty())
        out = out_override;
    report.out_dir = out;

    const std::filesystem::path dir(out);
    std::filesystem::create_directories(dir);

    Recorder rec(report);

    std::optional<GreenModel> model;
    try {
        model = build_green(cfg.manifold(), cfg.quad);
    } catch (const Error&) {
        rec.check("model.build", 0.0,
                  []() -> std::pair<CheckStatus, double> { return {CheckStatus::fail, kNaN}; });
    }

    if (model) {
        if (cfg.suite_identities)
            run_identities(cfg, *model, rec, dir);
        if (cfg.suite_flow)
            run_flow_suite(cfg, *model, rec, dir);
        if (cfg.suite_monotone)
            run_monotone_suite(cfg, *model, rec, dir);
        if (cfg.suite_decay)
            run_decay_suite(cfg, *model, rec, dir);
    }

    std::ofstream rep(dir / "report.txt");
    for (const auto& c : report.checks)
        rep << c.name << " " << to_string(c.status) << " " << format_csv_value(c.measured)
            << " " << format_csv_value(c.threshold) << "\n";
    return report;
}

} // namespace coneflow
