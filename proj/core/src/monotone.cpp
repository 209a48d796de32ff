#include "coneflow/monotone.hpp"

#include <algorithm>
#include <cmath>

namespace coneflow {

namespace {

// b^{-n} ||trace-free Hess b^2||^2 phi^{n-1} at geodesic radius s.
double weighted_hess_density(const GreenModel& model, double s) {
    const auto& m = model.manifold();
    const auto d = model.b_with_derivatives(s);
    const HessEigenB2 h = hessian_eigen_from(m, s, d);
    return std::pow(d.b, -m.n) * h.tracefree_norm_sq * std::pow(m.profile.value(s), m.n - 1);
}

// Adaptive integral of the weighted density over [lo, hi] with a tolerance
// floored well below the resolvable scale of the integrand.
double shell_integral(const GreenModel& model, double lo, double hi, double peak_hint) {
    QuadSpec spec = model.quad();
    const double width = hi - lo;
    spec.abs_tol = std::max(1e-18, 1e-14 * peak_hint * std::max(width, 1.0));
    spec.rel_tol = std::max(spec.rel_tol, 1e-10);
    return integrate([&model](double s) { return weighted_hess_density(model, s); }, lo, hi,
                     spec);
}

// Log-ratio differences across flow spans of ~100 time units carry about
// 1e-10 of accumulated integration noise; below this floor a table is an
// exact fixed point as far as doubles can tell.
constexpr double kLogRatioFloor = 1e-9;

void count_violations(DecayReport& report, double tol_abs, double tol_rel) {
    report.monotonicity_violations = 0;
    report.worst_violation = 0.0;
    for (std::size_t i = 1; i < report.samples.size(); ++i) {
        const double prev = report.samples[i - 1][1];
        const double cur = report.samples[i][1];
        const double excess = cur - prev;
        if (excess > tol_abs + tol_rel * std::abs(prev)) {
            ++report.monotonicity_violations;
            report.worst_violation = std::max(report.worst_violation, excess);
        }
    }
}

} // namespace

AreaA area_and_A(const GreenModel& model, double level) {
    const auto& m = model.manifold();
    const double r_b = model.radius_at_level(level);
    const double bp = model.b_prime(r_b);
    AreaA out;
    out.area = m.unit_sphere_area * std::pow(m.profile.value(r_b), m.n - 1);
    out.A = std::pow(level, 1 - m.n) * out.area * bp * bp * bp;
    return out;
}

double hess_weighted_integral(const GreenModel& model, double level) {
    const auto& m = model.manifold();
    const double r_b = model.radius_at_level(level);

    // scan outward for the truncation radius: past the peak and below 1e-16
    // of it the remaining tail is beyond double resolution anyway
    double peak = weighted_hess_density(model, r_b);
    double cut = r_b;
    const double scan_cap = std::max(1e3 * m.profile.a, 10.0 * r_b);
    while (cut < scan_cap) {
        cut *= 1.25;
        const double v = weighted_hess_density(model, cut);
        peak = std::max(peak, v);
        if (v < 1e-16 * peak)
            break;
    }
    return m.unit_sphere_area * shell_integral(model, r_b, cut, peak);
}

ShellBoundResult log_ratio_shell_bound(const GreenModel& model, double level, double s, double t) {
    if (!(0.0 < s && s < t))
        throw DomainError("log_ratio_shell_bound: need 0 < s < t");
    const auto& m = model.manifold();
    const double r_b = model.radius_at_level(level);

    ShellBoundResult out;
    out.lhs = sup_log_ratio(model, r_b, s, t);

    const FlowLine line = flow_line(model, r_b, t);
    const double lo = line.radius(s);
    const double hi = line.radius(t);
    const double peak =
        std::max(weighted_hess_density(model, lo), weighted_hess_density(model, hi));
    const double shell = m.unit_sphere_area * shell_integral(model, lo, hi, peak);

    const double area = m.unit_sphere_area * std::pow(m.profile.value(r_b), m.n - 1);
    const double weighted = shell / model.b_prime(r_b);
    out.rhs = std::sqrt(t - s) *
              std::sqrt(2.0 * std::pow(level, m.n - 1) / area * weighted);
    out.satisfied = out.lhs <= out.rhs + 1e-9;
    return out;
}

DecayReport log_ratio_decay_table(const GreenModel& model, double level,
                               std::span<const double> t_grid, double T) {
    if (t_grid.empty())
        throw DomainError("log_ratio_decay_table: empty t grid");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1])))
            throw DomainError("log_ratio_decay_table: t grid must be positive and increasing");
    }
    if (!(T > t_grid.back()))
        throw DomainError("log_ratio_decay_table: need T > max(t_grid)");

    const auto& prof = model.manifold().profile;
    const double r_b = model.radius_at_level(level);
    const FlowLine line = flow_line(model, r_b, T);
    const auto yT = line.trajectory().at(T);

    DecayReport report;
    report.profile_id = model.manifold().id();
    report.samples.reserve(t_grid.size());
    for (double t : t_grid) {
        const auto yt = line.trajectory().at(t);
        const double lr_rad = 2.0 * ((yT[2] - yT[1]) - (yt[2] - yt[1]));
        const double lr_sph =
            2.0 * (std::log(prof.value(yT[0]) / prof.value(yt[0])) - (yT[1] - yt[1]));
        report.samples.push_back({t, std::max(std::abs(lr_rad), std::abs(lr_sph))});
    }

    bool all_tiny = true;
    for (const auto& row : report.samples)
        all_tiny = all_tiny && row[1] < kLogRatioFloor;
    report.fit = all_tiny ? FitResult{} : fit_decay(report.samples);
    count_violations(report, 1e-11, 1e-9);
    return report;
}

DecayReport loj_decay_table(const GreenModel& model, std::span<const double> level_grid,
                            double s_base_level) {
    if (level_grid.empty())
        throw DomainError("loj_decay_table: empty level grid");
    for (std::size_t i = 0; i < level_grid.size(); ++i) {
        if (!(level_grid[i] > s_base_level) ||
            (i > 0 && !(level_grid[i] > level_grid[i - 1])))
            throw DomainError(
                "loj_decay_table: levels must be increasing and above the base level");
    }

    DecayReport report;
    report.profile_id = model.manifold().id();
    report.samples.reserve(level_grid.size());
    bool all_tiny = true;
    for (double level : level_grid) {
        const double H = hess_weighted_integral(model, level);
        report.samples.push_back({std::log(level / s_base_level), H});
        all_tiny = all_tiny && H < 1e-14;
    }
    report.fit = all_tiny ? FitResult{} : fit_decay(report.samples);
    count_violations(report, 1e-15, 1e-9);
    return report;
}

FitResult fit_decay(std::span<const std::array<double, 2>> samples) {
    std::vector<std::array<double, 2>> logs;
    logs.reserve(samples.size());
    for (const auto& s : samples) {
        if (s[0] > 0.0 && s[1] > 0.0)
            logs.push_back({std::log(s[0]), std::log(s[1])});
    }
    FitResult fit;
    if (logs.size() < 3)
        return fit;

    double sx = 0.0, sy = 0.0;
    for (const auto& p : logs) {
        sx += p[0];
        sy += p[1];
    }
    const double mx = sx / logs.size();
    const double my = sy / logs.size();
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : logs) {
        sxx += (p[0] - mx) * (p[0] - mx);
        sxy += (p[0] - mx) * (p[1] - my);
    }
    if (sxx == 0.0)
        return fit;
    fit.degenerate = false;
    fit.exponent = sxy / sxx;
    const double intercept = my - fit.exponent * mx;
    double ss = 0.0;
    for (const auto& p : logs) {
        const double e = p[1] - (intercept + fit.exponent * p[0]);
        ss += e * e;
    }
    fit.rms_residual = std::sqrt(ss / logs.size());
    return fit;
}

} // namespace coneflow
