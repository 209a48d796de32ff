#include "coneflow/green.hpp"

#include <algorithm>
#include <cmath>

namespace coneflow {

GreenModel build_green(const ModelManifold& m, const QuadSpec& spec) {
    spec.validate();
    GreenModel model;
    model.manifold_ = m;
    model.quad_ = spec;
    model.quad_.tail_radius = spec.tail_radius * m.profile.a;
    model.pole_cutoff_ = 1e-8 * m.profile.a;

    // Exact asymptotic form of phi^{1-n}. euclid/cone are conical everywhere
    // (offset 0); the tanh profile approaches the offset cone
    // alpha*(s + (1-alpha)a/alpha) up to O(exp(-2s/a)).
    const double alpha = m.profile.alpha;
    model.tail_.coefficient = std::pow(alpha, 1 - m.n);
    model.tail_.decay_dimension = m.n;
    model.tail_.offset = (m.profile.kind == ProfileKind::smoothed_cone)
                             ? (1.0 - alpha) * m.profile.a / alpha
                             : 0.0;

    model.b_inf_ = std::pow(alpha, double(m.n - 1) / double(m.n - 2));

    // Smoke evaluation: a divergent profile would surface here as a
    // construction error rather than later inside a consumer.
    const double probe = model.green(std::max(1.0, m.profile.a));
    if (!(probe > 0.0) || !std::isfinite(probe))
        throw ValidationError("build_green: Green integral did not converge for this profile");
    return model;
}

void GreenModel::require_in_domain(double r) const {
    if (!(r >= pole_cutoff_))
        throw DomainError("GreenModel: radius below the pole cutoff 1e-8*a");
    if (!std::isfinite(r))
        throw DomainError("GreenModel: radius must be finite");
}

double GreenModel::green(double r) const {
    require_in_domain(r);
    const int n = manifold_.n;
    const auto& prof = manifold_.profile;
    const double head_and_tail = integrate_to_infinity(
        [&prof, n](double s) { return std::pow(prof.value(s), 1 - n); }, r, tail_, quad_);
    return (n - 2) * head_and_tail;
}

double GreenModel::green_prime(double r) const {
    require_in_domain(r);
    const int n = manifold_.n;
    return -(n - 2) * std::pow(manifold_.profile.value(r), 1 - n);
}

double GreenModel::green_second(double r) const {
    require_in_domain(r);
    const int n = manifold_.n;
    const double phi = manifold_.profile.value(r);
    return double(n - 2) * (n - 1) * std::pow(phi, -n) * manifold_.profile.slope(r);
}

double GreenModel::b(double r) const {
    return std::pow(green(r), 1.0 / (2 - manifold_.n));
}

double GreenModel::b_prime(double r) const {
    const double m = 1.0 / (2 - manifold_.n);
    return m * std::pow(green(r), m - 1.0) * green_prime(r);
}

double GreenModel::b_second(double r) const {
    const double m = 1.0 / (2 - manifold_.n);
    const double G = green(r);
    const double Gp = green_prime(r);
    const double Gpp = green_second(r);
    return m * (m - 1.0) * std::pow(G, m - 2.0) * Gp * Gp + m * std::pow(G, m - 1.0) * Gpp;
}

GreenModel::BDerivatives GreenModel::b_with_derivatives(double r) const {
    const double m = 1.0 / (2 - manifold_.n);
    const double G = green(r);
    const double Gp = green_prime(r);
    const double Gpp = green_second(r);
    BDerivatives d;
    d.b = std::pow(G, m);
    d.bp = m * std::pow(G, m - 1.0) * Gp;
    d.bpp = m * (m - 1.0) * std::pow(G, m - 2.0) * Gp * Gp + m * std::pow(G, m - 1.0) * Gpp;
    return d;
}

double GreenModel::radius_at_level(double level) const {
    if (!(level > 0.0) || !std::isfinite(level))
        throw DomainError("radius_at_level: level must be positive and finite");
    double lo = pole_cutoff_;
    if (b(lo) > level)
        throw DomainError("radius_at_level: level below the range of b");
    double hi = std::max(manifold_.profile.a, level / b_inf_);
    while (b(hi) < level) {
        hi *= 2.0;
        if (hi > 1e300)
            throw DomainError("radius_at_level: level not reached (b not diverging?)");
    }

    // safeguarded Newton on b(x) - level
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = b(x) - level;
        if (f > 0.0)
            hi = x;
        else
            lo = x;
        const double step = f / b_prime(x);
        double next = x - step;
        if (!(next > lo) || !(next < hi))
            next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-12 * std::max(1.0, std::abs(x))) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

BInfinityRoutes b_infinity(const GreenModel& model) {
    const auto& m = model.manifold();
    BInfinityRoutes routes;
    // Route A: Bishop-Gromov limit of the volume ratio. For the cataloged
    // asymptotically conical profiles the limit is alpha^{n-1} in closed form.
    routes.via_volume = std::pow(m.profile.alpha, double(m.n - 1) / double(m.n - 2));
    routes.via_gradient = model.b_prime(1e4 * m.profile.a);
    routes.value = routes.via_volume;
    if (std::abs(routes.via_volume - routes.via_gradient) > 1e-6)
        throw ModelInconsistencyError(
            "b_infinity: volume route and gradient route disagree beyond 1e-6");
    return routes;
}

IdentityReport identity_residuals(const GreenModel& model, std::span<const double> r_grid) {
    const auto& m = model.manifold();
    const int n = m.n;
    IdentityReport report;
    report.rows.reserve(r_grid.size());
    bool first = true;
    for (double r : r_grid) {
        const double phi = m.profile.value(r);
        const double dphi = m.profile.slope(r);
        const double G = model.green(r);
        const auto [bv, bp, bpp] = model.b_with_derivatives(r);

        const double lap_b2 = (2.0 * bp * bp + 2.0 * bv * bpp) +
                              (n - 1) * (dphi / phi) * (2.0 * bv * bp);
        IdentityRow row;
        row.r = r;
        row.laplace_residual = std::abs(lap_b2 - 2.0 * n * bp * bp);
        // scale-free arrangement of |b' phi^{n-1} - b^{n-1}|
        row.flux_residual = std::abs(bp * std::pow(phi / bv, n - 1) - 1.0);
        row.msy_ratio = G * std::pow(r, n - 2);
        report.rows.push_back(row);

        report.max_laplace = std::max(report.max_laplace, row.laplace_residual);
        report.max_flux = std::max(report.max_flux, row.flux_residual);
        if (first) {
            report.msy_min = report.msy_max = row.msy_ratio;
            first = false;
        } else {
            report.msy_min = std::min(report.msy_min, row.msy_ratio);
            report.msy_max = std::max(report.msy_max, row.msy_ratio);
        }
    }
    return report;
}

HessEigenB2 hessian_eigen_b2(const GreenModel& model, double r) {
    return hessian_eigen_from(model.manifold(), r, model.b_with_derivatives(r));
}

HessEigenB2 hessian_eigen_from(const ModelManifold& m, double r,
                               const GreenModel::BDerivatives& d) {
    const double phi = m.profile.value(r);
    const double dphi = m.profile.slope(r);
    HessEigenB2 h;
    h.lam_rad = 2.0 * d.bp * d.bp + 2.0 * d.b * d.bpp; // (b^2)''
    h.lam_sph = 2.0 * d.b * d.bp * dphi / phi;         // (b^2)' phi'/phi
    h.laplacian = h.lam_rad + (m.n - 1) * h.lam_sph;
    const double gap = h.lam_rad - h.lam_sph;
    h.tracefree_norm_sq = (double(m.n - 1) / m.n) * gap * gap;
    return h;
}

} // namespace coneflow
