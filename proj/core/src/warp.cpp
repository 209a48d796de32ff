#include "coneflow/warp.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace coneflow {

std::string to_string(ProfileKind kind) {
    switch (kind) {
    case ProfileKind::euclid:
        return "euclid";
    case ProfileKind::cone:
        return "cone";
    case ProfileKind::smoothed_cone:
        return "smoothed_cone";
    }
    return "unknown";
}

double WarpProfile::value(double r) const {
    switch (kind) {
    case ProfileKind::euclid:
        return r;
    case ProfileKind::cone:
        return alpha * r;
    case ProfileKind::smoothed_cone:
        return alpha * r + (1.0 - alpha) * a * std::tanh(r / a);
    }
    return 0.0;
}

double WarpProfile::slope(double r) const {
    switch (kind) {
    case ProfileKind::euclid:
        return 1.0;
    case ProfileKind::cone:
        return alpha;
    case ProfileKind::smoothed_cone: {
        const double c = std::cosh(r / a);
        return alpha + (1.0 - alpha) / (c * c);
    }
    }
    return 0.0;
}

double WarpProfile::curvature(double r) const {
    switch (kind) {
    case ProfileKind::euclid:
    case ProfileKind::cone:
        return 0.0;
    case ProfileKind::smoothed_cone: {
        const double c = std::cosh(r / a);
        const double t = std::tanh(r / a);
        return -2.0 * (1.0 - alpha) / a * t / (c * c);
    }
    }
    return 0.0;
}

std::string WarpProfile::id() const {
    std::ostringstream os;
    os << to_string(kind);
    if (kind != ProfileKind::euclid) {
        os << "(alpha=" << alpha;
        if (kind == ProfileKind::smoothed_cone)
            os << ",a=" << a;
        os << ")";
    }
    return os.str();
}

std::string ModelManifold::id() const {
    std::ostringstream os;
    os << profile.id() << "[n=" << n << "]";
    return os.str();
}

ModelManifold make_profile(ProfileKind kind, int n, double alpha, double a) {
    if (n < 3)
        throw ValidationError("make_profile: dimension must satisfy n >= 3");
    if (n > 16)
        throw ValidationError("make_profile: dimensions above 16 overflow double-precision "
                              "intermediates at the supported radial ranges");
    if (kind == ProfileKind::euclid) {
        alpha = 1.0;
    } else if (!(alpha > 0.0) || alpha > 1.0) {
        throw ValidationError("make_profile: alpha must lie in (0, 1]; alpha > 1 violates "
                              "nonnegative Ricci curvature in the tangential directions");
    }
    if (!(a > 0.0))
        throw ValidationError("make_profile: smoothing scale a must be positive");

    ModelManifold m;
    m.n = n;
    m.profile = WarpProfile{kind, alpha, a};
    m.unit_ball_volume = std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
    m.unit_sphere_area = n * m.unit_ball_volume;
    return m;
}

RicciPair ricci_eigenvalues(const ModelManifold& m, double r) {
    if (!(r > 0.0))
        throw DomainError("ricci_eigenvalues: need r > 0");
    const double phi = m.profile.value(r);
    const double dphi = m.profile.slope(r);
    const double ddphi = m.profile.curvature(r);
    const double radial = -(m.n - 1) * ddphi / phi;
    const double spherical = -ddphi / phi + (m.n - 2) * (1.0 - dphi * dphi) / (phi * phi);
    return {radial, spherical};
}

double volume_ratio(const ModelManifold& m, double r, const QuadSpec& spec) {
    if (!(r > 0.0))
        throw DomainError("volume_ratio: need r > 0");
    const int p = m.n - 1;
    const auto& prof = m.profile;
    const double vol_integral =
        integrate([&prof, p](double s) { return std::pow(prof.value(s), p); }, 0.0, r, spec);
    return m.n * vol_integral / std::pow(r, m.n);
}

} // namespace coneflow
