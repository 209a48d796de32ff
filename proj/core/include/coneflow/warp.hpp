#pragma once

#include <string>

#include "coneflow/numerics.hpp"

namespace coneflow {

/// Catalog of rotationally symmetric models g = dr^2 + phi(r)^2 g_{S^{n-1}}.
enum class ProfileKind {
    euclid,        ///< phi(r) = r
    cone,          ///< phi(r) = alpha*r (vertex at r = 0)
    smoothed_cone, ///< phi(r) = alpha*r + (1-alpha)*a*tanh(r/a), smooth pole
};

std::string to_string(ProfileKind kind);

/// Warp function phi with closed-form first and second derivatives.
struct WarpProfile {
    ProfileKind kind = ProfileKind::euclid;
    double alpha = 1.0; ///< asymptotic slope, in (0, 1]
    double a = 1.0;     ///< smoothing scale (ignored by euclid/cone)

    double value(double r) const;     // phi
    double slope(double r) const;     // phi'
    double curvature(double r) const; // phi''

    /// Stable identifier, e.g. "smoothed_cone(n=?, alpha=0.5, a=1)" without n.
    std::string id() const;
};

struct RicciPair {
    double radial;    ///< Ric(d_r, d_r)
    double spherical; ///< Ric(e, e) for a unit tangential e, multiplicity n-1
};

/// A model manifold: dimension plus warp profile plus unit-ball constants.
struct ModelManifold {
    int n = 3;
    WarpProfile profile;
    double unit_ball_volume = 0.0;  ///< omega_n
    double unit_sphere_area = 0.0;  ///< omega_{n-1} = n * omega_n

    std::string id() const;
};

/// Builds and validates a manifold from the profile catalog.
///
/// euclid ignores alpha (the slope is 1); cone and smoothed_cone require
/// alpha in (0, 1] — alpha > 1 would make the tangential Ricci curvature
/// negative. The smoothing scale a must be positive.
ModelManifold make_profile(ProfileKind kind, int n, double alpha = 1.0, double a = 1.0);

/// The two Ricci eigenvalues of the warped metric at radius r > 0:
///   radial    = -(n-1) phi''/phi
///   spherical = -phi''/phi + (n-2)(1 - phi'^2)/phi^2
RicciPair ricci_eigenvalues(const ModelManifold& m, double r);

/// vol(B_r(p)) / (omega_n r^n) with vol(B_r) = omega_{n-1} * int_0^r phi^{n-1}.
/// Monotone non-increasing in r with limit alpha^{n-1}.
double volume_ratio(const ModelManifold& m, double r, const QuadSpec& spec = {});

} // namespace coneflow
