#pragma once

#include <span>
#include <vector>

#include "coneflow/warp.hpp"

namespace coneflow {

/// Eigen-decomposition of Hess(b^2) at radius r in the radial/spherical frame.
/// For a radial function u these are u'' (radial) and u' phi'/phi (spherical,
/// multiplicity n-1); the trace-free part has squared norm
/// ((n-1)/n) (lam_rad - lam_sph)^2.
struct HessEigenB2 {
    double lam_rad;
    double lam_sph;
    double laplacian;
    double tracefree_norm_sq;
};

struct IdentityRow {
    double r;
    double laplace_residual; ///< |(b^2)'' + (n-1)(phi'/phi)(b^2)' - 2n b'^2|
    double flux_residual;    ///< |b' phi^{n-1} / b^{n-1} - 1| (relative form)
    double msy_ratio;        ///< G(r) r^{n-2}
};

struct IdentityReport {
    std::vector<IdentityRow> rows;
    double max_laplace = 0.0;
    double max_flux = 0.0;
    double msy_min = 0.0; ///< empirical C1 of the two-sided Green bound
    double msy_max = 0.0; ///< empirical C2
};

/// The two routes to the asymptotic gradient constant.
struct BInfinityRoutes {
    double value;        ///< the returned constant (volume route)
    double via_volume;   ///< (lim volume_ratio)^{1/(n-2)} = alpha^{(n-1)/(n-2)}
    double via_gradient; ///< b'(r*) at r* = 1e4 * a
};

/// Green function G and b = G^{1/(2-n)} on a model manifold, with all
/// derivatives in closed form given the profile.
///
/// G(r) = (n-2) * int_r^inf phi(s)^{1-n} ds, built by quadrature with an
/// exact conical tail; this is the radial harmonic function normalized so
/// that G = r^{2-n} on Euclidean space. Immutable after build; evaluations
/// are pure and safe for concurrent use.
class GreenModel {
public:
    const ModelManifold& manifold() const { return manifold_; }
    const QuadSpec& quad() const { return quad_; }
    const ConicalTail& tail() const { return tail_; }

    double green(double r) const;        // G
    double green_prime(double r) const;  // G' = -(n-2) phi^{1-n}
    double green_second(double r) const; // G'' = (n-2)(n-1) phi^{-n} phi'

    double b(double r) const;
    double b_prime(double r) const;  // |grad b| for the radial b
    double b_second(double r) const;

    struct BDerivatives {
        double b;
        double bp;
        double bpp;
    };
    /// b, b', b'' sharing a single Green evaluation (for hot paths).
    BDerivatives b_with_derivatives(double r) const;

    /// Asymptotic gradient constant alpha^{(n-1)/(n-2)} (volume route).
    double b_inf() const { return b_inf_; }

    /// Inverse of b (bracketed monotone root find to 1e-12 relative).
    double radius_at_level(double level) const;

    /// Evaluations reject radii below this cutoff (1e-8 * a); G diverges at
    /// the pole and everything of interest lives on {b >= r0} away from it.
    double pole_cutoff() const { return pole_cutoff_; }

private:
    friend GreenModel build_green(const ModelManifold&, const QuadSpec&);

    void require_in_domain(double r) const;

    ModelManifold manifold_;
    QuadSpec quad_;
    ConicalTail tail_;
    double b_inf_ = 1.0;
    double pole_cutoff_ = 1e-8;
};

/// Builds the Green model; the quad spec's tail_radius is interpreted in
/// units of the smoothing scale a (the conical tail descriptor is exact
/// beyond it for every cataloged profile).
GreenModel build_green(const ModelManifold& m, const QuadSpec& spec = {});

/// Computes b_inf two ways and checks they agree to 1e-6
/// (throws ModelInconsistencyError otherwise).
BInfinityRoutes b_infinity(const GreenModel& model);

/// Pointwise residuals of Delta b^2 = 2n |grad b|^2, the flux identity, and
/// the two-sided Green comparison G ~ r^{2-n} over a radius grid.
IdentityReport identity_residuals(const GreenModel& model, std::span<const double> r_grid);

HessEigenB2 hessian_eigen_b2(const GreenModel& model, double r);

/// Same assembly from precomputed b-derivatives (single-quadrature paths).
HessEigenB2 hessian_eigen_from(const ModelManifold& m, double r,
                               const GreenModel::BDerivatives& d);

} // namespace coneflow
