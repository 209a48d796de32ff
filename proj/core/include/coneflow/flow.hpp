#pragma once

#include "coneflow/green.hpp"

namespace coneflow {

/// One trajectory of the gradient flow of b^2, reduced by rotational symmetry
/// to the geodesic radius. The integrated state is (R, W, U) with
///   R' = (b^2)'(R),   W = log(b(R)/b(r0)),   U = log J,
/// where J = dR/dr0 is the radial Jacobian (variational equation). Carrying
/// log b along the flow instead of re-evaluating the Green quadrature keeps
/// the right-hand side closed-form in phi; b(R(t)) = b(r0) e^{W(t)} holds for
/// the exact solution by uniqueness, and check_transport verifies it against
/// the quadrature route.
class FlowLine {
public:
    double r0() const { return r0_; }
    double t_max() const { return t_max_; }
    double b_at_start() const { return b0_; }

    double radius(double t) const;     ///< R(t)
    double jacobian(double t) const;   ///< J(t) = e^{U(t)}
    double log_jacobian(double t) const;
    double log_b_gain(double t) const; ///< W(t)
    double b_along(double t) const;    ///< b(r0) e^{W(t)}

    const OdeTrajectory& trajectory() const { return traj_; }

private:
    friend FlowLine flow_line(const GreenModel&, double, double, const OdeSpec&);

    void require_time(double t) const;

    double r0_ = 0.0;
    double t_max_ = 0.0;
    double b0_ = 0.0;
    OdeTrajectory traj_;
};

/// The conformal family g(t) = (b o Phi_t)^{-2} Phi_t^* g evaluated on g-unit
/// radial/spherical vectors at the base point of a flow line. The family is
/// diagonal in this frame for all t.
struct MetricEigen {
    double t;
    double e_rad; ///< J(t)^2 / b(R(t))^2
    double e_sph; ///< phi(R(t))^2 / (phi(r0)^2 b(R(t))^2), multiplicity n-1
};

struct TransportResiduals {
    double b_transport; ///< |b(R(t)) - b(r0) exp(int 2 b'(R)^2)|
    double volume_form; ///< |direct warped-product distortion - b-form of it|
};

struct GprimeResiduals {
    double radial;
    double spherical;
};

/// Integrates the flow from r0 for time t_max (t_max < 0 flows backward,
/// only meaningful down to the pole cutoff).
FlowLine flow_line(const GreenModel& model, double r0, double t_max, const OdeSpec& spec = {});

MetricEigen metric_eigen(const GreenModel& model, const FlowLine& line, double t);

/// sup over directions v of |log(g(T)(v,v)/g(t)(v,v))| at the base point
/// b^{-1}-radius r0. Since g(t) and g(T) are simultaneously diagonal in the
/// radial/spherical frame, the Rayleigh-quotient extremes over v are attained
/// at the two eigen-directions, so the sup is the max of the two eigenvalue
/// log-ratios; the random-direction oracle in the tests checks the reduction.
double sup_log_ratio(const GreenModel& model, double r0, double t, double T,
                     const OdeSpec& spec = {});

/// Centered finite differences of d/dt e_rad and d/dt e_sph against the
/// analytic right-hand side 2 Phi_t^*[b^{-2}(Hess_{b^2} - (Delta b^2/n) g)]
/// evaluated through hessian_eigen_b2. Residuals shrink like O(h^2).
GprimeResiduals check_gprime(const GreenModel& model, double r0, double t, double h,
                             const OdeSpec& spec = {});

/// Transport identities along the flow: the change of b (quadrature route vs
/// exp of the integrated gradient) and the volume-form identity
/// phi(r0)^{n-1} / ((b^2)'(R) phi(R)^{n-1}) = b(r0)^{n-1} / (2 b'(r0) b(R)^n),
/// the two being equal via the flux identity b' phi^{n-1} = b^{n-1}.
TransportResiduals check_transport(const GreenModel& model, double r0, double t,
                                   const OdeSpec& spec = {});

} // namespace coneflow
