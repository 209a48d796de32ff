#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "coneflow/errors.hpp"

namespace coneflow {

/// Tolerances and tail handling for the adaptive quadrature.
///
/// tail_radius is the radius beyond which an improper integrand is replaced
/// by its analytic conical tail (see ConicalTail).
struct QuadSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double tail_radius = 40.0;
    int max_subdivisions = 4000;

    void validate() const;
};

/// Asymptotic form  c * (s + offset)^(1-n)  of an improper integrand.
///
/// The offset generalizes the plain conical form c*s^(1-n): asymptotically
/// conical profiles with a smoothing scale approach an offset cone, for which
/// this tail is exact up to exponentially small terms. offset = 0 recovers
/// the plain form. The closed-form tail integral from s is
/// c * (s+offset)^(2-n) / (n-2); it diverges unless n > 2.
struct ConicalTail {
    double coefficient = 0.0;
    double offset = 0.0;
    int decay_dimension = 3; ///< the n in s^(1-n)

    double value_at(double s) const;
    double integral_from(double s) const;
};

using ScalarFn = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (G7,K15) quadrature of f over the finite interval [a, b].
/// Meets |error| <= abs_tol + rel_tol*|I| for integrands smooth on [a, b];
/// throws AccuracyError when max_subdivisions is exhausted first.
double integrate(const ScalarFn& f, double a, double b, const QuadSpec& spec);

/// Integral of f over [lower, infinity).
///
/// The head [lower, max(lower, tail_radius)] is done by adaptive subdivision;
/// beyond the split point the integrand is replaced by `tail`, whose integral
/// is closed-form. Throws DivergenceError when the tail does not decay faster
/// than s^-1 (decay_dimension <= 2).
double integrate_to_infinity(const ScalarFn& f, double lower, const ConicalTail& tail,
                             const QuadSpec& spec);

/// Tolerances for the adaptive ODE integrator.
struct OdeSpec {
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    bool dense_output = true;

    void validate() const;
};

/// dy/dt = f(t, y); writes the derivative into dydt (same length as y).
using OdeField = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Trajectory produced by solve_ode. Stores the accepted steps and, when
/// dense output is enabled, a quartic interpolant per step. Evaluation at an
/// accepted step time returns the stored step value exactly.
class OdeTrajectory {
public:
    double t_begin() const { return times_.front(); }
    double t_end() const { return times_.back(); }
    std::size_t dimension() const { return dim_; }
    std::size_t step_count() const { return times_.size() - 1; }

    const std::vector<double>& times() const { return times_; }
    /// State at the i-th accepted node.
    std::span<const double> state(std::size_t i) const;

    /// Dense evaluation at any t in [t_begin, t_end].
    std::vector<double> at(double t) const;
    double at(double t, std::size_t component) const;

private:
    friend OdeTrajectory solve_ode(const OdeField&, std::span<const double>, double, double,
                                   const OdeSpec&);

    std::size_t dim_ = 0;
    bool dense_ = false;
    std::vector<double> times_;   // accepted nodes, strictly monotone
    std::vector<double> states_;  // node states, dim_ per node
    std::vector<double> rcont_;   // 5 * dim_ interpolation coefficients per step

    std::size_t locate(double t) const;
};

/// Adaptive Dormand-Prince 5(4) integration of y' = f(t, y) from t0 to t1
/// (either direction) with Lund-stabilized PI step control and the classic
/// quartic continuous extension. Throws IntegrationError on step underflow,
/// carrying the last valid time.
OdeTrajectory solve_ode(const OdeField& f, std::span<const double> y0, double t0, double t1,
                        const OdeSpec& spec = {});

} // namespace coneflow
