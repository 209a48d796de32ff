#include "coneflow/flow.hpp"

#include <array>
#include <cmath>

namespace coneflow {

namespace {

// Right-hand side of the reduced flow system. The radius equation is
// self-contained, R' = (b^2)'(R) with b evaluated through the Green
// quadrature; W = log(b/b0) and U = log J are slaved integrals with no
// feedback into R. (Feeding an integrated copy of b back into R' would make
// the constraint B = b(R) exponentially unstable along the flow.)
struct FlowField {
    const GreenModel* model;

    void operator()(double /*t*/, std::span<const double> y, std::span<double> dy) const {
        const auto d = model->b_with_derivatives(y[0]);
        dy[0] = 2.0 * d.b * d.bp;                  // (b^2)'(R)
        dy[1] = 2.0 * d.bp * d.bp;                 // d/dt log b
        dy[2] = 2.0 * d.bp * d.bp + 2.0 * d.b * d.bpp; // (b^2)''(R), variational rate
    }
};

} // namespace

void FlowLine::require_time(double t) const {
    const double lo = std::min(0.0, t_max_);
    const double hi = std::max(0.0, t_max_);
    if (!(t >= lo && t <= hi))
        throw DomainError("FlowLine: time outside the integrated span");
}

double FlowLine::radius(double t) const {
    require_time(t);
    return traj_.at(t, 0);
}

double FlowLine::log_b_gain(double t) const {
    require_time(t);
    return traj_.at(t, 1);
}

double FlowLine::log_jacobian(double t) const {
    require_time(t);
    return traj_.at(t, 2);
}

double FlowLine::jacobian(double t) const {
    return std::exp(log_jacobian(t));
}

double FlowLine::b_along(double t) const {
    return b0_ * std::exp(log_b_gain(t));
}

FlowLine flow_line(const GreenModel& model, double r0, double t_max, const OdeSpec& spec) {
    FlowLine line;
    line.r0_ = r0;
    line.t_max_ = t_max;
    line.b0_ = model.b(r0); // also rejects r0 at or below the pole cutoff

    FlowField field{&model};
    const std::array<double, 3> y0{r0, 0.0, 0.0};
    line.traj_ = solve_ode(field, y0, 0.0, t_max, spec);
    return line;
}

MetricEigen metric_eigen(const GreenModel& model, const FlowLine& line, double t) {
    const auto& m = model.manifold();
    const auto y = line.trajectory().at(t);
    const double R = y[0], W = y[1], U = y[2];
    const double B = line.b_at_start() * std::exp(W);
    const double phi_R = m.profile.value(R);
    const double phi_r0 = m.profile.value(line.r0());

    MetricEigen e;
    e.t = t;
    e.e_rad = std::exp(2.0 * (U - W)) / (line.b_at_start() * line.b_at_start());
    e.e_sph = (phi_R * phi_R) / (phi_r0 * phi_r0 * B * B);
    return e;
}

double sup_log_ratio(const GreenModel& model, double r0, double t, double T,
                     const OdeSpec& spec) {
    if (!(0.0 < t && t < T))
        throw DomainError("sup_log_ratio: need 0 < t < T");
    const auto& prof = model.manifold().profile;
    const FlowLine line = flow_line(model, r0, T, spec);
    const auto yt = line.trajectory().at(t);
    const auto yT = line.trajectory().at(T);

    const double lr_rad = 2.0 * ((yT[2] - yT[1]) - (yt[2] - yt[1]));
    const double lr_sph =
        2.0 * (std::log(prof.value(yT[0]) / prof.value(yt[0])) - (yT[1] - yt[1]));
    return std::max(std::abs(lr_rad), std::abs(lr_sph));
}

GprimeResiduals check_gprime(const GreenModel& model, double r0, double t, double h,
                             const OdeSpec& spec) {
    if (!(h > 0.0) || !(t - h > 0.0))
        throw DomainError("check_gprime: need h > 0 and t - h > 0");
    const auto& m = model.manifold();
    const FlowLine line = flow_line(model, r0, t + h, spec);

    const MetricEigen e_minus = metric_eigen(model, line, t - h);
    const MetricEigen e_plus = metric_eigen(model, line, t + h);
    const double fd_rad = (e_plus.e_rad - e_minus.e_rad) / (2.0 * h);
    const double fd_sph = (e_plus.e_sph - e_minus.e_sph) / (2.0 * h);

    // analytic side of the derivative formula, pulled back to the base point
    const double R = line.radius(t);
    const double J = line.jacobian(t);
    const double bR = model.b(R);
    const HessEigenB2 hess = hessian_eigen_b2(model, R);
    const double gap = hess.lam_rad - hess.lam_sph;
    const double t_rad = (double(m.n - 1) / m.n) * gap;
    const double t_sph = -gap / m.n;
    const double phi_R = m.profile.value(R);
    const double phi_r0 = m.profile.value(r0);

    const double analytic_rad = 2.0 / (bR * bR) * J * J * t_rad;
    const double analytic_sph = 2.0 / (bR * bR) * (phi_R * phi_R) / (phi_r0 * phi_r0) * t_sph;

    return {std::abs(fd_rad - analytic_rad), std::abs(fd_sph - analytic_sph)};
}

TransportResiduals check_transport(const GreenModel& model, double r0, double t,
                                   const OdeSpec& spec) {
    const auto& m = model.manifold();
    const FlowLine line = flow_line(model, r0, t, spec);
    const double R = line.radius(t);

    TransportResiduals res;
    res.b_transport = std::abs(model.b(R) - line.b_along(t));

    const double bR = model.b(R);
    const double bpR = model.b_prime(R);
    const double b0 = model.b(r0);
    const double bp0 = model.b_prime(r0);
    const int n = m.n;
    const double direct =
        std::pow(m.profile.value(r0), n - 1) /
        (2.0 * bR * bpR * std::pow(m.profile.value(R), n - 1));
    const double via_b = std::pow(b0, n - 1) / (2.0 * bp0 * std::pow(bR, n));
    res.volume_form = std::abs(direct - via_b);
    return res;
}

} // namespace coneflow
