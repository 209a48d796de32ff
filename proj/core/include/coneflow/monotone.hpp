#pragma once

#include <array>
#include <string>
#include <vector>

#include "coneflow/flow.hpp"

namespace coneflow {

struct AreaA {
    double area; ///< Area({b = r}) = omega_{n-1} phi(r_b)^{n-1}
    double A;    ///< r^{1-n} * area * b'(r_b)^3
};

struct FitResult {
    bool degenerate = true; ///< fewer than 3 positive samples, or all below noise
    double exponent = 0.0;
    double rms_residual = 0.0;
};

/// Sampled monotone quantity plus its fitted log-log decay exponent.
struct DecayReport {
    std::string profile_id;
    std::vector<std::array<double, 2>> samples; ///< (abscissa, value), sorted
    FitResult fit;
    int monotonicity_violations = 0;
    double worst_violation = 0.0;
};

struct ShellBoundResult {
    double lhs;
    double rhs;
    bool satisfied; ///< lhs <= rhs + 1e-9
};

/// Area of the level set {b = level} and the monotone quantity
/// A = level^{1-n} int_{b=level} |grad b|^3 dsigma (exact by symmetry).
AreaA area_and_A(const GreenModel& model, double level);

/// H(level) = int_{b >= level} b^{-n} ||Hess_{b^2} - (Delta b^2/n) g||^2.
/// The integrand's tail decays faster than any power for the cataloged
/// profiles; the integral is truncated where the integrand falls below
/// 1e-16 of its running peak. Resolution floor is about 1e-18.
double hess_weighted_integral(const GreenModel& model, double level);

/// Both sides of the averaged log-ratio bound
///   sup |log g(t)/g(s)| <= sqrt(t-s) (2 r^{n-1}/Area * int ...)^{1/2}
/// over the flow shell between times s and t from the level set {b = level}.
ShellBoundResult log_ratio_shell_bound(const GreenModel& model, double level, double s, double t);

/// Rows (t, sup |log g(T)/g(t)|) at the base point b^{-1}(level) plus the
/// fitted log-log slope (the empirical -beta/2). Marked degenerate when every
/// left-hand side sits below 1e-9, the resolution floor of log-ratio
/// differences across long flow spans (exact fixed point as far as doubles
/// can tell).
DecayReport log_ratio_decay_table(const GreenModel& model, double level,
                               std::span<const double> t_grid, double T);

/// Rows (log(level/s_base), H(level)) plus the fitted slope of
/// log H against log log(level/s_base), the empirical -(1+beta).
DecayReport loj_decay_table(const GreenModel& model, std::span<const double> level_grid,
                            double s_base_level);

/// Ordinary least squares in log-log coordinates; degenerate with fewer than
/// 3 positive samples.
FitResult fit_decay(std::span<const std::array<double, 2>> samples);

} // namespace coneflow
