#include "coneflow/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace coneflow {

void QuadSpec::validate() const {
    if (!(abs_tol >= 0.0) || !(rel_tol >= 0.0) || !(abs_tol + rel_tol > 0.0))
        throw ValidationError("QuadSpec: need abs_tol, rel_tol >= 0 and abs_tol + rel_tol > 0");
    if (!(tail_radius > 0.0))
        throw ValidationError("QuadSpec: tail_radius must be positive");
    if (max_subdivisions < 1)
        throw ValidationError("QuadSpec: max_subdivisions must be at least 1");
}

double ConicalTail::value_at(double s) const {
    return coefficient * std::pow(s + offset, 1 - decay_dimension);
}

double ConicalTail::integral_from(double s) const {
    if (decay_dimension <= 2)
        throw DivergenceError("conical tail c*s^(1-n) with n <= 2 does not converge");
    return coefficient * std::pow(s + offset, 2 - decay_dimension) / (decay_dimension - 2);
}

namespace {

// Gauss 7 / Kronrod 15 on [-1, 1]: {node, gauss weight, kronrod weight}.
// Rows 0-3 are the nonnegative Gauss nodes (shared), rows 4-7 Kronrod-only.
constexpr double kGK[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

struct PanelResult {
    double value = 0.0;
    double error = 0.0;
};

PanelResult gk15(const ScalarFn& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double samples[15];
    const double f0 = f(mid);
    samples[0] = f0;
    double g7 = kGK[0][1] * f0;
    double k15 = kGK[0][2] * f0;
    int idx = 1;
    for (int i = 1; i < 8; ++i) {
        const double dx = half * kGK[i][0];
        const double fp = f(mid + dx);
        const double fm = f(mid - dx);
        samples[idx++] = fp;
        samples[idx++] = fm;
        g7 += kGK[i][1] * (fp + fm);
        k15 += kGK[i][2] * (fp + fm);
    }
    g7 *= half;
    k15 *= half;

    // QUADPACK-style scale-aware error estimate.
    const double mean = k15 / (b - a);
    double resasc = kGK[0][2] * std::abs(f0 - mean);
    idx = 1;
    for (int i = 1; i < 8; ++i) {
        resasc += kGK[i][2] * (std::abs(samples[idx] - mean) + std::abs(samples[idx + 1] - mean));
        idx += 2;
    }
    resasc *= std::abs(half);

    double err = std::abs(k15 - g7);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));

    if (!std::isfinite(k15))
        throw DomainError("quadrature: integrand produced a non-finite value");
    return {k15, err};
}

struct Panel {
    double a, b;
    double value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

} // namespace

double integrate(const ScalarFn& f, double a, double b, const QuadSpec& spec) {
    spec.validate();
    if (a == b)
        return 0.0;
    if (a > b)
        throw DomainError("integrate: need a <= b");

    std::priority_queue<Panel> panels;
    PanelResult whole = gk15(f, a, b);
    panels.push({a, b, whole.value, whole.error});
    double total = whole.value;
    double total_err = whole.error;

    int used = 1;
    while (total_err > spec.abs_tol + spec.rel_tol * std::abs(total)) {
        if (used >= spec.max_subdivisions)
            throw AccuracyError("integrate: max_subdivisions exhausted before reaching tolerance");
        Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
            throw AccuracyError("integrate: interval too small to subdivide further");
        PanelResult left = gk15(f, worst.a, mid);
        PanelResult right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        panels.push({worst.a, mid, left.value, left.error});
        panels.push({mid, worst.b, right.value, right.error});
        ++used;
    }
    return total;
}

double integrate_to_infinity(const ScalarFn& f, double lower, const ConicalTail& tail,
                             const QuadSpec& spec) {
    spec.validate();
    if (tail.decay_dimension <= 2)
        throw DivergenceError(
            "integrate_to_infinity: tail decays no faster than s^-1, integral diverges");
    const double split = std::max(lower, spec.tail_radius);
    double head = 0.0;
    if (split > lower)
        head = integrate(f, lower, split, spec);
    return head + tail.integral_from(split);
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)
// ---------------------------------------------------------------------------

void OdeSpec::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw ValidationError("OdeSpec: rel_tol and abs_tol must be positive");
    if (!(max_step > 0.0))
        throw ValidationError("OdeSpec: max_step must be positive");
}

namespace dp5 {

constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;

constexpr double a21 = 0.2;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;

constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// Continuous extension (quartic in the step fraction).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double safe = 0.9;
constexpr double facl = 0.2;  // min shrink of 1/5
constexpr double facr = 10.0; // max growth of 10
constexpr double beta = 0.04; // Lund stabilization (PI control)

} // namespace dp5

std::span<const double> OdeTrajectory::state(std::size_t i) const {
    return {states_.data() + i * dim_, dim_};
}

std::size_t OdeTrajectory::locate(double t) const {
    const bool fwd = times_.back() >= times_.front();
    if (fwd ? (t < times_.front() || t > times_.back())
            : (t > times_.front() || t < times_.back()))
        throw DomainError("OdeTrajectory: evaluation time outside the integrated span");
    // first node strictly past t, segment is the one before it
    std::size_t lo = 0, hi = times_.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (fwd ? (times_[mid] <= t) : (times_[mid] >= t))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

std::vector<double> OdeTrajectory::at(double t) const {
    std::vector<double> out(dim_);
    // exact node hits return the stored values
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (times_[i] == t) {
            auto s = state(i);
            std::copy(s.begin(), s.end(), out.begin());
            return out;
        }
    }
    if (!dense_)
        throw Error("OdeTrajectory: dense output disabled; only node times are available");
    const std::size_t seg = locate(t);
    const double t0 = times_[seg];
    const double h = times_[seg + 1] - t0;
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    const double* rc = rcont_.data() + seg * 5 * dim_;
    for (std::size_t d = 0; d < dim_; ++d) {
        out[d] = rc[d] +
                 th * (rc[dim_ + d] +
                       th1 * (rc[2 * dim_ + d] + th * (rc[3 * dim_ + d] + th1 * rc[4 * dim_ + d])));
    }
    return out;
}

double OdeTrajectory::at(double t, std::size_t component) const {
    return at(t)[component];
}

namespace {

double error_norm(std::span<const double> err, std::span<const double> y,
                  std::span<const double> ynew, const OdeSpec& spec) {
    double acc = 0.0;
    for (std::size_t d = 0; d < err.size(); ++d) {
        const double sc = spec.abs_tol + spec.rel_tol * std::max(std::abs(y[d]), std::abs(ynew[d]));
        const double q = err[d] / sc;
        acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
}

double initial_step(const OdeField& f, double t0, std::span<const double> y,
                    std::span<const double> k1, double direction, const OdeSpec& spec) {
    const std::size_t n = y.size();
    double dnf = 0.0, dny = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
        const double sc = spec.abs_tol + spec.rel_tol * std::abs(y[d]);
        dnf += (k1[d] / sc) * (k1[d] / sc);
        dny += (y[d] / sc) * (y[d] / sc);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
    h = std::min(h, spec.max_step);
    h *= direction;

    // one explicit Euler step to estimate the second derivative
    std::vector<double> y1(n), k2(n);
    for (std::size_t d = 0; d < n; ++d)
        y1[d] = y[d] + h * k1[d];
    f(t0 + h, y1, k2);
    double der2 = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
        const double sc = spec.abs_tol + spec.rel_tol * std::abs(y[d]);
        const double q = (k2[d] - k1[d]) / sc;
        der2 += q * q;
    }
    der2 = std::sqrt(der2) / std::abs(h);
    const double der12 = std::max(der2, std::sqrt(dnf));
    const double h1 =
        (der12 <= 1e-15) ? std::max(1e-6, std::abs(h) * 1e-3) : std::pow(0.01 / der12, 0.2);
    return direction * std::min({100.0 * std::abs(h), h1, spec.max_step});
}

} // namespace

OdeTrajectory solve_ode(const OdeField& f, std::span<const double> y0, double t0, double t1,
                        const OdeSpec& spec) {
    spec.validate();
    const std::size_t n = y0.size();
    if (n == 0)
        throw ValidationError("solve_ode: empty state");

    OdeTrajectory traj;
    traj.dim_ = n;
    traj.dense_ = spec.dense_output;
    traj.times_.push_back(t0);
    traj.states_.assign(y0.begin(), y0.end());
    if (t1 == t0)
        return traj;

    const double direction = (t1 > t0) ? 1.0 : -1.0;
    std::vector<double> y(y0.begin(), y0.end());
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    std::vector<double> ytmp(n), ynew(n), ee(n);

    double t = t0;
    double h;
    try {
        f(t, y, k1);
        h = initial_step(f, t0, y, k1, direction, spec);
    } catch (const DomainError& e) {
        throw IntegrationError(std::string("solve_ode: ") + e.what(), t0);
    }
    double facold = 1e-4;
    bool rejected = false;
    long step_budget = 10'000'000;

    while (direction * (t1 - t) > 0.0) {
        if (--step_budget < 0)
            throw IntegrationError("solve_ode: step budget exhausted", t);
        if (0.1 * std::abs(h) <= std::abs(t) * std::numeric_limits<double>::epsilon())
            throw IntegrationError("solve_ode: step size underflow", t);

        bool last = false;
        if (direction * (t + 1.01 * h - t1) > 0.0) {
            h = t1 - t;
            last = true;
        }

        using namespace dp5;
        try {
            for (std::size_t d = 0; d < n; ++d)
                ytmp[d] = y[d] + h * a21 * k1[d];
            f(t + c2 * h, ytmp, k2);
            for (std::size_t d = 0; d < n; ++d)
                ytmp[d] = y[d] + h * (a31 * k1[d] + a32 * k2[d]);
            f(t + c3 * h, ytmp, k3);
            for (std::size_t d = 0; d < n; ++d)
                ytmp[d] = y[d] + h * (a41 * k1[d] + a42 * k2[d] + a43 * k3[d]);
            f(t + c4 * h, ytmp, k4);
            for (std::size_t d = 0; d < n; ++d)
                ytmp[d] = y[d] + h * (a51 * k1[d] + a52 * k2[d] + a53 * k3[d] + a54 * k4[d]);
            f(t + c5 * h, ytmp, k5);
            for (std::size_t d = 0; d < n; ++d)
                ytmp[d] = y[d] + h * (a61 * k1[d] + a62 * k2[d] + a63 * k3[d] + a64 * k4[d] +
                                      a65 * k5[d]);
            f(t + h, ytmp, k6);
            for (std::size_t d = 0; d < n; ++d)
                ynew[d] = y[d] + h * (a71 * k1[d] + a73 * k3[d] + a74 * k4[d] + a75 * k5[d] +
                                      a76 * k6[d]);
            f(t + h, ynew, k7);
        } catch (const DomainError& e) {
            // the field left its domain mid-step; report the last valid time
            throw IntegrationError(std::string("solve_ode: ") + e.what(), t);
        }

        for (std::size_t d = 0; d < n; ++d)
            ee[d] = h * (e1 * k1[d] + e3 * k3[d] + e4 * k4[d] + e5 * k5[d] + e6 * k6[d] +
                         e7 * k7[d]);
        double err = error_norm(ee, y, ynew, spec);

        if (!std::isfinite(err)) {
            h *= 0.1;
            rejected = true;
            continue;
        }

        const double fac11 = std::pow(err, 0.2 - beta * 0.75);
        double fac = fac11 / std::pow(facold, beta);
        fac = std::max(1.0 / facr, std::min(1.0 / facl, fac / safe));
        double hnew = h / fac;

        if (err > 1.0) {
            h /= std::min(1.0 / facl, fac11 / safe);
            rejected = true;
            continue;
        }

        // step accepted
        facold = std::max(err, 1e-4);
        if (spec.dense_output) {
            const std::size_t base = traj.rcont_.size();
            traj.rcont_.resize(base + 5 * n);
            double* rc = traj.rcont_.data() + base;
            for (std::size_t d = 0; d < n; ++d) {
                const double ydiff = ynew[d] - y[d];
                const double bspl = h * k1[d] - ydiff;
                rc[d] = y[d];
                rc[n + d] = ydiff;
                rc[2 * n + d] = bspl;
                rc[3 * n + d] = ydiff - h * k7[d] - bspl;
                rc[4 * n + d] = h * (d1 * k1[d] + d3 * k3[d] + d4 * k4[d] + d5 * k5[d] +
                                     d6 * k6[d] + d7 * k7[d]);
            }
        }

        t = last ? t1 : t + h;
        y.swap(ynew);
        k1.swap(k7);
        traj.times_.push_back(t);
        traj.states_.insert(traj.states_.end(), y.begin(), y.end());

        if (rejected)
            hnew = direction * std::min(std::abs(hnew), std::abs(h));
        rejected = false;
        h = direction * std::min(std::abs(hnew), spec.max_step);
    }
    return traj;
}

} // namespace coneflow
