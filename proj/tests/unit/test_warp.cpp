#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "coneflow/warp.hpp"
#include "oracles.hpp"

using namespace coneflow;

namespace {

std::vector<double> log_grid(double lo, double hi, int count) {
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i)
        g[i] = lo * std::pow(hi / lo, double(i) / (count - 1));
    return g;
}

// Ricci eigenvalues assembled from finite differences of the spherical metric
// coefficient h(r) = phi(r)^2 alone; independent of the closed-form phi', phi''.
RicciPair ricci_from_metric_coefficient(const ModelManifold& m, double r) {
    auto h = [&m](double s) {
        const double phi = m.profile.value(s);
        return phi * phi;
    };
    const double step = 1e-5 * std::max(1.0, r);
    const double hv = h(r);
    const double hp = oracles::first_difference(h, r, step);
    const double hpp = oracles::second_difference(h, r, step);
    const double phi_ratio = hpp / (2.0 * hv) - hp * hp / (4.0 * hv * hv); // phi''/phi
    const double slope_sq = hp * hp / (4.0 * hv);                          // phi'^2
    return {-(m.n - 1) * phi_ratio, -phi_ratio + (m.n - 2) * (1.0 - slope_sq) / hv};
}

} // namespace

TEST_CASE("flat profile") {
    const ModelManifold m = make_profile(ProfileKind::euclid, 4);
    CHECK(m.profile.value(1.0) == 1.0);
    CHECK(m.profile.slope(1.0) == 1.0);
    CHECK(m.profile.curvature(1.0) == 0.0);
    const RicciPair ric = ricci_eigenvalues(m, 2.7);
    CHECK(ric.radial == 0.0);
    CHECK(ric.spherical == 0.0);
    CHECK(volume_ratio(m, 5.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.unit_ball_volume == doctest::Approx(std::numbers::pi * std::numbers::pi / 2));
}

TEST_CASE("cone profile") {
    const ModelManifold m = make_profile(ProfileKind::cone, 3, 0.5);
    CHECK(m.profile.value(2.0) == 1.0);
    const RicciPair ric = ricci_eigenvalues(m, 1.0);
    CHECK(ric.radial == 0.0);
    CHECK(ric.spherical == doctest::Approx(3.0).epsilon(1e-12));
    // limit of the volume ratio is alpha^{n-1}; on an exact cone it is attained
    CHECK(volume_ratio(m, 7.0) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("cone Ricci against the metric-coefficient oracle") {
    const ModelManifold m = make_profile(ProfileKind::cone, 3, 0.5);
    const RicciPair fd = ricci_from_metric_coefficient(m, 1.0);
    const RicciPair cf = ricci_eigenvalues(m, 1.0);
    CHECK_CLOSE(cf.radial, fd.radial, 1e-5);
    CHECK_CLOSE(cf.spherical, fd.spherical, 1e-5);
}

TEST_CASE("smoothed cone pole normalization") {
    const ModelManifold m = make_profile(ProfileKind::smoothed_cone, 4, 0.5, 1.0);
    CHECK(m.profile.value(0.0) == 0.0);
    CHECK(m.profile.slope(0.0) == 1.0);
}

TEST_CASE("smoothed cone Ricci against the metric-coefficient oracle") {
    const ModelManifold m = make_profile(ProfileKind::smoothed_cone, 4, 0.5, 1.0);
    for (double r : {0.3, 1.0, 2.5, 8.0}) {
        const RicciPair fd = ricci_from_metric_coefficient(m, r);
        const RicciPair cf = ricci_eigenvalues(m, r);
        CHECK_CLOSE(cf.radial, fd.radial, 1e-5);
        CHECK_CLOSE(cf.spherical, fd.spherical, 1e-5);
    }
}

TEST_CASE("nonnegative Ricci across the catalog") {
    const ModelManifold catalog[] = {
        make_profile(ProfileKind::euclid, 3),
        make_profile(ProfileKind::euclid, 6),
        make_profile(ProfileKind::cone, 3, 0.5),
        make_profile(ProfileKind::cone, 5, 0.9),
        make_profile(ProfileKind::smoothed_cone, 4, 0.5, 1.0),
        make_profile(ProfileKind::smoothed_cone, 4, 0.3, 1.0),
        make_profile(ProfileKind::smoothed_cone, 3, 0.9, 2.0),
    };
    for (const auto& m : catalog) {
        for (double r : log_grid(1e-2, 1e4, 40)) {
            const RicciPair ric = ricci_eigenvalues(m, r);
            CHECK(ric.radial >= -1e-10);
            CHECK(ric.spherical >= -1e-10);
        }
    }
}

TEST_CASE("smoothed cone slope stays within [alpha, 1] and is concave") {
    const ModelManifold m = make_profile(ProfileKind::smoothed_cone, 4, 0.5, 1.0);
    for (double r : log_grid(1e-2, 1e2, 60)) {
        CHECK(m.profile.curvature(r) <= 0.0);
        CHECK(m.profile.slope(r) >= 0.5 - 1e-14);
        CHECK(m.profile.slope(r) <= 1.0 + 1e-14);
    }
}

TEST_CASE("volume ratio limit and monotonicity for the smoothed cone") {
    const ModelManifold m = make_profile(ProfileKind::smoothed_cone, 4, 0.5, 1.0);
    CHECK_CLOSE(volume_ratio(m, 1e3), 0.125, 1e-3);
    double prev = 2.0;
    for (double r : {1.0, 10.0, 100.0, 1000.0}) {
        const double ratio = volume_ratio(m, r);
        CHECK(ratio <= prev + 1e-10);
        CHECK(ratio >= 0.125 - 1e-10);
        prev = ratio;
    }
}

TEST_CASE("volume ratio decreases along every cataloged profile") {
    const ModelManifold catalog[] = {
        make_profile(ProfileKind::cone, 3, 0.5),
        make_profile(ProfileKind::smoothed_cone, 4, 0.3, 1.0),
        make_profile(ProfileKind::smoothed_cone, 5, 0.8, 0.5),
    };
    for (const auto& m : catalog) {
        double prev = 1.0 + 1e-12;
        for (double r : log_grid(1e-2, 1e3, 25)) {
            const double ratio = volume_ratio(m, r);
            CHECK(ratio <= prev + 1e-10);
            CHECK(ratio >= std::pow(m.profile.alpha, m.n - 1) - 1e-10);
            prev = ratio;
        }
    }
}

TEST_CASE("profile validation") {
    CHECK_THROWS_AS(make_profile(ProfileKind::cone, 3, 1.5), ValidationError);
    CHECK_THROWS_AS(make_profile(ProfileKind::cone, 3, 0.0), ValidationError);
    CHECK_THROWS_AS(make_profile(ProfileKind::smoothed_cone, 4, 0.5, 0.0), ValidationError);
    CHECK_THROWS_AS(make_profile(ProfileKind::cone, 2, 0.5), ValidationError);
    CHECK_THROWS_AS(ricci_eigenvalues(make_profile(ProfileKind::euclid, 3), 0.0), DomainError);
    CHECK_THROWS_AS(volume_ratio(make_profile(ProfileKind::euclid, 3), -1.0), DomainError);

    try {
        make_profile(ProfileKind::smoothed_cone, 4, 1.5, 1.0);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("Ricci") != std::string::npos);
    }
}
