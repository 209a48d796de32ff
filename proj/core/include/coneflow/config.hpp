#pragma once

#include <string>
#include <vector>

#include "coneflow/numerics.hpp"
#include "coneflow/warp.hpp"

namespace coneflow {

/// Fully validated description of one experiment run.
///
/// Parsed from a strict line-oriented "key = value" file with [section]
/// headers; unknown keys, unknown sections, duplicate keys, and malformed
/// numbers are rejected with the offending line number.
struct RunConfig {
    ProfileKind profile = ProfileKind::euclid;
    int n = 4;
    double alpha = 1.0;
    double a = 1.0;

    bool suite_identities = true;
    bool suite_flow = true;
    bool suite_monotone = true;
    bool suite_decay = true;

    std::vector<double> r_grid; ///< geodesic radii, increasing
    std::vector<double> t_grid; ///< flow times, increasing
    double T = 64.0;            ///< reference time of the decay experiment

    QuadSpec quad;
    OdeSpec ode;

    std::string out_dir = "out";

    ModelManifold manifold() const { return make_profile(profile, n, alpha, a); }
};

/// Grid shorthand "log:START:STOP:COUNT": COUNT log-spaced points
/// START * (STOP/START)^{i/(COUNT-1)}.
std::vector<double> parse_grid(const std::string& text);

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

} // namespace coneflow
