#include "coneflow/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace coneflow {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return s.substr(b, e - b);
}

double parse_number(const std::string& text, int line) {
    const std::string t = trim(text);
    if (t.empty())
        throw ParseError("empty numeric value", line);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw ParseError("malformed number '" + t + "'", line);
    return v;
}

long parse_integer(const std::string& text, int line) {
    const double v = parse_number(text, line);
    if (v != std::floor(v))
        throw ParseError("expected an integer, got '" + trim(text) + "'", line);
    return static_cast<long>(v);
}

bool parse_flag(const std::string& text, int line) {
    const std::string t = trim(text);
    if (t == "on" || t == "true" || t == "1")
        return true;
    if (t == "off" || t == "false" || t == "0")
        return false;
    throw ParseError("expected on/off, got '" + t + "'", line);
}

ProfileKind parse_profile(const std::string& text, int line) {
    const std::string t = trim(text);
    if (t == "euclid")
        return ProfileKind::euclid;
    if (t == "cone")
        return ProfileKind::cone;
    if (t == "smoothed_cone")
        return ProfileKind::smoothed_cone;
    throw ParseError("unknown profile '" + t + "' (euclid, cone, smoothed_cone)", line);
}

std::vector<double> parse_grid_at(const std::string& text, int line) {
    std::vector<std::string> parts;
    std::stringstream ss(trim(text));
    std::string item;
    while (std::getline(ss, item, ':'))
        parts.push_back(item);
    if (parts.size() != 4 || parts[0] != "log")
        throw ParseError("grid must have the form log:START:STOP:COUNT", line);
    const double start = parse_number(parts[1], line);
    const double stop = parse_number(parts[2], line);
    const long count = parse_integer(parts[3], line);
    if (!(start > 0.0) || count < 1)
        throw ParseError("grid needs START > 0 and COUNT >= 1", line);
    if (count == 1) {
        if (stop != start)
            throw ParseError("single-point grid needs STOP == START", line);
        return {start};
    }
    if (!(stop > start))
        throw ParseError("grid must be increasing (STOP > START)", line);
    std::vector<double> values(count);
    const double ratio = stop / start;
    for (long i = 0; i < count; ++i)
        values[i] = start * std::pow(ratio, double(i) / double(count - 1));
    return values;
}

} // namespace

std::vector<double> parse_grid(const std::string& text) {
    return parse_grid_at(text, 0);
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    cfg.r_grid = parse_grid_at("log:0.1:1000:50", 0);
    cfg.t_grid = parse_grid_at("log:1:16:5", 0);

    bool profile_seen = false;
    bool alpha_seen = false;
    std::string section;
    std::set<std::string> seen;

    std::istringstream stream(text);
    std::string raw;
    int line = 0;
    while (std::getline(stream, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos)
            raw = raw.substr(0, hash);
        const std::string s = trim(raw);
        if (s.empty())
            continue;

        if (s.front() == '[') {
            if (s.back() != ']')
                throw ParseError("unterminated section header", line);
            section = trim(s.substr(1, s.size() - 2));
            if (section != "suites" && section != "grids" && section != "tolerances" &&
                section != "output")
                throw ParseError("unknown section [" + section + "]", line);
            continue;
        }

        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key = value", line);
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty())
            throw ParseError("empty key", line);
        if (!seen.insert(section + "/" + key).second)
            throw ParseError("duplicate key '" + key + "'", line);

        if (section.empty()) {
            if (key == "profile") {
                cfg.profile = parse_profile(value, line);
                profile_seen = true;
            } else if (key == "n") {
                cfg.n = static_cast<int>(parse_integer(value, line));
            } else if (key == "alpha") {
                cfg.alpha = parse_number(value, line);
                alpha_seen = true;
            } else if (key == "a") {
                cfg.a = parse_number(value, line);
            } else {
                throw ParseError("unknown key '" + key + "'", line);
            }
        } else if (section == "suites") {
            if (key == "identities")
                cfg.suite_identities = parse_flag(value, line);
            else if (key == "flow")
                cfg.suite_flow = parse_flag(value, line);
            else if (key == "monotone")
                cfg.suite_monotone = parse_flag(value, line);
            else if (key == "decay")
                cfg.suite_decay = parse_flag(value, line);
            else
                throw ParseError("unknown key '" + key + "' in [suites]", line);
        } else if (section == "grids") {
            if (key == "r_grid")
                cfg.r_grid = parse_grid_at(value, line);
            else if (key == "t_grid")
                cfg.t_grid = parse_grid_at(value, line);
            else if (key == "T")
                cfg.T = parse_number(value, line);
            else
                throw ParseError("unknown key '" + key + "' in [grids]", line);
        } else if (section == "tolerances") {
            if (key == "quad_abs_tol")
                cfg.quad.abs_tol = parse_number(value, line);
            else if (key == "quad_rel_tol")
                cfg.quad.rel_tol = parse_number(value, line);
            else if (key == "quad_tail_radius")
                cfg.quad.tail_radius = parse_number(value, line);
            else if (key == "quad_max_subdivisions")
                cfg.quad.max_subdivisions = static_cast<int>(parse_integer(value, line));
            else if (key == "ode_rel_tol")
                cfg.ode.rel_tol = parse_number(value, line);
            else if (key == "ode_abs_tol")
                cfg.ode.abs_tol = parse_number(value, line);
            else if (key == "ode_max_step")
                cfg.ode.max_step = parse_number(value, line);
            else
                throw ParseError("unknown key '" + key + "' in [tolerances]", line);
        } else { // output
            if (key == "dir")
                cfg.out_dir = value;
            else
                throw ParseError("unknown key '" + key + "' in [output]", line);
        }
    }

    if (!profile_seen)
        throw ParseError("missing required key 'profile'", 0);
    if (cfg.profile == ProfileKind::euclid && !alpha_seen)
        cfg.alpha = 1.0;
    if (!(cfg.T > cfg.t_grid.back()))
        throw ParseError("need T > max(t_grid)", 0);

    // full validation of profile parameters and tolerances
    cfg.manifold();
    cfg.quad.validate();
    cfg.ode.validate();
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open config file '" + path + "'", 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace coneflow
