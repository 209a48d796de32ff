#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "coneflow/runner.hpp"

using namespace coneflow;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string first_line(const std::string& text) {
    return text.substr(0, text.find('\n'));
}

int row_count(const std::string& csv) {
    int lines = 0;
    for (char c : csv)
        lines += (c == '\n') ? 1 : 0;
    return lines - 1; // minus header
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    return dir;
}

const CheckResult* find_check(const SuiteReport& report, const std::string& name) {
    for (const auto& c : report.checks)
        if (c.name == name)
            return &c;
    return nullptr;
}

} // namespace

TEST_CASE("flat-space run passes every check with degenerate decay tables") {
    RunConfig cfg = parse_config_text("profile = euclid\nn = 4\n"
                                      "[grids]\nr_grid = log:0.1:100:12\n");
    const fs::path dir = fresh_dir("coneflow_test_euclid");
    const SuiteReport report = run(cfg, dir.string());

    CHECK(report.all_passed());
    CHECK(report.failures() == 0);
    REQUIRE(find_check(report, "decay.main_exponent") != nullptr);
    CHECK(find_check(report, "decay.main_exponent")->status == CheckStatus::degenerate);
    CHECK(find_check(report, "decay.loj_exponent")->status == CheckStatus::degenerate);

    CHECK(first_line(slurp(dir / "identities.csv")) == "r,laplace_residual,flux_residual,msy_ratio");
    CHECK(first_line(slurp(dir / "area.csv")) == "r,area,A");
    CHECK(first_line(slurp(dir / "flow.csv")) == "t,R,J,e_rad,e_sph");
    CHECK(first_line(slurp(dir / "decay_main.csv")) == "t,lhs,bound_fit");
    CHECK(first_line(slurp(dir / "decay_loj.csv")) == "r,log_ratio,H");
    CHECK(slurp(dir / "report.txt").find("fail") == std::string::npos);
}

TEST_CASE("cone run: msy ratio is the constant 4 and H vanishes") {
    RunConfig cfg = parse_config_text("profile = cone\nn = 3\nalpha = 0.5\n"
                                      "[grids]\nr_grid = log:0.1:100:12\n");
    const fs::path dir = fresh_dir("coneflow_test_cone");
    const SuiteReport report = run(cfg, dir.string());
    CHECK(report.all_passed());

    // every identities row carries msy_ratio = alpha^{1-n} = 4
    std::istringstream csv(slurp(dir / "identities.csv"));
    std::string line;
    std::getline(csv, line); // header
    int rows = 0;
    while (std::getline(csv, line)) {
        const double msy = std::strtod(line.substr(line.rfind(',') + 1).c_str(), nullptr);
        CHECK(std::abs(msy - 4.0) <= 1e-8);
        ++rows;
    }
    CHECK(rows == 12);
    CHECK(find_check(report, "decay.loj_exponent")->status == CheckStatus::degenerate);
}

TEST_CASE("smoothed-cone run produces decreasing decay tables") {
    RunConfig cfg = parse_config_text("profile = smoothed_cone\nn = 4\nalpha = 0.3\na = 1\n"
                                      "[grids]\nr_grid = log:0.25:8:12\n");
    const fs::path dir = fresh_dir("coneflow_test_smoothed");
    const SuiteReport report = run(cfg, dir.string());

    for (const auto& c : report.checks)
        CHECK(c.status != CheckStatus::fail);
    CHECK(find_check(report, "identities.laplace_max")->status == CheckStatus::pass);
    CHECK(find_check(report, "monotone.area_A_violations")->status == CheckStatus::pass);
    CHECK(find_check(report, "decay.main_violations")->status == CheckStatus::pass);
    CHECK(find_check(report, "decay.main_exponent")->measured < 0.0);

    CHECK(row_count(slurp(dir / "decay_main.csv")) >= 5);
    CHECK(row_count(slurp(dir / "decay_loj.csv")) >= 5);
}

TEST_CASE("identical configs produce byte-identical CSV output") {
    const std::string text = "profile = smoothed_cone\nn = 4\nalpha = 0.3\na = 1\n"
                             "[grids]\nr_grid = log:0.25:8:10\n";
    const fs::path dir1 = fresh_dir("coneflow_det_1");
    const fs::path dir2 = fresh_dir("coneflow_det_2");
    run(parse_config_text(text), dir1.string());
    run(parse_config_text(text), dir2.string());
    for (const char* name :
         {"identities.csv", "area.csv", "flow.csv", "decay_main.csv", "decay_loj.csv"}) {
        INFO(name);
        CHECK(slurp(dir1 / name) == slurp(dir2 / name));
    }
}

TEST_CASE("impossibly tight tolerances surface as failed checks, not crashes") {
    RunConfig cfg = parse_config_text("profile = smoothed_cone\nn = 4\nalpha = 0.5\n"
                                      "[grids]\nr_grid = log:0.5:8:6\n"
                                      "[tolerances]\nquad_abs_tol = 1e-30\nquad_rel_tol = 0\n"
                                      "quad_max_subdivisions = 64\n");
    const fs::path dir = fresh_dir("coneflow_test_failing");
    const SuiteReport report = run(cfg, dir.string());
    CHECK(!report.all_passed());
    CHECK(report.failures() > 0);
    CHECK(slurp(dir / "report.txt").find("fail") != std::string::npos);
}

TEST_CASE("output directory precedence: flag beats environment beats config") {
    const std::string text = "profile = euclid\nn = 3\n"
                             "[suites]\nflow = off\nmonotone = off\ndecay = off\n"
                             "[grids]\nr_grid = log:1:10:4\n"
                             "[output]\ndir = from_config\n";
    const fs::path env_dir = fresh_dir("coneflow_env_dir");
    setenv("CONEFLOW_OUT", env_dir.string().c_str(), 1);
    const SuiteReport via_env = run(parse_config_text(text));
    CHECK(via_env.out_dir == env_dir.string());
    CHECK(fs::exists(env_dir / "identities.csv"));

    const fs::path flag_dir = fresh_dir("coneflow_flag_dir");
    const SuiteReport via_flag = run(parse_config_text(text), flag_dir.string());
    CHECK(via_flag.out_dir == flag_dir.string());
    CHECK(fs::exists(flag_dir / "identities.csv"));
    unsetenv("CONEFLOW_OUT");
}

TEST_CASE("every enabled check appears exactly once") {
    RunConfig cfg = parse_config_text("profile = euclid\nn = 3\n"
                                      "[grids]\nr_grid = log:0.5:50:8\n");
    const fs::path dir = fresh_dir("coneflow_test_unique");
    const SuiteReport report = run(cfg, dir.string());
    std::vector<std::string> names;
    for (const auto& c : report.checks)
        names.push_back(c.name);
    std::sort(names.begin(), names.end());
    CHECK(std::adjacent_find(names.begin(), names.end()) == names.end());
    CHECK(names.size() == 17); // 4 identities + 4 flow + 5 monotone + 4 decay
}

TEST_CASE("report lines carry name, status, measured value, threshold") {
    RunConfig cfg = parse_config_text("profile = euclid\nn = 3\n"
                                      "[suites]\nflow = off\nmonotone = off\ndecay = off\n"
                                      "[grids]\nr_grid = log:1:10:4\n");
    const fs::path dir = fresh_dir("coneflow_test_report");
    const SuiteReport report = run(cfg, dir.string());
    REQUIRE(!report.checks.empty());

    std::istringstream rep(slurp(dir / "report.txt"));
    std::string line;
    std::size_t lines = 0;
    while (std::getline(rep, line)) {
        std::istringstream fields(line);
        std::string name, status, measured, threshold, extra;
        fields >> name >> status >> measured >> threshold;
        CHECK(!threshold.empty());
        CHECK(!(fields >> extra));
        CHECK((status == "pass" || status == "fail" || status == "degenerate"));
        ++lines;
    }
    CHECK(lines == report.checks.size());
}
