#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nlrs/experiments.hpp"
#include "nlrs/functionals.hpp"
#include "nlrs/solver.hpp"

namespace nlrs::cli {

struct RunConfig {
    // [problem]
    double alpha = 0.4;
    int n = 1;
    double p = 2.0;
    double eps = 1.0;
    Frame frame = Frame::original;
    double L = 10.0;
    std::size_t N = 401;

    // [scope], [coeffs]
    ScopeSpec scope;
    CoeffSpec coeffs;

    // [solver]; solver.centers holds only the user-listed extra centers.
    SolverOptions solver = [] {
        SolverOptions s;
        s.centers.clear();
        return s;
    }();

    // [sweep]
    std::vector<double> eps_list{1.0, 0.5, 0.25};
    std::vector<double> radii{1.0, 0.5};
    double localization_R = 1.0;

    // [experiment]
    std::vector<std::pair<double, double>> qk_pairs{{1.0, 1.0}, {2.0, 1.0}, {1.0, 2.0}, {0.5, 1.5}};
    double ladder_L = 20.0;
    std::vector<std::size_t> ladder_N{801, 1601};
    double scaling_L = 20.0;
    std::size_t scaling_N = 801;
    ScanOptions scan;
    std::vector<Point> spot_checks{Point{0.0, 0.0}, Point{1.0, 0.0}, Point{3.0, 0.0}};
    std::size_t audit_samples = 1000;
    std::vector<double> audit_eps{1.0};
    double audit_L = 5.0;
    std::size_t audit_N = 101;

    // [output]
    std::filesystem::path out_dir = "out";

    ProblemSpec problem() const;
    std::vector<LadderRung> ladder() const;
    /// Throws std::invalid_argument naming the violated hypothesis.
    void validate() const;
};

/// Effective configuration as ordered section -> key -> value strings.
using ConfigEcho = std::map<std::string, std::map<std::string, std::string>>;

RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_string(const std::string& text);
ConfigEcho echo_config(const RunConfig& config);
/// INI text that parses back to an equivalent configuration.
std::string to_ini(const RunConfig& config);

}  // namespace nlrs::cli
