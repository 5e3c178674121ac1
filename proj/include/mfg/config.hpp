#pragma once

#include <string>
#include <vector>

#include "mfg/analysis.hpp"
#include "mfg/solver.hpp"

namespace mfg {

/// Flat key=value run configuration (TOML-style: comments with #, dotted
/// keys, [a,b,c] integer arrays, quoted or bare strings). Every key is
/// validated before any compute; unknown keys are errors naming the key.
struct RunConfig {
    int d = 1;
    int nx = 64;
    int nt = 64;
    double T = 1.0;

    std::string model = "quadratic";
    double q = 2.0;

    double r = 1.0;
    int max_iter = 5000;
    double tol = 1e-6;

    // Psi = const + cos*cos(2 pi x) + sin*sin(2 pi x) [+ _y terms in d=2]
    double psi_const = 0.0, psi_cos = 0.0, psi_sin = 0.0;
    double psi_cos_y = 0.0, psi_sin_y = 0.0;

    // m0 = 1 + cos*cos(2 pi x) + ... ("uniform" keeps the 1)
    std::string m0 = "uniform";
    double m0_cos = 0.0, m0_sin = 0.0;
    double m0_cos_y = 0.0, m0_sin_y = 0.0;

    std::string outdir = "out";
    long seed = 1;

    double t1 = 0.0;  // 0 -> T/8
    std::vector<int> delta_list = {1, 2, 4, 8};
    std::vector<int> eps_list = {1, 2, 4, 8};
    double rho = 1e-3;
};

/// Parse a config file. Throws std::runtime_error naming the offending key
/// on unknown keys or unparsable values.
RunConfig load_config(const std::string& path);

/// Materialize the problem (builds Psi and m0 on the grid and validates).
ProblemSpec build_problem(const RunConfig& cfg);

AnalysisConfig build_analysis(const RunConfig& cfg);

}  // namespace mfg
