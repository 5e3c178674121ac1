#include "mfg/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace mfg {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\''))) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::runtime_error("config key '" + key + "': expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return static_cast<int>(x);
    } catch (...) {
        throw std::runtime_error("config key '" + key + "': expected an integer, got '" + v + "'");
    }
}

std::vector<int> parse_int_list(const std::string& key, std::string v) {
    if (!v.empty() && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_int(key, item));
    }
    if (out.empty()) throw std::runtime_error("config key '" + key + "': empty list");
    return out;
}

}  // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file " + path);

    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string val = unquote(trim(line.substr(eq + 1)));

        if (key == "d") cfg.d = parse_int(key, val);
        else if (key == "Nx") cfg.nx = parse_int(key, val);
        else if (key == "Nt") cfg.nt = parse_int(key, val);
        else if (key == "T") cfg.T = parse_double(key, val);
        else if (key == "model") cfg.model = val;
        else if (key == "q") cfg.q = parse_double(key, val);
        else if (key == "r") cfg.r = parse_double(key, val);
        else if (key == "max_iter") cfg.max_iter = parse_int(key, val);
        else if (key == "tol") cfg.tol = parse_double(key, val);
        else if (key == "psi.const") cfg.psi_const = parse_double(key, val);
        else if (key == "psi.cos") cfg.psi_cos = parse_double(key, val);
        else if (key == "psi.sin") cfg.psi_sin = parse_double(key, val);
        else if (key == "psi.cos_y") cfg.psi_cos_y = parse_double(key, val);
        else if (key == "psi.sin_y") cfg.psi_sin_y = parse_double(key, val);
        else if (key == "m0") cfg.m0 = val;
        else if (key == "m0.cos") cfg.m0_cos = parse_double(key, val);
        else if (key == "m0.sin") cfg.m0_sin = parse_double(key, val);
        else if (key == "m0.cos_y") cfg.m0_cos_y = parse_double(key, val);
        else if (key == "m0.sin_y") cfg.m0_sin_y = parse_double(key, val);
        else if (key == "outdir") cfg.outdir = val;
        else if (key == "seed") cfg.seed = parse_int(key, val);
        else if (key == "t1") cfg.t1 = parse_double(key, val);
        else if (key == "delta_list") cfg.delta_list = parse_int_list(key, val);
        else if (key == "eps_list") cfg.eps_list = parse_int_list(key, val);
        else if (key == "rho") cfg.rho = parse_double(key, val);
        else throw std::runtime_error("unknown config key '" + key + "'");
    }

    if (cfg.model != "quadratic" && cfg.model != "power" && cfg.model != "entropy") {
        throw std::runtime_error("config key 'model': must be quadratic, power or entropy");
    }
    if (cfg.m0 != "uniform" && cfg.m0 != "fourier") {
        throw std::runtime_error("config key 'm0': must be uniform or fourier");
    }
    return cfg;
}

namespace {

ScalarField fourier_slice(const Grid& g, double c0, double c_cos, double c_sin, double c_cos_y,
                          double c_sin_y) {
    ScalarField f = ScalarField::spatial(g);
    const double tp = 2.0 * std::numbers::pi;
    for (int i = 0; i < g.n_space(); ++i) {
        double x = (g.d == 1 ? i : i % g.nx) * g.hx();
        double v = c0 + c_cos * std::cos(tp * x) + c_sin * std::sin(tp * x);
        if (g.d == 2) {
            double y = (i / g.nx) * g.hx();
            v += c_cos_y * std::cos(tp * y) + c_sin_y * std::sin(tp * y);
        }
        f.at(0, i) = v;
    }
    return f;
}

}  // namespace

ProblemSpec build_problem(const RunConfig& cfg) {
    ProblemSpec spec;
    spec.grid = Grid{cfg.d, cfg.nx, cfg.nt, cfg.T};
    spec.grid.validate();

    if (cfg.model == "quadratic") spec.model = CongestionModel::quadratic();
    else if (cfg.model == "power") spec.model = CongestionModel::power(cfg.q);
    else spec.model = CongestionModel::entropy();

    spec.psi = fourier_slice(spec.grid, cfg.psi_const, cfg.psi_cos, cfg.psi_sin, cfg.psi_cos_y,
                             cfg.psi_sin_y);
    if (cfg.m0 == "uniform") {
        spec.m0 = fourier_slice(spec.grid, 1.0, 0.0, 0.0, 0.0, 0.0);
    } else {
        spec.m0 = fourier_slice(spec.grid, 1.0, cfg.m0_cos, cfg.m0_sin, cfg.m0_cos_y, cfg.m0_sin_y);
    }
    spec.r = cfg.r;
    spec.max_iter = cfg.max_iter;
    spec.tol = cfg.tol;
    spec.validate();
    return spec;
}

AnalysisConfig build_analysis(const RunConfig& cfg) {
    AnalysisConfig a;
    a.t1 = cfg.t1;
    a.delta_cells = cfg.delta_list;
    a.eps_steps = cfg.eps_list;
    a.rho = cfg.rho;
    return a;
}

}  // namespace mfg
