#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfg/config.hpp"
#include "mfg/io.hpp"

namespace fs = std::filesystem;
using namespace mfg;

namespace {

int run_solve(const std::string& config_path) {
    RunConfig cfg;
    ProblemSpec spec;
    try {
        cfg = load_config(config_path);
        spec = build_problem(cfg);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    SolveResult res = solve(spec);
    try {
        fs::create_directories(cfg.outdir);
        write_scalar_field(cfg.outdir + "/m.field", res.primal.m, "m");
        write_vector_field(cfg.outdir + "/w.field", res.primal.w, "w");
        write_scalar_field(cfg.outdir + "/u.field", res.dual.u, "u");
        write_scalar_field(cfg.outdir + "/p.field", res.dual.p, "p");
        write_solve_report(cfg.outdir + "/solve_report.json", res.report);
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return 1;
    }
    std::cout << "iterations=" << res.report.iterations << " gap=" << res.report.gap
              << " converged=" << (res.report.converged ? "yes" : "no") << "\n";
    return res.report.converged ? 0 : 2;
}

int run_analyze(const std::string& dir, const std::string& config_path) {
    RunConfig cfg;
    ProblemSpec spec;
    AnalysisConfig acfg;
    PrimalState primal;
    try {
        cfg = load_config(config_path);
        spec = build_problem(cfg);
        acfg = build_analysis(cfg);
        primal.m = read_scalar_field(dir + "/m.field");
        primal.w = read_vector_field(dir + "/w.field");
        if (!(primal.m.grid == spec.grid)) {
            throw std::runtime_error("field grid does not match config");
        }
    } catch (const std::exception& e) {
        std::cerr << "analyze error: " << e.what() << "\n";
        return 1;
    }

    AnalysisReport rep = analyze(spec, primal, acfg);
    try {
        write_analysis_report(dir + "/analysis_report.json", rep);
        std::vector<std::vector<double>> rows;
        for (size_t i = 0; i < rep.translation.delta_cells.size(); ++i) {
            rows.push_back({rep.translation.delta_cells[i], rep.translation.M[i]});
        }
        write_csv(dir + "/translation.csv", "delta,M", rows);
        rows.clear();
        for (size_t i = 0; i < rep.time_translation.eps.size(); ++i) {
            rows.push_back({rep.time_translation.eps[i], rep.time_translation.B[i]});
        }
        write_csv(dir + "/time_translation.csv", "eps,B", rows);
        rows.clear();
        for (size_t i = 0; i < rep.dseries.t.size(); ++i) {
            rows.push_back({rep.dseries.t[i], rep.dseries.D[i]});
        }
        write_csv(dir + "/dseries.csv", "t,D", rows);
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return 1;
    }

    // gate: every margin within its desk tolerance
    std::string failing;
    if (!(rep.space_fit.flat || rep.space_fit.slope >= 1.8)) failing = "space_slope";
    else if (!(rep.dseries.dispersion <= 0.05)) failing = "d_dispersion";
    else if (!(rep.terminal.margin >= -0.05 * std::max(1.0, std::abs(rep.terminal.rhs)))) {
        failing = "terminal_margin";
    } else if (!(rep.time_translation.fit.flat || rep.time_translation.fit.slope >= 1.8)) {
        failing = "time_slope";
    } else if (!(rep.audit.matched_floor || rep.audit.selected_sign == +1)) {
        failing = "dilation_sign";
    }
    if (!failing.empty()) {
        std::cerr << "analysis check failed: " << failing << "\n";
        return 3;
    }
    std::cout << "analysis ok: space_slope=" << rep.space_fit.slope
              << " dispersion=" << rep.dseries.dispersion
              << " terminal_margin=" << rep.terminal.margin << "\n";
    return 0;
}

double prox_objective(const CongestionModel& model, double tau, double at, double bt, double a,
                      double b) {
    return 0.5 * (a - at) * (a - at) + 0.5 * (b - bt) * (b - bt) +
           tau * model.conj(-a + 0.5 * b * b);
}

bool check_one_model(const CongestionModel& model, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> um(0.0, 5.0), up(-4.0, 4.0), ut(0.1, 3.0);
    bool ok = true;

    // Fenchel-Young and (QP) on a large random sample
    for (int s = 0; s < 100000; ++s) {
        double m = um(rng), p = up(rng);
        if (model.G(m) + model.conj(p) - m * p < -1e-10) {
            std::cerr << model.name() << ": Fenchel-Young violated at m=" << m << " p=" << p
                      << "\n";
            ok = false;
            break;
        }
        if (model.qp_gap(m, p) < -1e-10) {
            std::cerr << model.name() << ": (QP) violated at m=" << m << " p=" << p << "\n";
            ok = false;
            break;
        }
    }

    // prox against a dense-grid brute force
    for (int s = 0; s < 100 && ok; ++s) {
        double tau = ut(rng), at = up(rng), bt = up(rng);
        ProxResult pr = prox_hamiltonian(model, tau, at, {bt, 0.0}, 1);
        double fo = prox_objective(model, tau, at, bt, pr.a, pr.b[0]);
        double alo = at - 2.0, ahi = at + 2.0 + 2.0 * tau;
        double blo = -std::abs(bt) - 2.0, bhi = std::abs(bt) + 2.0;
        double best = 1e300, ba = 0.0, bb = 0.0;
        for (int pass = 0; pass < 3; ++pass) {
            const int ng = 200;
            for (int ia = 0; ia <= ng; ++ia) {
                double a = alo + (ahi - alo) * ia / ng;
                for (int ib = 0; ib <= ng; ++ib) {
                    double b = blo + (bhi - blo) * ib / ng;
                    double f = prox_objective(model, tau, at, bt, a, b);
                    if (f < best) {
                        best = f;
                        ba = a;
                        bb = b;
                    }
                }
            }
            double wa = (ahi - alo) / 200 * 4, wb = (bhi - blo) / 200 * 4;
            alo = ba - wa;
            ahi = ba + wa;
            blo = bb - wb;
            bhi = bb + wb;
        }
        if (fo > best + 1e-8) {
            std::cerr << model.name() << ": prox beaten by grid search (" << fo << " vs " << best
                      << ")\n";
            ok = false;
        }
        if (pr.lambda < 0.0) {
            std::cerr << model.name() << ": negative density from prox\n";
            ok = false;
        }
    }

    std::vector<double> samples;
    std::uniform_real_distribution<double> us(1e-3, 10.0);
    for (int s = 0; s < 64; ++s) samples.push_back(us(rng));
    double hc = hpol_margin(model, 0.5, samples);

    std::cout << model.name() << ": c=" << model.qp_constant() << " hpol_C=" << hc
              << (ok ? " ok" : " FAILED") << "\n";
    return ok;
}

int run_check_models(const std::vector<std::string>& models, long seed) {
    std::mt19937_64 rng(static_cast<uint64_t>(seed));
    bool all_ok = true;
    for (const std::string& name : models) {
        if (name == "quadratic") {
            all_ok &= check_one_model(CongestionModel::quadratic(), rng);
        } else if (name == "power") {
            for (double q : {1.5, 2.0, 3.0}) {
                all_ok &= check_one_model(CongestionModel::power(q), rng);
            }
        } else if (name == "entropy") {
            all_ok &= check_one_model(CongestionModel::entropy(), rng);
        } else {
            std::cerr << "unknown model '" << name << "'\n";
            return 1;
        }
    }
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"variational MFG solver and regularity workbench"};
    app.require_subcommand(1);

    if (const char* th = std::getenv("MFGLAB_THREADS")) {
        (void)th;  // compute kernels are single-threaded at desk scale
    }

    std::string config_path, dir;
    auto* solve_cmd = app.add_subcommand("solve", "solve an instance and dump fields");
    solve_cmd->add_option("config", config_path, "config file")->required();

    auto* analyze_cmd = app.add_subcommand("analyze", "run the regularity experiments");
    analyze_cmd->add_option("dir", dir, "solution directory")->required();
    analyze_cmd->add_option("config", config_path, "config file")->required();

    std::vector<std::string> models = {"quadratic", "power", "entropy"};
    long seed = 1;
    auto* check_cmd = app.add_subcommand("check-models", "congestion model property suite");
    check_cmd->add_option("--model", models, "models to check");
    check_cmd->add_option("--seed", seed, "random seed");

    CLI11_PARSE(app, argc, argv);

    if (solve_cmd->parsed()) return run_solve(config_path);
    if (analyze_cmd->parsed()) return run_analyze(dir, config_path);
    return run_check_models(models, seed);
}
