#include "mfg/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mfg {

namespace {

int slices_for(const Grid& g, const std::string& kind) {
    if (kind == "m" || kind == "u") return g.nt + 1;
    if (kind == "p" || kind == "w") return g.nt;
    throw std::invalid_argument("unknown field kind: " + kind);
}

void write_header(std::ostream& os, const Grid& g, const std::string& kind) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "MFGGRID %d %d %d %.17g %s\n", g.d, g.nx, g.nt, g.T,
                  kind.c_str());
    os << buf;
}

Grid read_header(std::istream& is, std::string& kind) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("malformed field file");
    std::istringstream ss(line);
    std::string magic;
    Grid g;
    if (!(ss >> magic >> g.d >> g.nx >> g.nt >> g.T >> kind) || magic != "MFGGRID") {
        throw std::runtime_error("malformed field file");
    }
    g.validate();
    return g;
}

void write_payload(std::ostream& os, const std::vector<double>& v) {
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_payload(std::istream& is, std::vector<double>& v) {
    is.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (static_cast<size_t>(is.gcount()) != v.size() * sizeof(double)) {
        throw std::runtime_error("malformed field file");
    }
}

}  // namespace

void write_scalar_field(const std::string& path, const ScalarField& f, const std::string& kind) {
    if (f.nt_slices != slices_for(f.grid, kind)) {
        throw std::invalid_argument("field shape does not match kind " + kind);
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    write_header(os, f.grid, kind);
    write_payload(os, f.v);
}

void write_vector_field(const std::string& path, const VectorField& f, const std::string& kind) {
    if (kind != "w" || f.nt_slices != f.grid.nt) {
        throw std::invalid_argument("vector dumps support kind w on intervals");
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    write_header(os, f.grid, kind);
    write_payload(os, f.v);
}

ScalarField read_scalar_field(const std::string& path, std::string* kind_out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string kind;
    Grid g = read_header(is, kind);
    if (kind == "w") throw std::runtime_error("malformed field file");
    ScalarField f(g, slices_for(g, kind));
    read_payload(is, f.v);
    if (kind_out) *kind_out = kind;
    return f;
}

VectorField read_vector_field(const std::string& path, std::string* kind_out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string kind;
    Grid g = read_header(is, kind);
    if (kind != "w") throw std::runtime_error("malformed field file");
    VectorField f = VectorField::intervals(g);
    read_payload(is, f.v);
    if (kind_out) *kind_out = kind;
    return f;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << header << "\n";
    char buf[64];
    for (const auto& row : rows) {
        for (size_t j = 0; j < row.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", row[j]);
            os << (j ? "," : "") << buf;
        }
        os << "\n";
    }
}

void write_solve_report(const std::string& path, const SolveReport& rep) {
    nlohmann::ordered_json j;
    j["iterations"] = rep.iterations;
    j["converged"] = rep.converged;
    j["primal_value"] = rep.primal_value;
    j["dual_value"] = rep.dual_value;
    j["gap"] = rep.gap;
    j["relative_gap"] = rep.relative_gap;
    j["splitting_residual"] = rep.splitting_residual;
    j["continuity"] = rep.continuity;
    j["comp_price"] = rep.comp_price;
    j["comp_kinetic"] = rep.comp_kinetic;
    j["gap_history"] = rep.gap_history;
    j["residual_history"] = rep.residual_history;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << j.dump(2) << "\n";
}

void write_analysis_report(const std::string& path, const AnalysisReport& rep) {
    nlohmann::ordered_json j;
    j["translation"] = {{"delta_cells", rep.translation.delta_cells},
                        {"M", rep.translation.M},
                        {"M0", rep.translation.M0},
                        {"min_density", rep.translation.min_density},
                        {"max_mass_drift", rep.translation.max_mass_drift}};
    j["space_fit"] = {{"slope", rep.space_fit.slope},
                      {"residual", rep.space_fit.residual},
                      {"flat", rep.space_fit.flat}};
    j["h1"] = {{"delta_cells", rep.h1.delta_cells},
               {"space_quotient", rep.h1.space_quotient},
               {"eps_steps", rep.h1.eps_steps},
               {"time_quotient", rep.h1.time_quotient},
               {"max_space", rep.h1.max_space},
               {"max_time", rep.h1.max_time}};
    j["D"] = {{"t", rep.dseries.t},
              {"values", rep.dseries.D},
              {"mean", rep.dseries.mean},
              {"max_dev", rep.dseries.max_dev},
              {"dispersion", rep.dseries.dispersion}};
    j["terminal"] = {{"lhs", rep.terminal.lhs},
                     {"rhs", rep.terminal.rhs},
                     {"margin", rep.terminal.margin}};
    j["time_translation"] = {{"eps", rep.time_translation.eps},
                             {"B", rep.time_translation.B},
                             {"B0", rep.time_translation.B0},
                             {"slope", rep.time_translation.fit.slope},
                             {"flat", rep.time_translation.fit.flat}};
    j["dilation_audit"] = {{"eps", rep.audit.eps},
                           {"direct", rep.audit.direct},
                           {"pred_plus", rep.audit.pred_plus},
                           {"pred_minus", rep.audit.pred_minus},
                           {"res_plus", rep.audit.res_plus},
                           {"res_minus", rep.audit.res_minus},
                           {"selected_sign", rep.audit.selected_sign},
                           {"matched_slope", rep.audit.matched_fit.slope},
                           {"matched_flat", rep.audit.matched_fit.flat},
                           {"matched_floor", rep.audit.matched_floor},
                           {"mismatched_slope", rep.audit.mismatched_fit.slope}};
    j["constants"] = {{"qp_c", rep.qp_c}, {"hpol_C", rep.hpol_C}};
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << j.dump(2) << "\n";
}

}  // namespace mfg
