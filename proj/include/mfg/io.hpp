#pragma once

#include <string>
#include <vector>

#include "mfg/analysis.hpp"
#include "mfg/solver.hpp"

namespace mfg {

/// Field dump format: one text header line
///   MFGGRID d Nx Nt T kind\n
/// followed by little-endian 8-byte floats, time-major then row-major in
/// space. kind is one of m, u (node fields), p (interval field), w
/// (interval vector field, components interleaved per slice).
void write_scalar_field(const std::string& path, const ScalarField& f, const std::string& kind);
void write_vector_field(const std::string& path, const VectorField& f, const std::string& kind);

/// Loaders reject anything that does not round-trip: bad magic, unknown
/// kind, or truncated payload all raise "malformed field file".
ScalarField read_scalar_field(const std::string& path, std::string* kind_out = nullptr);
VectorField read_vector_field(const std::string& path, std::string* kind_out = nullptr);

/// CSV with %.17g cells (lossless doubles, deterministic text).
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows);

void write_solve_report(const std::string& path, const SolveReport& rep);
void write_analysis_report(const std::string& path, const AnalysisReport& rep);

}  // namespace mfg
