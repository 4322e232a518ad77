#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "moebius/curves.hpp"
#include "moebius/energies.hpp"
#include "moebius/experiments.hpp"
#include "moebius/inscription.hpp"
#include "moebius/optimize.hpp"
#include "moebius/polygon.hpp"

namespace moebius::io {

// JSON documents keep full round-trip precision; CSV and gnuplot files
// print 12 significant digits.
std::string format_number(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// {"kind": ..., "params": {...}} or {"samples": [[x, y(, z)], ...]}.
CurveDescriptor curve_descriptor_from_json(const std::string& text);
std::string curve_descriptor_to_json(const CurveDescriptor& desc);

// {"n": int, "dim": 2|3, "vertices": [[x, y(, z)], ...]}.
ClosedPolygon polygon_from_json(const std::string& text);
std::string polygon_to_json(const ClosedPolygon& p);
// Header i,x,y,z,a_i.
std::string polygon_to_csv(const ClosedPolygon& p);

// {value, terms, scheme, diagnostics, flags}; "terms" is the pair count.
std::string energy_report_to_json(const EnergyReport& r);
EnergyReport energy_report_from_json(const std::string& text);
// Header i,j,term; off-diagonal entries only.
std::string term_matrix_to_csv(const TermMatrix& m);

// {"curve_length": L, "b": [...], "chords": [...]}.
std::string subdivision_to_json(const SubdivisionSpec& s);
SubdivisionSpec subdivision_from_json(const std::string& text);

// Header iter,energy,grad_norm,step.
std::string trace_to_csv(const DescentTrace& t);
std::vector<TraceRow> trace_from_csv(const std::string& text);

std::string report_to_csv(const ConvergenceReport& r);
std::string report_to_json(const ConvergenceReport& r);
std::string report_to_csv(const GammaRecoveryReport& r);
std::string report_to_json(const GammaRecoveryReport& r);
std::string report_to_csv(const LiminfReport& r);
std::string report_to_json(const LiminfReport& r);
std::string report_to_csv(const MinimizerReport& r);
std::string report_to_json(const MinimizerReport& r);

// Two whitespace separated columns with a leading "# x y" comment.
std::string plot_data(const std::string& x_label, const std::string& y_label,
                      const std::vector<double>& x, const std::vector<double>& y);

// "a:b:x2" (geometric, factor 2), "a:b:+k" (arithmetic) or "a,b,c".
// The result must be strictly increasing.
std::vector<std::size_t> parse_n_list(const std::string& text);

}  // namespace moebius::io
