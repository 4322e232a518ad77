#include "moebius/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "moebius/error.hpp"

namespace moebius::io {

using nlohmann::json;

namespace {

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail_input(std::string("malformed ") + what + " JSON: " + e.what());
  }
}

template <class T>
T field(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) {
    fail_input(std::string(what) + " JSON lacks \"" + key + "\"");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail_input(std::string(what) + " JSON: bad \"" + key + "\": " + e.what());
  }
}

Vec3 point_from_json(const json& p, const char* what) {
  if (!p.is_array() || p.size() < 2 || p.size() > 3) {
    fail_input(std::string(what) + ": points need 2 or 3 coordinates");
  }
  for (const auto& c : p) {
    if (!c.is_number()) fail_input(std::string(what) + ": non-numeric coordinate");
  }
  return {p[0].get<double>(), p[1].get<double>(), p.size() == 3 ? p[2].get<double>() : 0.0};
}

json point_to_json(const Vec3& v, int dim) {
  return dim == 2 ? json::array({v.x, v.y}) : json::array({v.x, v.y, v.z});
}

// JSON has no infinity or NaN; they are written as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double number_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
  }
  fail_input("expected a number in JSON");
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail_input("not a number: '" + s + "'");
  }
}

std::size_t to_size(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    fail_input("not a non-negative integer: '" + s + "'");
  }
  try {
    return static_cast<std::size_t>(std::stoull(s));
  } catch (const std::exception&) {
    fail_input("integer out of range: '" + s + "'");
  }
}

json descriptor_json(const CurveDescriptor& d) {
  json j;
  j["kind"] = d.kind;
  j["params"] = json::object();
  for (const auto& [k, v] : d.params) j["params"][k] = v;
  if (!d.samples.empty()) {
    j["samples"] = json::array();
    for (const Vec3& v : d.samples) j["samples"].push_back(point_to_json(v, 3));
  }
  return j;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_input("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail_input("cannot write '" + path + "'");
  out << text;
  if (!out) fail_input("write to '" + path + "' failed");
}

CurveDescriptor curve_descriptor_from_json(const std::string& text) {
  const json j = parse(text, "curve descriptor");
  if (!j.is_object()) fail_input("curve descriptor must be a JSON object");
  CurveDescriptor d;
  if (j.contains("samples")) {
    d.kind = "samples";
    const json& s = j["samples"];
    if (!s.is_array()) fail_input("curve descriptor: \"samples\" must be an array");
    for (const auto& p : s) d.samples.push_back(point_from_json(p, "curve samples"));
  }
  if (j.contains("kind")) d.kind = field<std::string>(j, "kind", "curve descriptor");
  if (d.kind.empty()) fail_input("curve descriptor needs \"kind\" or \"samples\"");
  if (j.contains("params")) {
    if (!j["params"].is_object()) fail_input("curve descriptor: \"params\" must be an object");
    for (const auto& [k, v] : j["params"].items()) {
      if (!v.is_number()) fail_input("curve descriptor: param '" + k + "' is not a number");
      d.params[k] = v.get<double>();
    }
  }
  return d;
}

std::string curve_descriptor_to_json(const CurveDescriptor& desc) {
  return descriptor_json(desc).dump(2) + "\n";
}

ClosedPolygon polygon_from_json(const std::string& text) {
  const json j = parse(text, "polygon");
  const json& verts = j.contains("vertices") ? j["vertices"] : json();
  if (!verts.is_array()) fail_input("polygon JSON lacks a \"vertices\" array");
  std::vector<Vec3> v;
  bool has_z = false;
  for (const auto& p : verts) {
    v.push_back(point_from_json(p, "polygon vertices"));
    has_z = has_z || p.size() == 3;
  }
  const int dim = j.contains("dim") ? field<int>(j, "dim", "polygon") : (has_z ? 3 : 2);
  if (j.contains("n") && field<std::size_t>(j, "n", "polygon") != v.size()) {
    fail_input("polygon JSON: \"n\" does not match the vertex count");
  }
  return ClosedPolygon(std::move(v), dim);
}

std::string polygon_to_json(const ClosedPolygon& p) {
  json j;
  j["n"] = p.size();
  j["dim"] = p.dim();
  j["vertices"] = json::array();
  for (const Vec3& v : p.vertices()) j["vertices"].push_back(point_to_json(v, p.dim()));
  return j.dump(2) + "\n";
}

std::string polygon_to_csv(const ClosedPolygon& p) {
  std::ostringstream out;
  out << "i,x,y,z,a_i\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec3& v = p.vertex(i);
    out << i << ',' << format_number(v.x) << ',' << format_number(v.y) << ','
        << format_number(v.z) << ',' << format_number(p.arc_parameters()[i]) << '\n';
  }
  return out.str();
}

std::string energy_report_to_json(const EnergyReport& r) {
  json j;
  j["value"] = number(r.value);
  j["terms"] = r.term_count;
  j["scheme"] = r.scheme;
  json d;
  d["smallest_chord"] = number(r.diagnostics.smallest_chord);
  d["largest_term"] = number(r.diagnostics.largest_term);
  d["converged"] = r.diagnostics.converged;
  d["levels"] = r.diagnostics.levels;
  d["grid"] = r.diagnostics.grid;
  d["level_estimates"] = json::array();
  for (double v : r.diagnostics.level_estimates) d["level_estimates"].push_back(number(v));
  j["diagnostics"] = d;
  j["flags"] = r.flags;
  return j.dump(2) + "\n";
}

EnergyReport energy_report_from_json(const std::string& text) {
  const json j = parse(text, "energy report");
  EnergyReport r;
  if (!j.is_object() || !j.contains("value")) fail_input("energy report JSON lacks \"value\"");
  r.value = number_from(j["value"]);
  r.term_count = field<std::size_t>(j, "terms", "energy report");
  r.scheme = field<std::string>(j, "scheme", "energy report");
  if (j.contains("diagnostics")) {
    const json& d = j["diagnostics"];
    if (!d.is_object()) fail_input("energy report: \"diagnostics\" must be an object");
    if (d.contains("smallest_chord")) r.diagnostics.smallest_chord = number_from(d["smallest_chord"]);
    if (d.contains("largest_term")) r.diagnostics.largest_term = number_from(d["largest_term"]);
    if (d.contains("converged")) r.diagnostics.converged = d["converged"].get<bool>();
    if (d.contains("levels")) r.diagnostics.levels = d["levels"].get<int>();
    if (d.contains("grid")) r.diagnostics.grid = d["grid"].get<std::size_t>();
    if (d.contains("level_estimates")) {
      for (const auto& v : d["level_estimates"]) r.diagnostics.level_estimates.push_back(number_from(v));
    }
  }
  if (j.contains("flags")) r.flags = j["flags"].get<std::vector<std::string>>();
  return r;
}

std::string term_matrix_to_csv(const TermMatrix& m) {
  std::ostringstream out;
  out << "i,j,term\n";
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j < m.n; ++j) {
      if (i != j) out << i << ',' << j << ',' << format_number(m.at(i, j)) << '\n';
    }
  }
  return out.str();
}

std::string subdivision_to_json(const SubdivisionSpec& s) {
  json j;
  j["curve_length"] = s.curve_length;
  j["b"] = s.b;
  j["chords"] = s.chords;
  return j.dump(2) + "\n";
}

SubdivisionSpec subdivision_from_json(const std::string& text) {
  const json j = parse(text, "subdivision");
  SubdivisionSpec s;
  s.b = field<std::vector<double>>(j, "b", "subdivision");
  s.chords = field<std::vector<double>>(j, "chords", "subdivision");
  if (j.contains("curve_length")) s.curve_length = field<double>(j, "curve_length", "subdivision");
  if (s.b.size() != s.chords.size()) fail_input("subdivision JSON: b and chords differ in length");
  return s;
}

std::string trace_to_csv(const DescentTrace& t) {
  std::ostringstream out;
  out << "iter,energy,grad_norm,step\n";
  for (const TraceRow& r : t.rows) {
    out << r.iteration << ',' << format_number(r.energy) << ',' << format_number(r.gradient_norm)
        << ',' << format_number(r.step) << '\n';
  }
  return out.str();
}

std::vector<TraceRow> trace_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "iter,energy,grad_norm,step") {
    fail_input("trace CSV: unexpected header");
  }
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 4) fail_input("trace CSV: expected 4 columns in '" + line + "'");
    TraceRow r;
    r.iteration = to_size(cells[0]);
    r.energy = to_double(cells[1]);
    r.gradient_norm = to_double(cells[2]);
    r.step = to_double(cells[3]);
    rows.push_back(r);
  }
  return rows;
}

std::string report_to_csv(const ConvergenceReport& r) {
  std::ostringstream out;
  out << "n,energy,gap,slope,intercept\n";
  for (const auto& row : r.rows) {
    out << row.n << ',' << format_number(row.energy) << ',' << format_number(row.gap) << ','
        << format_number(r.slope) << ',' << format_number(r.intercept) << '\n';
  }
  return out.str();
}

std::string report_to_json(const ConvergenceReport& r) {
  json j;
  j["curve"] = descriptor_json(r.curve);
  j["mode"] = to_string(r.mode);
  j["reference"] = number(r.reference);
  j["slope"] = number(r.slope);
  j["intercept"] = number(r.intercept);
  j["rate_ok"] = r.rate_ok;
  j["rows"] = json::array();
  for (const auto& row : r.rows) {
    j["rows"].push_back({{"n", row.n}, {"energy", number(row.energy)}, {"gap", number(row.gap)}});
  }
  return j.dump(2) + "\n";
}

std::string report_to_csv(const GammaRecoveryReport& r) {
  std::ostringstream out;
  out << "n,energy,gap,w1inf\n";
  for (const auto& row : r.rows) {
    out << row.n << ',' << format_number(row.energy) << ',' << format_number(row.gap) << ','
        << format_number(row.w1inf) << '\n';
  }
  return out.str();
}

std::string report_to_json(const GammaRecoveryReport& r) {
  json j;
  j["curve"] = descriptor_json(r.curve);
  j["reference"] = number(r.reference);
  j["shrink_ok"] = r.shrink_ok;
  j["rows"] = json::array();
  for (const auto& row : r.rows) {
    j["rows"].push_back({{"n", row.n},
                         {"energy", number(row.energy)},
                         {"gap", number(row.gap)},
                         {"w1inf", number(row.w1inf)}});
  }
  return j.dump(2) + "\n";
}

std::string report_to_csv(const LiminfReport& r) {
  std::ostringstream out;
  out << "n,energy,deficit,l1\n";
  for (const auto& row : r.rows) {
    out << row.n << ',' << format_number(row.energy) << ',' << format_number(row.deficit) << ','
        << format_number(row.l1) << '\n';
  }
  return out.str();
}

std::string report_to_json(const LiminfReport& r) {
  json j;
  j["curve"] = descriptor_json(r.curve);
  j["family"] = to_string(r.family);
  j["seed"] = r.seed;
  j["reference"] = number(r.reference);
  j["liminf_proxy"] = number(r.proxy.value);
  j["extrapolated"] = r.proxy.extrapolated;
  j["valid"] = r.valid;
  j["pass"] = r.pass;
  j["rows"] = json::array();
  for (const auto& row : r.rows) {
    j["rows"].push_back({{"n", row.n},
                         {"energy", number(row.energy)},
                         {"deficit", number(row.deficit)},
                         {"l1", number(row.l1)}});
  }
  return j.dump(2) + "\n";
}

std::string report_to_csv(const MinimizerReport& r) {
  std::ostringstream out;
  out << "n,best_energy,gap,alignment_residual,circle_w1inf,usable_runs,best_seed,flagged\n";
  for (const auto& row : r.rows) {
    out << row.n << ',' << format_number(row.best_energy) << ',' << format_number(row.gap) << ','
        << format_number(row.alignment_residual) << ',' << format_number(row.circle_w1inf) << ','
        << row.usable_runs << ',' << row.best_seed << ',' << (row.flagged ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string report_to_json(const MinimizerReport& r) {
  json j;
  j["dim"] = r.dim;
  j["seeds"] = r.seeds;
  j["circle_decreasing"] = r.circle_decreasing;
  j["rows"] = json::array();
  for (const auto& row : r.rows) {
    j["rows"].push_back({{"n", row.n},
                         {"best_energy", number(row.best_energy)},
                         {"gap", number(row.gap)},
                         {"alignment_residual", number(row.alignment_residual)},
                         {"circle_w1inf", number(row.circle_w1inf)},
                         {"usable_runs", row.usable_runs},
                         {"best_seed", row.best_seed},
                         {"flagged", row.flagged}});
  }
  return j.dump(2) + "\n";
}

std::string plot_data(const std::string& x_label, const std::string& y_label,
                      const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) fail_input("plot data: column lengths differ");
  std::ostringstream out;
  out << "# " << x_label << ' ' << y_label << '\n';
  for (std::size_t k = 0; k < x.size(); ++k) {
    out << format_number(x[k]) << ' ' << format_number(y[k]) << '\n';
  }
  return out.str();
}

std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> out;
  const auto parts = split(text, ':');
  if (parts.size() == 3) {
    const std::size_t a = to_size(parts[0]), b = to_size(parts[1]);
    const std::string& step = parts[2];
    if (step.size() < 2 || (step[0] != 'x' && step[0] != '+')) {
      fail_input("n_list step must be xK or +K, got '" + step + "'");
    }
    const std::size_t k = to_size(step.substr(1));
    if (a == 0 || a > b) fail_input("n_list range needs 0 < a <= b");
    if (step[0] == 'x') {
      if (k < 2) fail_input("n_list geometric factor must be >= 2");
      for (std::size_t n = a; n <= b; n *= k) out.push_back(n);
    } else {
      if (k < 1) fail_input("n_list arithmetic step must be >= 1");
      for (std::size_t n = a; n <= b; n += k) out.push_back(n);
    }
  } else if (parts.size() == 1) {
    for (const auto& cell : split(text, ',')) out.push_back(to_size(cell));
  } else {
    fail_input("cannot parse n_list '" + text + "'");
  }
  if (out.empty()) fail_input("empty n_list");
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (out[k] <= out[k - 1]) fail_input("n_list must be strictly increasing");
  }
  return out;
}

}  // namespace moebius::io
