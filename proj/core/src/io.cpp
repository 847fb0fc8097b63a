#include "diffbar/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "diffbar/errors.hpp"

namespace diffbar {

using nlohmann::json;

namespace {

std::vector<std::vector<vertex_id>> parse_simplices(const json& doc) {
  if (!doc.contains("simplices") || !doc["simplices"].is_array())
    throw shape_error("document needs a \"simplices\" array");
  std::vector<std::vector<vertex_id>> out;
  for (const auto& entry : doc["simplices"]) {
    if (!entry.is_array() || entry.empty())
      throw shape_error("each simplex is a non-empty array of vertex ids");
    std::vector<vertex_id> simplex;
    for (const auto& v : entry) {
      if (!v.is_number_integer()) throw shape_error("vertex ids are integers");
      simplex.push_back(v.get<vertex_id>());
    }
    out.push_back(std::move(simplex));
  }
  return out;
}

}  // namespace

complex_input load_complex_json(std::istream& in) {
  const json doc = json::parse(in);
  const auto listed = parse_simplices(doc);
  complex_input out{simplicial_complex::build(listed), std::nullopt, std::nullopt};

  if (doc.contains("values")) {
    const auto& vals = doc["values"];
    if (!vals.is_array() || vals.size() != listed.size())
      throw shape_error("values need one number per listed simplex");
    if (static_cast<int>(listed.size()) != out.k.size())
      throw shape_error("values require the simplex list to be closed under faces");
    std::vector<double> canonical(out.k.size());
    std::vector<char> seen(out.k.size(), 0);
    for (size_t j = 0; j < listed.size(); ++j) {
      const int idx = out.k.index_of(listed[j]);
      if (idx < 0 || seen[idx]) throw shape_error("simplex list has a repeat");
      seen[idx] = 1;
      if (!vals[j].is_number()) throw shape_error("values are numbers");
      canonical[idx] = vals[j].get<double>();
    }
    out.values = std::move(canonical);
  }

  if (doc.contains("coordinates")) {
    const auto& rows = doc["coordinates"];
    if (!rows.is_array() || static_cast<int>(rows.size()) != out.k.vertex_count())
      throw shape_error("coordinates need one row per vertex");
    int cols = -1;
    for (const auto& row : rows) {
      if (!row.is_array() || row.empty()) throw shape_error("coordinate rows are non-empty arrays");
      if (cols < 0) cols = static_cast<int>(row.size());
      if (static_cast<int>(row.size()) != cols)
        throw shape_error("coordinate rows have equal length");
    }
    Eigen::MatrixXd coords(out.k.vertex_count(), cols);
    for (int r = 0; r < out.k.vertex_count(); ++r)
      for (int c = 0; c < cols; ++c) {
        if (!rows[r][c].is_number()) throw shape_error("coordinates are numbers");
        coords(r, c) = rows[r][c].get<double>();
      }
    out.coordinates = std::move(coords);
  }
  return out;
}

complex_input load_complex_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw shape_error("cannot open " + path);
  return load_complex_json(in);
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_barcode_csv(std::ostream& out,
                       const std::vector<std::pair<int, barcode>>& per_degree) {
  out << "degree,birth,death\n";
  for (const auto& [degree, d] : per_degree) {
    barcode sorted = d;
    sorted.canonicalize();
    for (const auto& [b, death] : sorted.finite)
      out << degree << ',' << format_double(b) << ',' << format_double(death) << '\n';
    for (double b : sorted.infinite_births) out << degree << ',' << format_double(b) << ",inf\n";
  }
}

std::string template_json(const total_barcode_template& t) {
  json degrees = json::array();
  for (const auto& bt : t.by_degree) {
    json pairs = json::array();
    for (const auto& [birth, death] : bt.pairs) pairs.push_back({birth, death});
    degrees.push_back({{"degree", bt.degree}, {"pairs", pairs}, {"unpaired", bt.unpaired}});
  }
  return json{{"degrees", degrees}}.dump();
}

void write_trace_jsonl(std::ostream& out, const run_trace& trace) {
  for (const auto& rec : trace.records) {
    json line{{"iter", rec.iter},
              {"theta", std::vector<double>(rec.theta.data(), rec.theta.data() + rec.theta.size())},
              {"loss", rec.loss},
              {"grad_norm", rec.grad_norm},
              {"step_rate", rec.step_rate},
              {"smooth", rec.smooth},
              {"note", rec.note}};
    out << line.dump() << '\n';
  }
}

std::string suite_report_json(const suite_report& rep) {
  return json{{"passed", rep.passed},
              {"instances", rep.instances},
              {"failures", rep.failures},
              {"seconds", rep.seconds}}
      .dump();
}

void write_image_csv(std::ostream& out, const image_spec& spec, const Eigen::VectorXd& cells) {
  if (cells.size() != spec.resolution * spec.resolution)
    throw shape_error("cell count does not match the image resolution");
  for (int iy = 0; iy < spec.resolution; ++iy) {
    for (int ix = 0; ix < spec.resolution; ++ix) {
      if (ix) out << ',';
      out << format_double(cells[iy * spec.resolution + ix]);
    }
    out << '\n';
  }
}

}  // namespace diffbar
