#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "diffbar/losses.hpp"
#include "diffbar/optimizer.hpp"
#include "diffbar/persistence.hpp"
#include "diffbar/verify.hpp"

namespace diffbar {

// json document: {"simplices": [[v...], ...]} plus optional fields.
// "values" gives one filter value per listed simplex; the listing must then
// already be closed under faces (nothing for the closure to invent a value
// for) and free of repeats. values are returned in canonical simplex order.
// "coordinates" gives one row per vertex, ascending vertex id.
struct complex_input {
  simplicial_complex k;
  std::optional<std::vector<double>> values;
  std::optional<Eigen::MatrixXd> coordinates;
};

complex_input load_complex_json(std::istream& in);
complex_input load_complex_file(const std::string& path);

// shortest exact decimal (%.17g); infinities print as inf / -inf
std::string format_double(double v);

// header degree,birth,death; finite bars sorted per degree, then unbounded
// births with death inf
void write_barcode_csv(std::ostream& out, const std::vector<std::pair<int, barcode>>& per_degree);

// {"degrees": [{"degree": p, "pairs": [[birth simplex, death simplex]...],
// "unpaired": [...]}, ...]} with sorted keys
std::string template_json(const total_barcode_template& t);

// one json object per line, one line per accepted iterate
void write_trace_jsonl(std::ostream& out, const run_trace& trace);

std::string suite_report_json(const suite_report& rep);

// cell grid in row-major order from the low-y row, one csv row per grid row
void write_image_csv(std::ostream& out, const image_spec& spec, const Eigen::VectorXd& cells);

}  // namespace diffbar
