#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "diffbar/differential.hpp"
#include "diffbar/errors.hpp"
#include "diffbar/io.hpp"
#include "diffbar/losses.hpp"
#include "diffbar/optimizer.hpp"
#include "diffbar/parametrizations.hpp"
#include "diffbar/persistence.hpp"
#include "diffbar/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace diffbar;

namespace {

std::vector<int> parse_degrees(const std::string& arg, int max_degree) {
  std::vector<int> out;
  if (arg.empty()) {
    for (int p = 0; p <= max_degree; ++p) out.push_back(p);
    return out;
  }
  std::stringstream ss(arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const int p = std::stoi(tok);
    if (p < 0 || p > max_degree) throw bad_degree("degree outside the complex dimension");
    out.push_back(p);
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw shape_error("cannot write " + path.string());
  out << content;
}

int run_persistence(const std::string& input, const std::string& degrees_arg,
                    const std::string& out_dir) {
  const complex_input in = load_complex_file(input);
  if (!in.values) throw shape_error("persistence needs a \"values\" array");
  const filter_function f(in.k, *in.values);

  std::vector<std::pair<int, barcode>> per_degree;
  for (int p : parse_degrees(degrees_arg, in.k.dimension()))
    per_degree.emplace_back(p, diagram(f, p));

  std::ostringstream csv;
  write_barcode_csv(csv, per_degree);
  std::cout << csv.str();

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "barcode.csv", csv.str());
    write_file(fs::path(out_dir) / "template.json", template_json(build_total_template(f)) + "\n");
  }
  return 0;
}

// ---- optimize config ------------------------------------------------------

complex_input parse_inline_complex(const json& node) {
  std::stringstream ss(node.dump());
  return load_complex_json(ss);
}

Eigen::VectorXd parse_vector(const json& node, const char* what) {
  if (!node.is_array()) throw shape_error(std::string(what) + " must be an array of numbers");
  Eigen::VectorXd v(node.size());
  for (size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number()) throw shape_error(std::string(what) + " must hold numbers");
    v[i] = node[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd parse_matrix(const json& node, const char* what) {
  if (!node.is_array() || node.empty() || !node[0].is_array())
    throw shape_error(std::string(what) + " must be an array of rows");
  Eigen::MatrixXd m(node.size(), node[0].size());
  for (size_t r = 0; r < node.size(); ++r) {
    if (node[r].size() != node[0].size()) throw shape_error(std::string(what) + " rows differ");
    for (size_t c = 0; c < node[r].size(); ++c) m(r, c) = node[r][c].get<double>();
  }
  return m;
}

barcode parse_target(const json& node) {
  barcode target;
  if (node.contains("finite"))
    for (const auto& pair : node["finite"]) {
      if (!pair.is_array() || pair.size() != 2) throw shape_error("target bars are [birth, death]");
      target.finite.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
  if (node.contains("infinite"))
    for (const auto& b : node["infinite"]) target.infinite_births.push_back(b.get<double>());
  return target;
}

std::shared_ptr<parametrization> build_family(const json& cfg) {
  const json& fam = cfg.at("family");
  const std::string kind = fam.at("kind").get<std::string>();
  if (kind == "raw_filter") {
    complex_input in = parse_inline_complex(cfg.at("complex"));
    return std::make_shared<raw_filter_parametrization>(std::move(in.k));
  }
  if (kind == "height") {
    complex_input in = parse_inline_complex(cfg.at("complex"));
    if (!in.coordinates) throw shape_error("height family needs \"coordinates\"");
    return std::make_shared<height_parametrization>(std::move(in.k), *in.coordinates);
  }
  if (kind == "lower_star") {
    complex_input in = parse_inline_complex(cfg.at("complex"));
    const json& field = fam.at("field");
    auto vf = std::make_shared<linear_vertex_field>(
        parse_matrix(field.at("matrix"), "field matrix"),
        parse_vector(field.at("offset"), "field offset"));
    return std::make_shared<lower_star_parametrization>(std::move(in.k), vf);
  }
  if (kind == "rips")
    return std::make_shared<rips_parametrization>(fam.at("points").get<int>(),
                                                  fam.at("ambient_dim").get<int>(),
                                                  fam.value("max_dim", 2));
  if (kind == "ellipsoid_rips")
    return std::make_shared<ellipsoid_rips_parametrization>(
        parse_matrix(fam.at("points"), "points"), fam.value("max_dim", 2));
  throw shape_error("unknown family kind " + kind);
}

std::shared_ptr<loss_on_barcodes> build_loss(const json& cfg) {
  const json& node = cfg.at("loss");
  const std::string kind = node.at("kind").get<std::string>();
  if (kind == "total_persistence") return std::make_shared<total_persistence_loss>();
  if (kind == "bottleneck") return std::make_shared<bottleneck_loss>(parse_target(node.at("target")));
  if (kind == "wasserstein")
    return std::make_shared<wasserstein_loss>(parse_target(node.at("target")),
                                              node.value("q", 2.0));
  throw shape_error("unknown loss kind " + kind);
}

optimization_problem build_problem(const json& cfg) {
  optimization_problem problem;
  problem.family = build_family(cfg);
  problem.loss = build_loss(cfg);

  if (cfg.contains("theta0")) {
    problem.theta0 = parse_vector(cfg.at("theta0"), "theta0");
  } else if (cfg.at("family").at("kind") == "raw_filter" && cfg.at("complex").contains("values")) {
    const complex_input in = parse_inline_complex(cfg.at("complex"));
    problem.theta0 =
        Eigen::Map<const Eigen::VectorXd>(in.values->data(), in.values->size());
  } else {
    throw shape_error("config needs \"theta0\"");
  }

  for (const auto& entry : cfg.at("degrees")) {
    if (!entry.is_array() || entry.size() != 2)
      throw shape_error("degrees entries are [degree, weight]");
    problem.degrees.emplace_back(entry[0].get<int>(), entry[1].get<double>());
  }

  if (cfg.contains("schedule")) {
    const json& s = cfg.at("schedule");
    const std::string kind = s.value("kind", "constant");
    if (kind == "constant")
      problem.schedule.shape = step_schedule::kind::constant;
    else if (kind == "inverse_iter")
      problem.schedule.shape = step_schedule::kind::inverse_iter;
    else
      throw shape_error("unknown schedule kind " + kind);
    problem.schedule.rate = s.value("rate", 1e-2);
  }

  const std::string retract = cfg.value("retraction", "none");
  if (retract == "none")
    problem.retract = retraction_kind::none;
  else if (retract == "sphere")
    problem.retract = retraction_kind::sphere;
  else if (retract == "filtration")
    problem.retract = retraction_kind::filtration;
  else
    throw shape_error("unknown retraction " + retract);

  problem.max_iters = cfg.value("max_iters", 100);
  problem.grad_tolerance = cfg.value("grad_tolerance", 1e-8);
  problem.max_halvings = cfg.value("max_halvings", 10);

  if (cfg.contains("regularizer")) {
    const json& reg = cfg.at("regularizer");
    const std::string kind = reg.at("kind").get<std::string>();
    if (kind == "tether") {
      const double lambda = reg.at("lambda").get<double>();
      const Eigen::VectorXd anchor = parse_vector(reg.at("anchor"), "anchor");
      problem.regularizer = [lambda, anchor](const Eigen::VectorXd& theta, Eigen::VectorXd* g) {
        const Eigen::VectorXd delta = theta - anchor;
        if (g) *g = 2.0 * lambda * delta;
        return lambda * delta.squaredNorm();
      };
    } else if (kind != "none") {
      throw shape_error("unknown regularizer kind " + kind);
    }
  }
  return problem;
}

const char* status_name(run_status s) {
  switch (s) {
    case run_status::converged: return "converged";
    case run_status::iteration_limit: return "iteration_limit";
    case run_status::stalled: return "stalled";
  }
  return "?";
}

int run_optimize(const std::string& config_path, const std::string& out_dir, bool print_config) {
  std::ifstream in(config_path);
  if (!in) throw shape_error("cannot open " + config_path);
  const json cfg = json::parse(in);

  if (print_config) {
    std::cout << cfg.dump(2) << "\n";
    return 0;
  }

  const optimization_problem problem = build_problem(cfg);
  const run_trace trace = run(problem);

  std::cout << "initial_loss " << format_double(trace.initial_loss()) << "\n"
            << "final_loss " << format_double(trace.final_loss()) << "\n"
            << "status " << status_name(trace.status) << "\n"
            << "iterations " << trace.records.back().iter << "\n";

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ostringstream jsonl;
    write_trace_jsonl(jsonl, trace);
    write_file(fs::path(out_dir) / "trace.jsonl", jsonl.str());

    const filter_function final_f = problem.family->value(trace.final_theta());
    std::vector<std::pair<int, barcode>> per_degree;
    for (const auto& [p, w] : problem.degrees) per_degree.emplace_back(p, diagram(final_f, p));
    std::ostringstream csv;
    write_barcode_csv(csv, per_degree);
    write_file(fs::path(out_dir) / "final_barcode.csv", csv.str());
  }
  return 0;
}

int run_verify(const std::string& suite, std::uint64_t seed, int instances, int threads,
               const std::string& out_dir) {
  suite_report rep;
  if (suite == "oracle")
    rep = run_oracle_suite(seed, instances > 0 ? instances : 200, threads);
  else if (suite == "stability")
    rep = run_stability_suite(seed, instances > 0 ? instances : 1000, threads);
  else if (suite == "isometry")
    rep = run_isometry_suite(seed, instances > 0 ? instances : 100, threads);
  else if (suite == "gradients")
    rep = run_gradient_suite(seed, instances > 0 ? instances : 100, threads);
  else
    throw shape_error("unknown suite " + suite);

  std::cout << "suite " << suite << (rep.passed ? " passed " : " FAILED ") << rep.instances
            << " instances\n";
  for (const auto& msg : rep.failures) std::cout << "  " << msg << "\n";

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "report.json", suite_report_json(rep) + "\n");
  }
  return rep.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"persistence barcodes with derivatives"};
  app.require_subcommand(1);

  std::string input, degrees_arg, out_dir;
  auto* persistence_cmd = app.add_subcommand("persistence", "barcode of a filtered complex");
  persistence_cmd->add_option("input", input, "complex json with values")->required();
  persistence_cmd->add_option("--degrees", degrees_arg, "comma-separated degrees (default all)");
  persistence_cmd->add_option("--out", out_dir, "directory for barcode.csv and template.json");

  std::string config_path, opt_out;
  bool print_config = false;
  auto* optimize_cmd = app.add_subcommand("optimize", "gradient descent on a barcode loss");
  optimize_cmd->add_option("config", config_path, "problem description json")->required();
  optimize_cmd->add_option("--out", opt_out, "directory for trace.jsonl and final_barcode.csv");
  optimize_cmd->add_flag("--print-config", print_config, "echo the parsed config and exit");

  std::string suite, verify_out;
  std::uint64_t seed = 0;
  int instances = 0, threads = 0;
  auto* verify_cmd = app.add_subcommand("verify", "randomized self-checks");
  verify_cmd->add_option("suite", suite, "oracle | stability | isometry | gradients")->required();
  verify_cmd->add_option("--seed", seed, "rng seed")->required();
  verify_cmd->add_option("--instances", instances, "instance count (suite default when omitted)");
  verify_cmd->add_option("--threads", threads, "worker threads (0 = auto)");
  verify_cmd->add_option("--out", verify_out, "directory for report.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (persistence_cmd->parsed()) return run_persistence(input, degrees_arg, out_dir);
    if (optimize_cmd->parsed()) return run_optimize(config_path, opt_out, print_config);
    if (verify_cmd->parsed()) return run_verify(suite, seed, instances, threads, verify_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
