#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace diffbar {

// invalid input complexes / filters
struct duplicate_simplex : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct empty_complex : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// f(face) > f(coface); indices refer to canonical simplex order
struct not_a_filtration : std::invalid_argument {
  int face;
  int coface;
  not_a_filtration(int face_, int coface_, const std::string& msg)
      : std::invalid_argument(msg), face(face_), coface(coface_) {}
};

// a supplied simplex order is not filtration-compatible
struct order_violation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct bad_degree : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct shape_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct bad_exponent : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// parameter sits on a stratum boundary: some filter values tie while their
// derivative rows disagree. witnesses are canonical simplex index pairs.
struct singular_parameter : std::runtime_error {
  std::vector<std::pair<int, int>> witnesses;
  singular_parameter(std::vector<std::pair<int, int>> w, const std::string& msg)
      : std::runtime_error(msg), witnesses(std::move(w)) {}
};

// one-sided probe never reached a stable pre-order
struct unstable_direction : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct not_on_sphere : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct not_positive_definite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct infinite_bars_unsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// exact oracle is limited to 64 simplices
struct oracle_too_large : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace diffbar
