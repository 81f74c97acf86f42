#include "liftpde/boundary.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>
#include <vector>

namespace liftpde {
namespace {

std::vector<double> parse_params(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string tok = text.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (...) {
      throw std::invalid_argument(what + ": malformed numeric parameter '" + tok + "'");
    }
    pos = comma + 1;
    if (comma == text.size()) break;
  }
  return out;
}

}  // namespace

BoundaryData constant_boundary(double c) {
  return {"constant", [c](const Eigen::VectorXd&) { return c; }};
}

BoundaryData affine_boundary(Eigen::VectorXd a, double b) {
  return {"affine", [a = std::move(a), b](const Eigen::VectorXd& x) { return a.dot(x) + b; }};
}

BoundaryData linear_ramp_boundary() {
  return {"linear_ramp", [](const Eigen::VectorXd& x) { return std::clamp(x[0], 0.0, 1.0); }};
}

BoundaryData harmonic_xy_boundary() {
  return {"harmonic_xy", [](const Eigen::VectorXd& x) { return x[0] * x[1]; }};
}

BoundaryData harmonic_x2y2_boundary() {
  return {"harmonic_x2y2", [](const Eigen::VectorXd& x) { return x[0] * x[0] - x[1] * x[1]; }};
}

BoundaryData parse_boundary(const std::string& spec, int dim) {
  const std::size_t colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);

  if (name == "constant") {
    const auto ps = parse_params(rest, "constant boundary");
    if (ps.size() != 1) throw std::invalid_argument("constant boundary takes exactly one parameter");
    return constant_boundary(ps[0]);
  }
  if (name == "affine") {
    const auto ps = parse_params(rest, "affine boundary");
    if (static_cast<int>(ps.size()) != dim + 1) {
      throw std::invalid_argument("affine boundary takes n slope parameters plus an intercept");
    }
    Eigen::VectorXd a(dim);
    for (int i = 0; i < dim; ++i) a[i] = ps[static_cast<std::size_t>(i)];
    return affine_boundary(std::move(a), ps.back());
  }
  if (name == "linear_ramp") {
    if (!rest.empty()) throw std::invalid_argument("linear_ramp boundary takes no parameters");
    return linear_ramp_boundary();
  }
  if (name == "harmonic_xy" || name == "harmonic_x2y2") {
    if (!rest.empty()) throw std::invalid_argument(name + " boundary takes no parameters");
    if (dim != 2) throw std::invalid_argument(name + " boundary requires dimension 2");
    return name == "harmonic_xy" ? harmonic_xy_boundary() : harmonic_x2y2_boundary();
  }
  throw std::invalid_argument("unknown boundary '" + name +
                              "'; expected constant, affine, linear_ramp, harmonic_xy, or harmonic_x2y2");
}

}  // namespace liftpde
