#include "qrev/state_spec.hpp"

#include <fstream>
#include <sstream>

#include "qrev/symplectic.hpp"

namespace qrev {

MatrixXd StateSpec::covariance() const {
  if (modes.empty()) throw std::logic_error("StateSpec: no modes");
  const int n = n_modes();
  MatrixXd gamma = MatrixXd::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k)
    gamma.block<2, 2>(2 * k, 2 * k) = squeezed_thermal(modes[k]);
  if (gauge) {
    gamma = (*gauge) * gamma * gauge->transpose();
    gamma = 0.5 * (gamma + gamma.transpose()).eval();
  }
  return gamma;
}

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::runtime_error("state spec, line " + std::to_string(line) + ": " + what);
}

}  // namespace

StateSpec parse_state_spec(std::istream& in) {
  StateSpec spec;
  std::string raw;
  int line_no = 0;
  bool in_gauge = false;
  std::vector<double> gauge_values;

  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream line(raw);

    if (in_gauge) {
      double value = 0.0;
      while (line >> value) gauge_values.push_back(value);
      if (!line.eof()) fail(line_no, "gauge block expects numbers only");
      continue;
    }

    std::string keyword;
    if (!(line >> keyword)) continue;
    if (keyword == "mode") {
      SqueezedThermalParams params;
      if (!(line >> params.nu >> params.r)) fail(line_no, "expected: mode <nu> <r>");
      std::string extra;
      if (line >> extra) fail(line_no, "trailing field '" + extra + "' after mode line");
      if (params.nu < 1.0) fail(line_no, "nu < 1 is unphysical");
      spec.modes.push_back(params);
    } else if (keyword == "gauge") {
      if (spec.modes.empty()) fail(line_no, "gauge block must follow the mode lines");
      if (in_gauge || !gauge_values.empty()) fail(line_no, "duplicate gauge block");
      in_gauge = true;
      double value = 0.0;
      while (line >> value) gauge_values.push_back(value);
      if (!line.eof()) fail(line_no, "gauge block expects numbers only");
    } else {
      fail(line_no, "unknown keyword '" + keyword + "'");
    }
  }

  if (spec.modes.empty()) fail(line_no, "no mode lines found");
  if (in_gauge) {
    const int dim = 2 * spec.n_modes();
    if (static_cast<int>(gauge_values.size()) != dim * dim)
      fail(line_no, "gauge block has " + std::to_string(gauge_values.size()) +
                        " numbers, expected " + std::to_string(dim * dim));
    MatrixXd t(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) t(i, j) = gauge_values[i * dim + j];
    const MatrixXd sigma = symplectic_form(spec.n_modes());
    const double defect = (t * sigma * t.transpose() - sigma).norm() / sigma.norm();
    if (defect > tol::symp)
      fail(line_no, "gauge matrix is not symplectic (defect " + std::to_string(defect) + ")");
    spec.gauge = t;
  }
  return spec;
}

StateSpec load_state_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("state spec: cannot open '" + path + "'");
  return parse_state_spec(in);
}

}  // namespace qrev
