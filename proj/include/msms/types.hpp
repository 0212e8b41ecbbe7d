#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace msms {

/// Upper bound on the number of species. Keeps per-node algebra on the stack.
inline constexpr int kMaxSpecies = 12;

using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxSpecies, 1>;
using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                               kMaxSpecies, kMaxSpecies>;

using Field = Eigen::VectorXd;   // nodal scalar field
using Fields = Eigen::MatrixXd;  // rows = components, cols = nodes

struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Composition outside the open simplex, or a state the maps cannot invert.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Linear solver breakdown (zero pivot and the like).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace msms
