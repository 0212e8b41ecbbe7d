#pragma once

#include "msms/types.hpp"

#include <vector>

namespace msms {

/// Uniform mesh of (0,1) with n_p elements and piecewise-linear basis.
class Grid1D {
 public:
  explicit Grid1D(int n_p);

  int elements() const { return n_p_; }
  int nodes() const { return n_p_ + 1; }
  double h() const { return 1.0 / n_p_; }
  double node(int j) const { return static_cast<double>(j) / n_p_; }
  double midpoint(int e) const { return (e + 0.5) / n_p_; }
  /// Trapezoidal weight of node j (integral of its hat function).
  double weight(int j) const { return (j == 0 || j == n_p_) ? 0.5 * h() : h(); }

  bool operator==(const Grid1D&) const = default;

 private:
  int n_p_;
};

/// Block-tridiagonal matrix with m x m blocks, one block row per node.
class BlockTridiagonal {
 public:
  BlockTridiagonal(int nodes, int block);

  int nodes() const { return nodes_; }
  int block_size() const { return m_; }
  int size() const { return nodes_ * m_; }

  /// Block coupling node `row_node` to node `row_node + offset`, offset in {-1, 0, 1}.
  Eigen::Map<Eigen::MatrixXd> block(int row_node, int offset);
  Eigen::Map<const Eigen::MatrixXd> block(int row_node, int offset) const;

  /// Entry by global index; zero outside the band.
  double entry(int row, int col) const;
  void set_entry(int row, int col, double value);

  Eigen::VectorXd multiply(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd to_dense() const;

 private:
  double* slot(int row, int col);
  const double* slot(int row, int col) const;

  int nodes_;
  int m_;
  std::vector<double> data_;
};

struct DirichletConstraint {
  int node = 0;
  int component = 0;
  double value = 0.0;
};

struct BandedSystem {
  BlockTridiagonal matrix;
  Eigen::VectorXd rhs;
  std::vector<DirichletConstraint> constraints;
};

/// Row and column elimination of every constraint; the list is cleared so
/// the call is idempotent.
void apply_constraints(BandedSystem& sys);

/// Banded LU with partial pivoting (LAPACK dgbsv). Applies any pending
/// constraints first. Throws SolverError on a zero pivot.
Eigen::VectorXd solve_banded(BandedSystem sys);

/// Linear-element mass matrix (m = 1). The lumped variant is diagonal with
/// the trapezoidal weights.
BlockTridiagonal assemble_mass(const Grid1D& grid, bool lumped = false);

/// Adds scale * (1/h) coeff_e [[1,-1],[-1,1]] for every element into the
/// sub-block starting at component `offset`.
void add_weighted_stiffness(BlockTridiagonal& target, const Grid1D& grid,
                            const std::vector<SmallMat>& coeff, double scale = 1.0, int offset = 0);

/// Block stiffness matrix with one coefficient matrix per element.
BlockTridiagonal assemble_weighted_stiffness(const Grid1D& grid, const std::vector<SmallMat>& coeff);

/// Linear FEM solution of -lambda phi'' = charge with Dirichlet ends. The
/// load is integrated with the trapezoidal rule on nodal charge values.
Field poisson_solve(const Grid1D& grid, const Field& charge, double lambda, double left,
                    double right);

/// Piecewise-linear interpolation of a coarse nodal field onto a nested fine grid.
Field prolongate(const Grid1D& coarse, const Field& u, const Grid1D& fine);

/// L2 norm of (interpolated coarse - fine), integrated exactly for the
/// piecewise-linear difference on the fine grid. Rejects non-nested grids.
double l2_distance(const Grid1D& coarse, const Field& u_coarse, const Grid1D& fine,
                   const Field& u_fine);

}  // namespace msms
