#include "msms/fem1d.hpp"

#include <lapacke.h>

#include <cmath>
#include <sstream>
#include <utility>

namespace msms {

Grid1D::Grid1D(int n_p) : n_p_(n_p) {
  if (n_p < 2) throw InvalidParameter("grid needs at least two elements");
}

BlockTridiagonal::BlockTridiagonal(int nodes, int block)
    : nodes_(nodes), m_(block), data_(static_cast<std::size_t>(nodes) * 3 * block * block, 0.0) {
  if (nodes < 1 || block < 1) throw InvalidParameter("empty block-tridiagonal matrix");
}

Eigen::Map<Eigen::MatrixXd> BlockTridiagonal::block(int row_node, int offset) {
  const std::size_t base = (static_cast<std::size_t>(row_node) * 3 + (offset + 1)) * m_ * m_;
  return {data_.data() + base, m_, m_};
}

Eigen::Map<const Eigen::MatrixXd> BlockTridiagonal::block(int row_node, int offset) const {
  const std::size_t base = (static_cast<std::size_t>(row_node) * 3 + (offset + 1)) * m_ * m_;
  return {data_.data() + base, m_, m_};
}

const double* BlockTridiagonal::slot(int row, int col) const {
  const int rn = row / m_;
  const int cn = col / m_;
  const int offset = cn - rn;
  if (offset < -1 || offset > 1) return nullptr;
  const std::size_t base = (static_cast<std::size_t>(rn) * 3 + (offset + 1)) * m_ * m_;
  return data_.data() + base + (col % m_) * m_ + (row % m_);
}

double* BlockTridiagonal::slot(int row, int col) {
  return const_cast<double*>(std::as_const(*this).slot(row, col));
}

double BlockTridiagonal::entry(int row, int col) const {
  const double* p = slot(row, col);
  return p ? *p : 0.0;
}

void BlockTridiagonal::set_entry(int row, int col, double value) {
  double* p = slot(row, col);
  if (!p) throw InvalidParameter("entry outside the block-tridiagonal band");
  *p = value;
}

Eigen::VectorXd BlockTridiagonal::multiply(const Eigen::VectorXd& v) const {
  if (v.size() != size()) throw InvalidParameter("vector size does not match matrix");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(size());
  for (int j = 0; j < nodes_; ++j) {
    for (int off = -1; off <= 1; ++off) {
      const int c = j + off;
      if (c < 0 || c >= nodes_) continue;
      out.segment(j * m_, m_) += block(j, off) * v.segment(c * m_, m_);
    }
  }
  return out;
}

Eigen::MatrixXd BlockTridiagonal::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(size(), size());
  for (int j = 0; j < nodes_; ++j)
    for (int off = -1; off <= 1; ++off) {
      const int c = j + off;
      if (c < 0 || c >= nodes_) continue;
      d.block(j * m_, c * m_, m_, m_) = block(j, off);
    }
  return d;
}

void apply_constraints(BandedSystem& sys) {
  auto& a = sys.matrix;
  const int m = a.block_size();
  const int n = a.size();
  if (sys.rhs.size() != n) throw InvalidParameter("right-hand side size does not match matrix");
  for (const auto& c : sys.constraints) {
    if (c.node < 0 || c.node >= a.nodes() || c.component < 0 || c.component >= m)
      throw InvalidParameter("constraint outside the system");
    const int k = c.node * m + c.component;
    const int lo = std::max(0, (c.node - 1) * m);
    const int hi = std::min(n, (c.node + 2) * m);
    for (int r = lo; r < hi; ++r) {
      if (r == k) continue;
      sys.rhs[r] -= a.entry(r, k) * c.value;
      a.set_entry(r, k, 0.0);
      a.set_entry(k, r, 0.0);
    }
    a.set_entry(k, k, 1.0);
    sys.rhs[k] = c.value;
  }
  sys.constraints.clear();
}

Eigen::VectorXd solve_banded(BandedSystem sys) {
  apply_constraints(sys);
  const auto& a = sys.matrix;
  const int n = a.size();
  const int m = a.block_size();
  const int kl = 2 * m - 1;
  const int ku = 2 * m - 1;
  const int ldab = 2 * kl + ku + 1;
  std::vector<double> ab(static_cast<std::size_t>(ldab) * n, 0.0);
  for (int col = 0; col < n; ++col) {
    const int r0 = std::max(0, col - ku);
    const int r1 = std::min(n - 1, col + kl);
    for (int row = r0; row <= r1; ++row)
      ab[static_cast<std::size_t>(col) * ldab + (kl + ku + row - col)] = a.entry(row, col);
  }
  std::vector<lapack_int> ipiv(n);
  Eigen::VectorXd x = sys.rhs;
  const lapack_int info =
      LAPACKE_dgbsv(LAPACK_COL_MAJOR, n, kl, ku, 1, ab.data(), ldab, ipiv.data(), x.data(), n);
  if (info != 0) {
    std::ostringstream os;
    if (info > 0)
      os << "banded LU: zero pivot at unknown " << info - 1 << " (node " << (info - 1) / m
         << ", component " << (info - 1) % m << ")";
    else
      os << "banded LU: illegal argument " << -info;
    throw SolverError(os.str());
  }
  return x;
}

BlockTridiagonal assemble_mass(const Grid1D& grid, bool lumped) {
  BlockTridiagonal mass(grid.nodes(), 1);
  const double h = grid.h();
  for (int e = 0; e < grid.elements(); ++e) {
    if (lumped) {
      mass.block(e, 0)(0, 0) += 0.5 * h;
      mass.block(e + 1, 0)(0, 0) += 0.5 * h;
    } else {
      mass.block(e, 0)(0, 0) += h / 3.0;
      mass.block(e + 1, 0)(0, 0) += h / 3.0;
      mass.block(e, 1)(0, 0) += h / 6.0;
      mass.block(e + 1, -1)(0, 0) += h / 6.0;
    }
  }
  return mass;
}

void add_weighted_stiffness(BlockTridiagonal& target, const Grid1D& grid,
                            const std::vector<SmallMat>& coeff, double scale, int offset) {
  if (static_cast<int>(coeff.size()) != grid.elements())
    throw InvalidParameter("need one coefficient matrix per element");
  if (target.nodes() != grid.nodes()) throw InvalidParameter("matrix does not match grid");
  const double s = scale / grid.h();
  for (int e = 0; e < grid.elements(); ++e) {
    const auto& c = coeff[e];
    const int m = static_cast<int>(c.rows());
    if (c.cols() != m || offset + m > target.block_size())
      throw InvalidParameter("coefficient block does not fit the target matrix");
    target.block(e, 0).block(offset, offset, m, m) += s * c;
    target.block(e + 1, 0).block(offset, offset, m, m) += s * c;
    target.block(e, 1).block(offset, offset, m, m) -= s * c;
    target.block(e + 1, -1).block(offset, offset, m, m) -= s * c;
  }
}

BlockTridiagonal assemble_weighted_stiffness(const Grid1D& grid, const std::vector<SmallMat>& coeff) {
  if (coeff.empty()) throw InvalidParameter("no coefficient matrices");
  BlockTridiagonal k(grid.nodes(), static_cast<int>(coeff.front().rows()));
  add_weighted_stiffness(k, grid, coeff);
  return k;
}

Field poisson_solve(const Grid1D& grid, const Field& charge, double lambda, double left,
                    double right) {
  if (!(lambda > 0.0)) throw InvalidParameter("permittivity lambda must be positive");
  if (charge.size() != grid.nodes()) throw InvalidParameter("charge must be nodal");
  BandedSystem sys{BlockTridiagonal(grid.nodes(), 1), Eigen::VectorXd(grid.nodes()), {}};
  add_weighted_stiffness(sys.matrix, grid,
                         std::vector<SmallMat>(grid.elements(), SmallMat::Constant(1, 1, lambda)));
  for (int j = 0; j < grid.nodes(); ++j) sys.rhs[j] = grid.weight(j) * charge[j];
  sys.constraints = {{0, 0, left}, {grid.nodes() - 1, 0, right}};
  return solve_banded(std::move(sys));
}

Field prolongate(const Grid1D& coarse, const Field& u, const Grid1D& fine) {
  if (u.size() != coarse.nodes()) throw InvalidParameter("field does not match coarse grid");
  if (fine.elements() % coarse.elements() != 0)
    throw InvalidParameter("grids are not nested");
  const int ratio = fine.elements() / coarse.elements();
  Field out(fine.nodes());
  for (int j = 0; j < fine.nodes(); ++j) {
    const int e = std::min(j / ratio, coarse.elements() - 1);
    const double s = static_cast<double>(j - e * ratio) / ratio;
    out[j] = (1.0 - s) * u[e] + s * u[e + 1];
  }
  return out;
}

double l2_distance(const Grid1D& coarse, const Field& u_coarse, const Grid1D& fine,
                   const Field& u_fine) {
  if (u_fine.size() != fine.nodes()) throw InvalidParameter("field does not match fine grid");
  const Field diff = prolongate(coarse, u_coarse, fine) - u_fine;
  double sum = 0.0;
  for (int e = 0; e < fine.elements(); ++e) {
    const double a = diff[e];
    const double b = diff[e + 1];
    sum += (a * a + a * b + b * b) / 3.0;
  }
  return std::sqrt(sum * fine.h());
}

}  // namespace msms
