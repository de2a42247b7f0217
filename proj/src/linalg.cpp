#include "tpns/linalg.hpp"

#include <algorithm>
#include <string>

#include <Eigen/SparseLU>

#include "tpns/error.hpp"

namespace tpns {

TripletAccumulator::TripletAccumulator(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw IndexOutOfRange("negative matrix dimension");
}

void TripletAccumulator::add(int row, int col, double value) {
  if (row < 0 || row >= rows_ || col < 0 || col >= cols_)
    throw IndexOutOfRange("triplet (" + std::to_string(row) + "," + std::to_string(col) + ") outside " +
                          std::to_string(rows_) + "x" + std::to_string(cols_));
  entries_.push_back({row, col, entries_.size(), value});
}

void TripletAccumulator::append(const TripletAccumulator& other) {
  if (other.rows_ != rows_ || other.cols_ != cols_) throw IndexOutOfRange("accumulator shape mismatch");
  for (const auto& e : other.entries_) entries_.push_back({e.row, e.col, entries_.size(), e.value});
}

SparseMatrix TripletAccumulator::finish() const {
  std::vector<Entry> sorted = entries_;
  std::sort(sorted.begin(), sorted.end(), [](const Entry& a, const Entry& b) {
    if (a.row != b.row) return a.row < b.row;
    if (a.col != b.col) return a.col < b.col;
    if (a.value != b.value) return a.value < b.value;
    return a.seq < b.seq;
  });
  SparseMatrix m(rows_, cols_);
  std::vector<int> per_row(rows_, 0);
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (i == 0 || sorted[i].row != sorted[i - 1].row || sorted[i].col != sorted[i - 1].col) ++per_row[sorted[i].row];
  m.reserve(per_row);
  for (std::size_t i = 0; i < sorted.size();) {
    double sum = 0.0;
    std::size_t j = i;
    for (; j < sorted.size() && sorted[j].row == sorted[i].row && sorted[j].col == sorted[i].col; ++j)
      sum += sorted[j].value;
    m.insert(sorted[i].row, sorted[i].col) = sum;
    i = j;
  }
  m.makeCompressed();
  return m;
}

struct LuSolver::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor, int>, Eigen::COLAMDOrdering<int>> lu;
  bool ok = false;
};

LuSolver::LuSolver() : impl_(std::make_unique<Impl>()) {}
LuSolver::~LuSolver() = default;
LuSolver::LuSolver(LuSolver&&) noexcept = default;
LuSolver& LuSolver::operator=(LuSolver&&) noexcept = default;

void LuSolver::factor(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw SingularMatrix("matrix is not square");
  impl_->ok = false;
  Eigen::SparseMatrix<double, Eigen::ColMajor, int> col = a;
  col.makeCompressed();
  impl_->lu.analyzePattern(col);
  impl_->lu.factorize(col);
  if (impl_->lu.info() != Eigen::Success) throw SingularMatrix(impl_->lu.lastErrorMessage());
  impl_->ok = true;
}

Vector LuSolver::solve(const Vector& b) const {
  if (!impl_->ok) throw SingularMatrix("solve called before a successful factorization");
  Vector x = impl_->lu.solve(b);
  if (impl_->lu.info() != Eigen::Success || !x.allFinite()) throw SingularMatrix("solve produced non-finite values");
  return x;
}

bool LuSolver::factored() const { return impl_->ok; }

Vector lu_solve(const SparseMatrix& a, const Vector& b) {
  LuSolver lu;
  lu.factor(a);
  return lu.solve(b);
}

void apply_dirichlet(SparseMatrix& a, Vector& b, const std::vector<int>& constrained, const Vector& values) {
  std::vector<char> mask(a.rows(), 0);
  for (int k : constrained) {
    if (k < 0 || k >= a.rows()) throw MissingBoundaryValue("constrained index out of range");
    if (k >= values.size()) throw MissingBoundaryValue("no value for constrained dof " + std::to_string(k));
    mask[k] = 1;
  }
  Vector g = Vector::Zero(a.rows());
  for (int k : constrained) g[k] = values[k];
  DirichletElimination elim(a, std::move(mask));
  b = elim.rhs(b, g);
  a = elim.matrix();
}

DirichletElimination::DirichletElimination(const SparseMatrix& a, std::vector<char> mask) : mask_(std::move(mask)) {
  TripletAccumulator kept(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
  TripletAccumulator coupling(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
  for (int r = 0; r < a.outerSize(); ++r) {
    if (mask_[r]) {
      kept.add(r, r, 1.0);
      continue;
    }
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      if (mask_[it.col()])
        coupling.add(r, static_cast<int>(it.col()), it.value());
      else
        kept.add(r, static_cast<int>(it.col()), it.value());
    }
  }
  eliminated_ = kept.finish();
  coupling_ = coupling.finish();
}

Vector DirichletElimination::rhs(const Vector& b, const Vector& g) const {
  Vector out = b - coupling_ * g;
  for (int i = 0; i < out.size(); ++i)
    if (mask_[i]) out[i] = g[i];
  return out;
}

SubsystemMap SubsystemMap::from_mask(const std::vector<char>& keep) {
  SubsystemMap m;
  m.local_of_global.assign(keep.size(), -1);
  for (int i = 0; i < static_cast<int>(keep.size()); ++i)
    if (keep[i]) {
      m.local_of_global[i] = static_cast<int>(m.global_of_local.size());
      m.global_of_local.push_back(i);
    }
  return m;
}

SparseMatrix SubsystemMap::restrict_matrix(const SparseMatrix& a) const {
  TripletAccumulator acc(size(), size());
  for (int lr = 0; lr < size(); ++lr)
    for (SparseMatrix::InnerIterator it(a, global_of_local[lr]); it; ++it) {
      const int lc = local_of_global[it.col()];
      if (lc >= 0) acc.add(lr, lc, it.value());
    }
  return acc.finish();
}

Vector SubsystemMap::restrict_vector(const Vector& v) const {
  Vector out(size());
  for (int i = 0; i < size(); ++i) out[i] = v[global_of_local[i]];
  return out;
}

Vector SubsystemMap::expand(const Vector& local, int n) const {
  Vector out = Vector::Zero(n);
  for (int i = 0; i < size(); ++i) out[global_of_local[i]] = local[i];
  return out;
}

SparseMatrix block2x2(const SparseMatrix& a, const SparseMatrix& b, const SparseMatrix& c, const SparseMatrix& d) {
  const int n0 = static_cast<int>(a.rows());
  const int m0 = static_cast<int>(a.cols());
  const int n1 = static_cast<int>(c.rows());
  const int m1 = static_cast<int>(b.cols());
  TripletAccumulator acc(n0 + n1, m0 + m1);
  acc.reserve(a.nonZeros() + b.nonZeros() + c.nonZeros() + d.nonZeros());
  const auto put = [&acc](const SparseMatrix& m, int r0, int c0) {
    for (int r = 0; r < m.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(m, r); it; ++it) acc.add(r0 + r, c0 + static_cast<int>(it.col()), it.value());
  };
  put(a, 0, 0);
  put(b, 0, m0);
  put(c, n0, 0);
  put(d, n0, m0);
  return acc.finish();
}

} // namespace tpns
