#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace tpns {

using Vector = Eigen::VectorXd;
/// Compressed sparse row storage, column indices strictly increasing per row.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Triplet accumulator. Duplicates are sorted by value before they are summed, so
/// the result is bitwise independent of insertion order.
class TripletAccumulator {
public:
  TripletAccumulator(int rows, int cols);

  void add(int row, int col, double value);
  void reserve(std::size_t n) { entries_.reserve(n); }
  /// Appends another accumulator's triplets after this one's.
  void append(const TripletAccumulator& other);
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return entries_.size(); }

  SparseMatrix finish() const;

private:
  struct Entry {
    int row, col;
    std::uint64_t seq;
    double value;
  };
  int rows_, cols_;
  std::vector<Entry> entries_;
};

inline TripletAccumulator assemble_begin(int rows, int cols) { return {rows, cols}; }
inline SparseMatrix assemble_finish(const TripletAccumulator& acc) { return acc.finish(); }

/// Sparse LU with partial pivoting; factor once, solve many times.
class LuSolver {
public:
  LuSolver();
  ~LuSolver();
  LuSolver(LuSolver&&) noexcept;
  LuSolver& operator=(LuSolver&&) noexcept;

  /// Throws SingularMatrix on a zero pivot.
  void factor(const SparseMatrix& a);
  Vector solve(const Vector& b) const;
  bool factored() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot factor and solve.
Vector lu_solve(const SparseMatrix& a, const Vector& b);

/// Strong imposition by symmetric elimination: constrained rows/columns are zeroed,
/// the diagonal set to one, and b corrected by the constrained columns.
/// `values` is indexed like b (only entries in `constrained` are read).
void apply_dirichlet(SparseMatrix& a, Vector& b, const std::vector<int>& constrained, const Vector& values);

/// Elimination split into the matrix part (done once) and the right-hand-side part
/// (done per solve), for systems whose matrix is reused.
class DirichletElimination {
public:
  DirichletElimination() = default;
  DirichletElimination(const SparseMatrix& a, std::vector<char> mask);

  const SparseMatrix& matrix() const { return eliminated_; }
  /// b - A g on free rows, g on constrained rows.
  Vector rhs(const Vector& b, const Vector& g) const;

private:
  SparseMatrix coupling_; // original columns of constrained dofs
  SparseMatrix eliminated_;
  std::vector<char> mask_;
};

/// Rows/columns of a global system kept by a local problem.
struct SubsystemMap {
  std::vector<int> global_of_local;
  std::vector<int> local_of_global; // -1 when absent

  static SubsystemMap from_mask(const std::vector<char>& keep);
  int size() const { return static_cast<int>(global_of_local.size()); }
  SparseMatrix restrict_matrix(const SparseMatrix& a) const;
  Vector restrict_vector(const Vector& v) const;
  /// Scatter a local vector into a zero global vector of length n.
  Vector expand(const Vector& local, int n) const;
};

/// Block matrix [[a, b],[c, d]]; empty blocks are given as zero-size matrices.
SparseMatrix block2x2(const SparseMatrix& a, const SparseMatrix& b, const SparseMatrix& c, const SparseMatrix& d);

} // namespace tpns
