#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "tpns/error.hpp"
#include "tpns/linalg.hpp"

using namespace tpns;

namespace {

bool bitwise_equal(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.nonZeros() != b.nonZeros()) return false;
  for (int r = 0; r < a.outerSize(); ++r) {
    SparseMatrix::InnerIterator ia(a, r), ib(b, r);
    for (; ia && ib; ++ia, ++ib)
      if (ia.col() != ib.col() || std::bit_cast<std::uint64_t>(ia.value()) != std::bit_cast<std::uint64_t>(ib.value()))
        return false;
    if (ia || ib) return false;
  }
  return true;
}

SparseMatrix from_dense(const Eigen::MatrixXd& d) {
  TripletAccumulator acc(static_cast<int>(d.rows()), static_cast<int>(d.cols()));
  for (int i = 0; i < d.rows(); ++i)
    for (int j = 0; j < d.cols(); ++j)
      if (d(i, j) != 0.0) acc.add(i, j, d(i, j));
  return acc.finish();
}

} // namespace

TEST_SUITE("linalg") {
  TEST_CASE("duplicates are summed") {
    auto acc = assemble_begin(2, 2);
    acc.add(0, 0, 1.0);
    acc.add(0, 0, 2.0);
    const SparseMatrix m = assemble_finish(acc);
    CHECK(m.nonZeros() == 1);
    CHECK(m.coeff(0, 0) == 3.0);
  }

  TEST_CASE("empty accumulator") {
    const SparseMatrix m = assemble_finish(assemble_begin(3, 4));
    CHECK(m.rows() == 3);
    CHECK(m.cols() == 4);
    CHECK(m.nonZeros() == 0);
  }

  TEST_CASE("out of range triplets are rejected") {
    auto acc = assemble_begin(2, 2);
    CHECK_THROWS_AS(acc.add(2, 0, 1.0), IndexOutOfRange);
    CHECK_THROWS_AS(acc.add(0, -1, 1.0), IndexOutOfRange);
  }

  TEST_CASE("summation is independent of insertion order") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_int_distribution<int> idx(0, 4);
    struct T {
      int r, c;
      double v;
    };
    std::vector<T> ts;
    // Values of very different magnitude, so the sum depends on the order it is taken in.
    for (int i = 0; i < 2000; ++i) ts.push_back({idx(rng), idx(rng), val(rng) * std::pow(10.0, idx(rng) * 4 - 8)});
    auto build = [&](const std::vector<T>& order) {
      TripletAccumulator acc(5, 5);
      for (const auto& t : order) acc.add(t.r, t.c, t.v);
      return acc.finish();
    };
    const SparseMatrix a = build(ts);
    for (int trial = 0; trial < 5; ++trial) {
      auto shuffled = ts;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      CHECK(bitwise_equal(a, build(shuffled)));
    }
    // Splitting across accumulators and appending gives the same matrix too.
    TripletAccumulator left(5, 5), right(5, 5);
    for (std::size_t i = 0; i < ts.size(); ++i) (i % 3 ? left : right).add(ts[i].r, ts[i].c, ts[i].v);
    right.append(left);
    CHECK(bitwise_equal(a, right.finish()));
  }

  TEST_CASE("compressed rows have increasing columns") {
    auto acc = assemble_begin(3, 3);
    acc.add(1, 2, 1.0);
    acc.add(1, 0, 1.0);
    acc.add(1, 1, 1.0);
    const SparseMatrix m = acc.finish();
    int prev = -1;
    for (SparseMatrix::InnerIterator it(m, 1); it; ++it) {
      CHECK(it.col() > prev);
      prev = it.col();
    }
  }

  TEST_CASE("small solves") {
    const SparseMatrix id = from_dense(Eigen::MatrixXd::Identity(4, 4));
    const Vector b = Vector::LinSpaced(4, 1.0, 4.0);
    CHECK((lu_solve(id, b) - b).norm() == 0.0);
    Eigen::MatrixXd a(2, 2);
    a << 2, 1, 1, 3;
    const Vector x = lu_solve(from_dense(a), Vector((Vector(2) << 3, 4).finished()));
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(1.0));
  }

  TEST_CASE("random SPD system against dense elimination") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    Eigen::MatrixXd r(50, 50);
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) r(i, j) = g(rng);
    const Eigen::MatrixXd a = r * r.transpose() + 50.0 * Eigen::MatrixXd::Identity(50, 50);
    Vector b(50);
    for (int i = 0; i < 50; ++i) b[i] = g(rng);
    const Vector dense = a.fullPivLu().solve(b);
    const Vector sparse = lu_solve(from_dense(a), b);
    CHECK((dense - sparse).lpNorm<Eigen::Infinity>() < 1e-10);
  }

  TEST_CASE("singular matrix") {
    Eigen::MatrixXd a(2, 2);
    a << 1, 2, 2, 4;
    LuSolver lu;
    CHECK_THROWS_AS(lu.factor(from_dense(a)), SingularMatrix);
    CHECK(!lu.factored());
  }

  TEST_CASE("dirichlet elimination") {
    // Chain -u'' = 0 with ends fixed at 1 and 3: interior value 2.
    Eigen::MatrixXd d(3, 3);
    d << 1, -1, 0, -1, 2, -1, 0, -1, 1;
    SparseMatrix a = from_dense(d);
    Vector b = Vector::Zero(3);
    Vector g(3);
    g << 1, 0, 3;
    apply_dirichlet(a, b, {0, 2}, g);
    const Vector x = lu_solve(a, b);
    CHECK(x[0] == 1.0);
    CHECK(x[1] == doctest::Approx(2.0));
    CHECK(x[2] == 3.0);
    // Symmetric elimination keeps symmetry.
    CHECK((Eigen::MatrixXd(a) - Eigen::MatrixXd(a).transpose()).norm() == 0.0);

    SparseMatrix all = from_dense(d + Eigen::MatrixXd::Identity(3, 3));
    Vector rhs = Vector::Ones(3);
    const Vector vals = (Vector(3) << 4, 5, 6).finished();
    apply_dirichlet(all, rhs, {0, 1, 2}, vals);
    CHECK((lu_solve(all, rhs) - vals).norm() == 0.0);

    SparseMatrix z = from_dense(d + Eigen::MatrixXd::Identity(3, 3));
    Vector bz = (Vector(3) << 7, 8, 9).finished();
    apply_dirichlet(z, bz, {1}, Vector::Zero(3));
    CHECK(bz[0] == 7.0);
    CHECK(bz[1] == 0.0);
    CHECK(bz[2] == 9.0);
  }

  TEST_CASE("split elimination matches the one-shot version") {
    Eigen::MatrixXd d(4, 4);
    d << 4, -1, 0, -1, -1, 4, -1, 0, 0, -1, 4, -1, -1, 0, -1, 4;
    const SparseMatrix a = from_dense(d);
    const Vector b = (Vector(4) << 1, 2, 3, 4).finished();
    const Vector g = (Vector(4) << 0, 5, 0, -2).finished();
    SparseMatrix a1 = a;
    Vector b1 = b;
    apply_dirichlet(a1, b1, {1, 3}, g);
    const DirichletElimination e(a, {0, 1, 0, 1});
    CHECK(bitwise_equal(a1, e.matrix()));
    CHECK((e.rhs(b, g) - b1).norm() == 0.0);
  }

  TEST_CASE("subsystem restriction and expansion") {
    const auto map = SubsystemMap::from_mask({1, 0, 1, 1});
    CHECK(map.size() == 3);
    CHECK(map.local_of_global[1] == -1);
    const Vector v = (Vector(4) << 1, 2, 3, 4).finished();
    const Vector r = map.restrict_vector(v);
    CHECK(r[1] == 3.0);
    const Vector e = map.expand(r, 4);
    CHECK(e[1] == 0.0);
    CHECK(e[3] == 4.0);
    Eigen::MatrixXd d = Eigen::MatrixXd::Random(4, 4);
    const Eigen::MatrixXd sub = Eigen::MatrixXd(map.restrict_matrix(from_dense(d)));
    CHECK(sub(2, 0) == d(3, 0));
    CHECK(sub(1, 2) == d(2, 3));
  }

  TEST_CASE("block assembly") {
    const SparseMatrix a = from_dense(Eigen::MatrixXd::Identity(2, 2));
    const SparseMatrix b = from_dense(Eigen::MatrixXd::Constant(2, 1, 2.0));
    const SparseMatrix c = from_dense(Eigen::MatrixXd::Constant(1, 2, 3.0));
    const SparseMatrix d(1, 1);
    const Eigen::MatrixXd m = Eigen::MatrixXd(block2x2(a, b, c, d));
    CHECK(m.rows() == 3);
    CHECK(m(0, 2) == 2.0);
    CHECK(m(2, 1) == 3.0);
    CHECK(m(2, 2) == 0.0);
  }
}
