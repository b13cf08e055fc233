#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "greyknn/error.h"
#include "greyknn/io.h"
#include "greyknn/rng.h"
#include "greyknn/synth.h"
#include "support/fixtures.h"

using namespace greyknn;

namespace {

std::size_t missing_in(const Dataset& d, std::size_t col) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < d.rows(); ++i) c += d.cell(i, col).is_missing() ? 1 : 0;
  return c;
}

}  // namespace

TEST_CASE("counter generator is reproducible and stream separated") {
  CounterRng a(7), b(7), c(7, 1);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    differs = differs || x != c.next();
  }
  CHECK(differs);
  CounterRng u(1);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    sum += v;
  }
  CHECK(sum / 10000 == doctest::Approx(0.5).epsilon(0.02));
  for (int i = 0; i < 1000; ++i) CHECK(u.below(7) < 7);
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
}

TEST_CASE("cube scenario shape and extents") {
  const Dataset d = gen_cubes(1);
  CHECK(d.rows() == 400);
  CHECK(d.cols() == 23);
  CHECK(d.class_count() == 2);
  CHECK(validate(d).ok());
  std::size_t ones = 0;
  for (auto l : d.labels()) ones += l == 0 ? 1 : 0;
  CHECK(ones == 200);
  for (const auto& f : d.schema().features) CHECK(f.kind.is_continuous());
  for (std::size_t i = 0; i < 400; ++i) {
    CHECK(d.cell(i, 0).number() >= -0.7);
    CHECK(d.cell(i, 0).number() <= 0.5);
    for (std::size_t j = 3; j < 23; ++j) {
      CHECK(d.cell(i, j).number() >= -1.0);
      CHECK(d.cell(i, j).number() <= 1.0);
    }
  }
}

TEST_CASE("cube points sit inside their cube") {
  const double centres[4][3] = {{0, 0, 0}, {-0.2, -0.4, 0.4}, {-0.6, -0.6, 0.5}, {0.4, -0.2, -0.2}};
  const Dataset d = gen_cubes(4);
  for (std::size_t i = 0; i < 400; ++i) {
    bool inside = false;
    for (int c = 0; c < 4; ++c) {
      if (d.label(i) != static_cast<std::size_t>(c / 2)) continue;
      bool in = true;
      for (int a = 0; a < 3; ++a) in = in && std::fabs(d.cell(i, a).number() - centres[c][a]) <= 0.1 + 1e-15;
      inside = inside || in;
    }
    CHECK(inside);
  }
}

TEST_CASE("generators are deterministic per seed") {
  CHECK(write_csv(gen_cubes(5)) == write_csv(gen_cubes(5)));
  CHECK(write_csv(gen_cubes(5)) != write_csv(gen_cubes(6)));
  CHECK(write_csv(gen_mvn_mar(5).dataset) == write_csv(gen_mvn_mar(5).dataset));
}

TEST_CASE("multivariate normal scenario") {
  const MvnScenario s = gen_mvn_mar(2);
  CHECK(s.dataset.rows() == 400);
  CHECK(s.dataset.cols() == 5);
  CHECK(s.dataset.class_count() == 4);
  CHECK(validate(s.dataset).ok());
  std::vector<std::size_t> counts(4, 0);
  for (auto l : s.dataset.labels()) ++counts[l];
  for (auto c : counts) CHECK(c == 100);
  REQUIRE(s.covariances.size() == 4);
  for (const auto& cov : s.covariances) {
    CHECK((cov - cov.transpose()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
    for (int j = 0; j < 5; ++j) CHECK(cov(j, j) == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (int a = 0; a < 4; ++a) {
    CHECK(s.means[static_cast<std::size_t>(a)].cwiseAbs().maxCoeff() <= 1.0);
    for (int b = a + 1; b < 4; ++b) CHECK(s.means[static_cast<std::size_t>(a)] != s.means[static_cast<std::size_t>(b)]);
  }
  CHECK(s.mar.targets == std::vector<std::size_t>{3, 4});
  CHECK(s.mar.predictors == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("vine correlation is a valid correlation matrix") {
  CounterRng rng(3);
  for (int t = 0; t < 50; ++t) {
    const Eigen::MatrixXd c = vine_correlation(6, rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
    CHECK(c.diagonal().isOnes(1e-12));
    CHECK(c.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
  }
}

TEST_CASE("mcar at rate zero changes nothing") {
  const Dataset d = gen_cubes(1);
  const std::vector<std::size_t> cols{0};
  CHECK(inject_mcar(d, cols, 0.0, 1) == d);
}

TEST_CASE("mcar count follows the binomial mean") {
  const Dataset d = gen_cubes(1);
  const std::vector<std::size_t> cols{0};
  double total = 0;
  for (std::uint64_t s = 0; s < 100; ++s) total += static_cast<double>(missing_in(inject_mcar(d, cols, 0.1, s), 0));
  const double mean = total / 100;
  CHECK(mean >= 36.0);
  CHECK(mean <= 44.0);
}

TEST_CASE("mcar never restores missing cells and never edits values") {
  Dataset d = gen_cubes(2);
  const std::vector<std::size_t> cols{0, 1};
  const Dataset once = inject_mcar(d, cols, 0.2, 1);
  const Dataset twice = inject_mcar(once, cols, 0.2, 2);
  CHECK(twice.missing_count() >= once.missing_count());
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j) {
      if (!twice.cell(i, j).is_missing()) CHECK(twice.cell(i, j) == d.cell(i, j));
      if (once.cell(i, j).is_missing()) CHECK(twice.cell(i, j).is_missing());
    }
  }
  CHECK(validate(twice).ok());
}

TEST_CASE("mcar missingness is unrelated to the value") {
  // Chi-square on value quartile x missingness, pooled over seeds.
  const Dataset d = gen_cubes(3);
  std::vector<double> sorted;
  for (std::size_t i = 0; i < 400; ++i) sorted.push_back(d.cell(i, 0).number());
  std::sort(sorted.begin(), sorted.end());
  double table[4][2] = {};
  const std::vector<std::size_t> cols{0};
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Dataset m = inject_mcar(d, cols, 0.2, s);
    for (std::size_t i = 0; i < 400; ++i) {
      const double v = d.cell(i, 0).number();
      const auto q = std::min<std::size_t>(3, static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), v) -
                                                                      sorted.begin()) / 100);
      table[q][m.cell(i, 0).is_missing() ? 1 : 0] += 1;
    }
  }
  double total = 0, rowsum[4] = {}, colsum[2] = {};
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 2; ++b) {
      rowsum[a] += table[a][b];
      colsum[b] += table[a][b];
      total += table[a][b];
    }
  }
  double chi2 = 0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double e = rowsum[a] * colsum[b] / total;
      chi2 += (table[a][b] - e) * (table[a][b] - e) / e;
    }
  }
  // 3 degrees of freedom: 16.27 is the 0.999 quantile.
  CHECK(chi2 < 16.27);
}

TEST_CASE("mar with zero slope is constant-rate missingness") {
  const Dataset d = gen_cubes(4);
  MarSpec spec;
  spec.targets = {1};
  spec.predictors = {0};
  spec.coefficients = {{0.0}};
  spec.intercepts = {std::log(0.2 / 0.8)};
  double total = 0;
  for (std::uint64_t s = 0; s < 50; ++s) total += static_cast<double>(missing_in(inject_mar(d, spec, s).dataset, 1));
  CHECK(total / (50 * 400) == doctest::Approx(0.2).epsilon(0.05));
}

TEST_CASE("mar with a large slope tracks its predictor") {
  const Dataset d = gen_cubes(5);
  std::vector<double> x;
  for (std::size_t i = 0; i < 400; ++i) x.push_back(d.cell(i, 3).number());
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  const double q1 = sorted[100], q3 = sorted[300];
  MarSpec spec = MarSpec::calibrated({4}, {3}, 0.2, 6.0);
  int wins = 0;
  for (std::uint64_t s = 0; s < 40; ++s) {
    const Dataset m = inject_mar(d, spec, s).dataset;
    double top = 0, bottom = 0;
    for (std::size_t i = 0; i < 400; ++i) {
      if (!m.cell(i, 4).is_missing()) continue;
      if (x[i] >= q3) top += 1;
      if (x[i] < q1) bottom += 1;
    }
    wins += top > bottom ? 1 : 0;
  }
  CHECK(wins >= 38);
}

TEST_CASE("calibrated mar reaches its target rate") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const MvnScenario s = gen_mvn_mar(seed);
    const MarResult r = inject_mar(s.dataset, s.mar, seed + 10);
    for (auto t : s.mar.targets) {
      const double rate = static_cast<double>(missing_in(r.dataset, t)) / 400.0;
      CHECK(rate >= 0.095);
      CHECK(rate <= 0.105);
    }
    for (auto p : s.mar.predictors) CHECK(missing_in(r.dataset, p) == 0);
  }
}

TEST_CASE("mar rejects missing predictors and overlapping roles") {
  Dataset d = gen_cubes(1);
  d.set(0, 0, Cell::missing());
  MarSpec spec = MarSpec::calibrated({1}, {0}, 0.1);
  try {
    inject_mar(d, spec, 1);
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(e.kind() == ErrorKind::predictor_missing);
  }
  CHECK_THROWS_AS(MarSpec::calibrated({1}, {1}, 0.1).check(23), DataError);
}
