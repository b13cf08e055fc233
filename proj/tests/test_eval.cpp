#include <doctest.h>

#include <cmath>
#include <vector>

#include "greyknn/error.h"
#include "greyknn/eval.h"
#include "greyknn/folds.h"
#include "greyknn/rng.h"
#include "support/fixtures.h"

using namespace greyknn;

namespace {

Dataset one_feature(const std::vector<double>& x, const Labels& y) {
  std::vector<std::vector<std::optional<double>>> rows;
  for (double v : x) rows.push_back({v});
  return fixtures::numeric(rows, y);
}

}  // namespace

TEST_CASE("rmse on the normalised scale") {
  const Dataset truth = fixtures::numeric({{0.0}, {0.5}, {1.0}});
  const std::vector<CellPosition> mask{{0, 0}, {1, 0}};
  CHECK(rmse(truth, truth, mask) == 0.0);
  const Dataset off = fixtures::numeric({{0.1}, {0.4}, {1.0}});
  CHECK(rmse(truth, off, mask) == doctest::Approx(0.1).epsilon(1e-14));

  const Dataset wide = fixtures::numeric({{0.0}, {5.0}, {10.0}});
  const Dataset wide_off = fixtures::numeric({{1.0}, {4.0}, {10.0}});
  CHECK(rmse(wide, wide_off, mask) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK_THROWS_AS(rmse(truth, off, std::vector<CellPosition>{}), DataError);
}

TEST_CASE("rmse counts categorical cells as right or wrong") {
  Schema s;
  s.features.push_back({"c", FeatureKind::categorical({"a", "b"})});
  Dataset truth(s, 4, {Cell::category(0), Cell::category(1), Cell::category(0), Cell::category(1)});
  Dataset guess = truth;
  guess.set(2, 0, Cell::category(1));
  const std::vector<CellPosition> mask{{0, 0}, {1, 0}, {2, 0}, {3, 0}};
  CHECK(rmse(truth, guess, mask) == doctest::Approx(0.5).epsilon(1e-15));
  const std::vector<CellPosition> reordered{{3, 0}, {2, 0}, {1, 0}, {0, 0}};
  CHECK(rmse(truth, guess, reordered) == rmse(truth, guess, mask));
}

TEST_CASE("injected cells lists new gaps only") {
  const Dataset truth = fixtures::numeric({{1.0, std::nullopt}, {2.0, 3.0}});
  const Dataset holes = fixtures::numeric({{std::nullopt, std::nullopt}, {2.0, std::nullopt}});
  const auto cells = injected_cells(truth, holes);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0] == CellPosition{0, 0});
  CHECK(cells[1] == CellPosition{1, 1});
}

TEST_CASE("naive bayes separates distant classes") {
  CounterRng rng(1);
  std::vector<double> x;
  Labels y;
  for (int i = 0; i < 100; ++i) {
    const bool hi = i % 2;
    x.push_back((hi ? 10.0 : -10.0) + rng.normal());
    y.push_back(hi ? 1 : 0);
  }
  const NaiveBayesModel m = nb_fit(one_feature(x, y));
  CHECK(m.priors[0] + m.priors[1] == doctest::Approx(1.0).epsilon(1e-15));
  const std::vector<Cell> nine{Cell::number(9.0)};
  CHECK(nb_predict(m, nine) == 1);
  const std::vector<Cell> huge{Cell::number(1e6)};
  const auto post = nb_log_posterior(m, huge);
  CHECK(std::isfinite(post[0]));
  CHECK(std::isfinite(post[1]));
}

TEST_CASE("naive bayes on an uninformative feature is at chance") {
  CounterRng rng(2);
  std::vector<double> x, tx;
  Labels y, ty;
  for (int i = 0; i < 500; ++i) {
    x.push_back(rng.normal());
    y.push_back(i % 2);
    tx.push_back(rng.normal());
    ty.push_back(rng.uniform() < 0.5 ? 0 : 1);
  }
  const auto pred = naive_bayes_classifier(one_feature(x, y), one_feature(tx, ty));
  CHECK(classification_accuracy(pred, ty) == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("naive bayes smooths an unseen level") {
  Schema s;
  s.features.push_back({"c", FeatureKind::categorical({"a", "b", "z"})});
  s.class_column = "y";
  s.class_levels = {"p", "q"};
  const Dataset d(s, 4, {Cell::category(0), Cell::category(0), Cell::category(1), Cell::category(1)}, Labels{0, 0, 1, 1});
  const NaiveBayesModel m = nb_fit(d);
  for (const auto& cls : m.level_probs) {
    double sum = 0;
    for (double p : cls[0]) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  }
  const std::vector<Cell> unseen{Cell::category(2)};
  CHECK(nb_predict(m, unseen) == 0);
}

TEST_CASE("naive bayes rejects a one-row class") {
  const Dataset d = one_feature({0.0, 1.0, 2.0}, Labels{0, 0, 1});
  try {
    nb_fit(d);
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(e.kind() == ErrorKind::degenerate_class);
  }
}

TEST_CASE("classification accuracy") {
  const std::vector<std::size_t> a{0, 1, 2, 1}, b{0, 1, 2, 1}, c{1, 0, 0, 0}, d{0, 1, 2, 0};
  CHECK(classification_accuracy(a, b) == 1.0);
  CHECK(classification_accuracy(a, c) == 0.0);
  CHECK(classification_accuracy(a, d) == 0.75);
  const std::vector<std::size_t> shorter{0};
  CHECK_THROWS_AS(classification_accuracy(a, shorter), DataError);
}

TEST_CASE("stratified folds are balanced and reproducible") {
  Labels y;
  for (int i = 0; i < 103; ++i) y.push_back(i % 3 == 0 ? 1 : 0);
  const auto a = stratified_folds(y, 2, 10, 9), b = stratified_folds(y, 2, 10, 9);
  CHECK(a == b);
  CHECK(a != stratified_folds(y, 2, 10, 10));
  for (std::size_t c = 0; c < 2; ++c) {
    std::vector<int> per(10, 0);
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == c) ++per[a[i]];
    }
    CHECK(*std::max_element(per.begin(), per.end()) - *std::min_element(per.begin(), per.end()) <= 1);
  }
  const Labels small{0, 0, 0, 1, 1, 1};
  CHECK(effective_fold_count(small, 2, 10) == 3);
  const Labels tiny{0, 1, 1, 1};
  CHECK(effective_fold_count(tiny, 2, 10) == 2);
}

TEST_CASE("cross-validated accuracy") {
  CounterRng rng(3);
  std::vector<double> x;
  Labels y;
  for (int i = 0; i < 200; ++i) {
    y.push_back(i % 2);
    x.push_back((i % 2 ? 5.0 : -5.0) + rng.normal() * 0.2);
  }
  const CvResult sep = kfold_cv(one_feature(x, y), 10, 1);
  CHECK(sep.mean_accuracy == 1.0);
  CHECK(sep.folds == 10);
  CHECK(sep.fold_accuracy.size() == 10);

  Labels shuffled;
  for (int i = 0; i < 200; ++i) shuffled.push_back(rng.uniform() < 0.5 ? 0 : 1);
  const CvResult chance = kfold_cv(one_feature(x, shuffled), 10, 1);
  CHECK(chance.mean_accuracy == doctest::Approx(0.5).epsilon(0.2));
  CHECK(kfold_cv(one_feature(x, shuffled), 10, 1).fold_accuracy == chance.fold_accuracy);
}

TEST_CASE("complete-case baseline classifies rows with gaps") {
  const Dataset train = fixtures::numeric({{0.0, 0.0}, {0.1, std::nullopt}, {0.2, 0.1}, {5.0, 5.0}, {5.1, 5.1}, {5.2, 4.9}},
                                          Labels{0, 0, 0, 1, 1, 1});
  const Dataset test = fixtures::numeric({{std::nullopt, 0.05}, {5.0, std::nullopt}}, Labels{0, 1});
  const auto pred = complete_case_classifier(train, test);
  CHECK(pred == std::vector<std::size_t>{0, 1});
}
