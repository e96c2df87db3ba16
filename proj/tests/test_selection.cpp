#include <doctest.h>

#include <cmath>
#include <map>

#include "fedshot/distill.hpp"
#include "fedshot/rng.hpp"
#include "fedshot/selection.hpp"
#include "oracles.hpp"

using namespace fedshot;

namespace {

LocalModel make_svm_model(const std::string& id, std::size_t n_train,
                          std::optional<double> validation_auc,
                          std::uint64_t seed = 1) {
  const auto data = oracles::two_gaussians(std::max<std::size_t>(n_train, 4), 2,
                                           2.0, 0.8, seed);
  LocalModel model;
  model.device_id = id;
  model.n_train = n_train;
  model.validation_auc = validation_auc;
  model.body = train_svm(data, 0.1, {1.0}, 1e-5, 200, seed);
  return model;
}

LocalModel make_constant_model(const std::string& id, std::size_t n_train) {
  LocalModel model;
  model.device_id = id;
  model.n_train = n_train;
  model.body = ConstantModel{0.0};
  return model;
}

}  // namespace

TEST_CASE("eligibility keeps SVM models at or above the threshold, in order") {
  std::vector<LocalModel> models;
  models.push_back(make_svm_model("a", 10, 0.6));
  models.push_back(make_svm_model("b", 30, 0.7));
  models.push_back(make_svm_model("c", 60, 0.8));

  const auto kept = eligible(models, 30);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0]->device_id == "b");  // 30 passes: threshold is inclusive
  CHECK(kept[1]->device_id == "c");

  CHECK(eligible(models, 1).size() == 3);

  std::vector<LocalModel> constants;
  constants.push_back(make_constant_model("x", 500));
  constants.push_back(make_constant_model("y", 500));
  CHECK(eligible(constants, 1).empty());
}

TEST_CASE("cv selection filters, ranks and tie-breaks") {
  std::vector<LocalModel> models;
  models.push_back(make_svm_model("d1", 50, 0.9, 1));
  models.push_back(make_svm_model("d2", 50, 0.7, 2));
  models.push_back(make_svm_model("d3", 50, std::nullopt, 3));
  const auto cands = eligible(models, 1);

  const auto picked = select_cv(cands, 0.75, 10);
  REQUIRE(picked.members.size() == 1);
  CHECK(picked.members[0]->device_id == "d1");

  std::vector<LocalModel> tied;
  tied.push_back(make_svm_model("d5", 40, 0.8, 4));
  tied.push_back(make_svm_model("d2", 40, 0.8, 5));
  const auto tie_cands = eligible(tied, 1);
  const auto tie_pick = select_cv(tie_cands, 0.5, 1);
  REQUIRE(tie_pick.members.size() == 1);
  CHECK(tie_pick.members[0]->device_id == "d2");

  const auto all = select_cv(cands, 0.0, 100);
  REQUIRE(all.members.size() == 2);  // undefined validation AUC never passes
  CHECK(all.members[0]->device_id == "d1");
  CHECK(all.members[1]->device_id == "d2");

  CHECK_THROWS_WITH(select_cv(cands, 0.95, 3), doctest::Contains("empty ensemble"));
}

TEST_CASE("data selection filters, ranks and tie-breaks") {
  std::vector<LocalModel> models;
  models.push_back(make_svm_model("a", 100, 0.6, 1));
  models.push_back(make_svm_model("b", 50, 0.6, 2));
  models.push_back(make_svm_model("c", 40, 0.6, 3));
  const auto cands = eligible(models, 1);

  const auto picked = select_data(cands, 45, 2);
  REQUIRE(picked.members.size() == 2);
  CHECK(picked.members[0]->device_id == "a");
  CHECK(picked.members[1]->device_id == "b");

  std::vector<LocalModel> tied;
  tied.push_back(make_svm_model("z", 70, 0.6, 4));
  tied.push_back(make_svm_model("m", 70, 0.6, 5));
  const auto tie_pick = select_data(eligible(tied, 1), 1, 1);
  CHECK(tie_pick.members[0]->device_id == "m");

  CHECK_THROWS_WITH(select_data(cands, 101, 2), doctest::Contains("empty ensemble"));
}

TEST_CASE("random selection is seeded and uniform over pairs") {
  std::vector<LocalModel> models;
  for (const char* id : {"w", "x", "y", "z"}) {
    models.push_back(make_svm_model(id, 40, 0.6, id[0]));
  }
  const auto cands = eligible(models, 1);

  const auto all = select_random(cands, 10, 42);
  CHECK(all.members.size() == 4);

  const auto a = select_random(cands, 2, 7);
  const auto b = select_random(cands, 2, 7);
  REQUIRE(a.members.size() == 2);
  CHECK(a.members[0] == b.members[0]);
  CHECK(a.members[1] == b.members[1]);

  CHECK_THROWS(select_random({}, 2, 7));

  // Frequency of each unordered pair over 10,000 seeds: expected 1/6 each,
  // tolerance 3 sigma of the binomial proportion.
  std::map<std::pair<std::string, std::string>, int> counts;
  const int trials = 10000;
  for (int seed = 0; seed < trials; ++seed) {
    const auto pick = select_random(cands, 2, 1000 + seed);
    auto ids = std::minmax(pick.members[0]->device_id, pick.members[1]->device_id);
    counts[{ids.first, ids.second}]++;
  }
  CHECK(counts.size() == 6);
  const double p = 1.0 / 6.0;
  const double sigma = std::sqrt(p * (1 - p) / trials);
  for (const auto& [pair, count] : counts) {
    CHECK(std::abs(count / static_cast<double>(trials) - p) <= 3 * sigma);
  }
}

TEST_CASE("full selection takes all candidates by ascending device id") {
  std::vector<LocalModel> models;
  models.push_back(make_svm_model("b", 40, 0.6, 1));
  models.push_back(make_svm_model("a", 50, 0.7, 2));
  const auto full = select_full(eligible(models, 1));
  REQUIRE(full.members.size() == 2);
  CHECK(full.members[0]->device_id == "a");
  CHECK(full.members[1]->device_id == "b");
  CHECK_THROWS(select_full({}));
}

TEST_CASE("singleton ensemble prediction is bitwise the member decision") {
  std::vector<LocalModel> models;
  models.push_back(make_svm_model("solo", 20, 0.6, 9));
  const Ensemble single{{&models[0]}, Aggregation::MeanDecision};
  Rng rng(10);
  for (int rep = 0; rep < 1000; ++rep) {
    const double x[2] = {rng.normal(), rng.normal()};
    CHECK(ensemble_predict(single, x) == models[0].decision(x));
  }
}

TEST_CASE("ensemble prediction averages member decisions") {
  std::vector<LocalModel> models;
  for (double score : {0.4, -0.4}) {
    LocalModel m;
    m.device_id = score > 0 ? "p" : "n";
    m.n_train = 1;
    m.body = ConstantModel{score};
    models.push_back(std::move(m));
  }
  const Ensemble pair{{&models[0], &models[1]}, Aggregation::MeanDecision};
  const double x[1] = {0.0};
  CHECK(ensemble_predict(pair, x) == 0.0);

  std::vector<LocalModel> three;
  for (double score : {1.0, 0.5, -0.5}) {
    LocalModel m;
    m.device_id = "c" + std::to_string(three.size());
    m.n_train = 1;
    m.body = ConstantModel{score};
    three.push_back(std::move(m));
  }
  const Ensemble trio{{&three[0], &three[1], &three[2]}, Aggregation::MeanDecision};
  CHECK(ensemble_predict(trio, x) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("mean-decision prediction is member-permutation invariant within 1e-12") {
  std::vector<LocalModel> models;
  for (int i = 0; i < 5; ++i) {
    models.push_back(make_svm_model("m" + std::to_string(i), 20, 0.6, 20 + i));
  }
  Ensemble fwd{{&models[0], &models[1], &models[2], &models[3], &models[4]},
               Aggregation::MeanDecision};
  Ensemble rev{{&models[4], &models[3], &models[2], &models[1], &models[0]},
               Aggregation::MeanDecision};
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const double x[2] = {rng.normal(), rng.normal()};
    CHECK(std::abs(ensemble_predict(fwd, x) - ensemble_predict(rev, x)) <= 1e-12);
  }
}

TEST_CASE("mean-sign prediction sign survives monotone member transforms") {
  // Scaling every member's decision by a positive factor (a strictly
  // increasing, sign-preserving map) cannot change the mean-sign output.
  std::vector<LocalModel> models, scaled;
  Rng rng(13);
  for (int i = 0; i < 3; ++i) {
    const double v = rng.normal();
    LocalModel m;
    m.device_id = "s" + std::to_string(i);
    m.n_train = 1;
    m.body = ConstantModel{v};
    models.push_back(m);
    m.body = ConstantModel{v * 7.5};
    scaled.push_back(std::move(m));
  }
  const Ensemble base{{&models[0], &models[1], &models[2]}, Aggregation::MeanSign};
  const Ensemble xformed{{&scaled[0], &scaled[1], &scaled[2]}, Aggregation::MeanSign};
  const double x[1] = {0.0};
  CHECK(ensemble_predict(base, x) == ensemble_predict(xformed, x));
}

TEST_CASE("communication cost is additive over member records") {
  std::vector<LocalModel> models;
  for (int i = 0; i < 3; ++i) {
    models.push_back(make_svm_model("c" + std::to_string(i), 15, 0.6, 40 + i));
  }
  const Ensemble ensemble{{&models[0], &models[1], &models[2]},
                          Aggregation::MeanDecision};
  const auto cost = comm_cost(ensemble);

  std::uint64_t member_sum = 0;
  for (const auto* m : ensemble.members) member_sum += serialize_model(*m).size();
  CHECK(cost.up_bytes == member_sum);
  CHECK(cost.up_models == 3);
  CHECK(cost.down_models == 3);
  CHECK(cost.down_bytes == serialize_ensemble(ensemble).size());
  CHECK(cost.down_bytes > member_sum);  // envelope overhead

  // A distilled model replaces the ensemble on the down link.
  ProxySet proxy;
  proxy.points = Points(2);
  proxy.points.data = {0.0, 0.0, 1.0, 0.5};
  proxy.provenance = "external-file";
  const std::vector<double> targets{0.3, -0.2};
  const auto student = distill(proxy, targets, {1.0}, 1e-8);
  const auto with_student = comm_cost(ensemble, &student);
  CHECK(with_student.up_bytes == member_sum);
  CHECK(with_student.down_bytes == serialize_distilled(student).size());
  CHECK(with_student.down_models == 1);
}
