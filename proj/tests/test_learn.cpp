#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "gme/learn.hpp"

using namespace gme;

namespace {

// Two well-separated Gaussian blobs; linearly separable almost surely.
LabeledDataset blob_dataset(int n, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 0.6);
  LabeledDataset d;
  d.features = RMat(n, dim);
  d.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    int label = i % 2;
    double center = label ? 1.5 : -1.5;
    for (int j = 0; j < dim; ++j) d.features(i, j) = center + gauss(rng);
    d.labels[i] = label;
  }
  d.meta.dims = {dim};
  return d;
}

}  // namespace

TEST_CASE("init_model shapes and determinism") {
  FnnConfig cfg;
  cfg.input_dim = 10;
  cfg.hidden = {8, 6};
  cfg.seed = 3;
  FnnModel m = init_model(cfg);
  REQUIRE(m.weights.size() == 3);
  CHECK(m.weights[0].rows() == 8);
  CHECK(m.weights[0].cols() == 10);
  CHECK(m.weights[1].rows() == 6);
  CHECK(m.weights[2].rows() == 1);
  CHECK(m.biases[2].size() == 1);
  FnnModel m2 = init_model(cfg);
  CHECK((m.weights[0] - m2.weights[0]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward matches forward_batch in eval mode") {
  FnnConfig cfg;
  cfg.input_dim = 5;
  cfg.hidden = {7, 4};
  cfg.seed = 11;
  FnnModel m = init_model(cfg);
  RMat x(3, 5);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 5; ++j) x(i, j) = g(rng);
  RVec batch = forward_batch(m, x, false, nullptr);
  for (int i = 0; i < 3; ++i) {
    double single = forward(m, x.row(i).transpose());
    CHECK(std::abs(batch(i) - single) < 1e-12);
    CHECK(single > 0.0);
    CHECK(single < 1.0);
  }
}

TEST_CASE("dropout is inactive at rate zero and rescales otherwise") {
  FnnConfig cfg;
  cfg.input_dim = 4;
  cfg.hidden = {50, 10};
  cfg.seed = 21;
  cfg.dropout_after_first = 0.0;
  FnnModel m = init_model(cfg);
  RMat x = RMat::Constant(2, 4, 0.3);
  std::mt19937_64 rng(5);
  RVec train_out = forward_batch(m, x, true, &rng);
  RVec eval_out = forward_batch(m, x, false, nullptr);
  CHECK((train_out - eval_out).cwiseAbs().maxCoeff() < 1e-12);

  // With dropout on, the train-mode average over many masks approaches the
  // eval output of the first layer; check the weaker property that outputs
  // vary by mask yet stay centered near the eval value.
  m.config.dropout_after_first = 0.5;
  double mean = 0.0;
  const int reps = 3000;
  for (int r = 0; r < reps; ++r) mean += forward_batch(m, x, true, &rng)(0);
  mean /= reps;
  CHECK(std::abs(mean - eval_out(0)) < 0.05);
}

TEST_CASE("bce_loss on known predictions") {
  RVec p(2);
  p << 0.5, 0.5;
  CHECK(std::abs(bce_loss(p, {1, 0}) - std::log(2.0)) < 1e-12);
  RVec q(1);
  q << 1.0;  // clamped internally, must stay finite
  CHECK(std::isfinite(bce_loss(q, {0})));
}

TEST_CASE("analytic gradient matches finite differences") {
  FnnConfig cfg;
  cfg.input_dim = 6;
  cfg.hidden = {5, 4};
  cfg.seed = 31;
  FnnModel m = init_model(cfg);
  RMat x(8, 6);
  std::vector<int> y(8);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 6; ++j) x(i, j) = g(rng);
    y[i] = i % 2;
  }
  std::vector<double> grad = loss_gradient(m, x, y);
  std::vector<double*> params = parameter_view(m);
  REQUIRE(grad.size() == params.size());
  const double eps = 1e-6;
  double worst = 0.0;
  for (size_t k = 0; k < params.size(); k += 7) {
    double saved = *params[k];
    *params[k] = saved + eps;
    double up = bce_loss(forward_batch(m, x, false, nullptr), y);
    *params[k] = saved - eps;
    double down = bce_loss(forward_batch(m, x, false, nullptr), y);
    *params[k] = saved;
    double fd = (up - down) / (2 * eps);
    double denom = std::max({std::abs(fd), std::abs(grad[k]), 1e-8});
    worst = std::max(worst, std::abs(fd - grad[k]) / denom);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("training separates blobs and is deterministic") {
  LabeledDataset data = blob_dataset(400, 4, 42);
  FnnConfig cfg;
  cfg.input_dim = 4;
  cfg.hidden = {16, 8};
  cfg.seed = 5;
  cfg.max_epochs = 60;
  FnnModel m = init_model(cfg);
  TrainingReport rep = train(m, data);
  CHECK(!rep.train_loss.empty());
  CHECK(!rep.val_loss.empty());
  CHECK(evaluate(m, data) > 0.95);

  FnnModel m2 = init_model(cfg);
  train(m2, data);
  for (size_t l = 0; l < m.weights.size(); ++l) {
    CHECK((m.weights[l] - m2.weights[l]).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("model json round trip preserves predictions exactly") {
  LabeledDataset data = blob_dataset(200, 3, 43);
  FnnConfig cfg;
  cfg.input_dim = 3;
  cfg.hidden = {10, 5};
  cfg.seed = 8;
  cfg.max_epochs = 30;
  FnnModel m = init_model(cfg);
  train(m, data);
  m.device_fingerprint = 0xdeadbeefULL;
  FnnModel back = model_from_json(model_to_json(m));
  CHECK(back.device_fingerprint == 0xdeadbeefULL);
  CHECK(back.config.hidden == cfg.hidden);
  for (int i = 0; i < data.size(); ++i) {
    RVec x = data.features.row(i).transpose();
    CHECK(forward(back, x) == forward(m, x));
  }
  std::string path = "/tmp/gme_test_model.json";
  save_model(m, path);
  FnnModel loaded = load_model(path);
  CHECK(forward(loaded, data.features.row(0).transpose()) ==
        forward(m, data.features.row(0).transpose()));
  std::remove(path.c_str());
}

TEST_CASE("dataset save/load round trip") {
  LabeledDataset d = blob_dataset(50, 6, 44);
  d.meta.layout = "full";
  d.meta.device_fingerprint = 123456789ULL;
  d.meta.criteria = {"guhne3", "none"};
  d.meta.seeds = {1, 2, 3};
  d.meta.scale = 0.5;
  std::string path = "/tmp/gme_test_dataset.json";
  save_dataset(d, path);
  LabeledDataset back = load_dataset(path);
  CHECK(back.size() == 50);
  CHECK(back.feature_dim() == 6);
  CHECK(back.labels == d.labels);
  CHECK(back.meta.device_fingerprint == 123456789ULL);
  CHECK(back.meta.criteria == d.meta.criteria);
  CHECK(back.meta.scale == 0.5);
  // Raw features stored as f32: agreement to float precision.
  CHECK((back.features - d.features).cwiseAbs().maxCoeff() < 1e-6);
  std::remove(path.c_str());
  std::remove("/tmp/gme_test_dataset.bin");
}
