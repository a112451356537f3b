// learn.hpp
// Fully-connected binary classifier: ReLU hidden layers, one sigmoid
// output, dropout after the first hidden layer, Adam on binary
// cross-entropy. Deterministic given (seed, data).

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gme {

using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

struct FnnConfig {
  int input_dim = 0;
  std::vector<int> hidden;
  double dropout_after_first = 0.2;
  std::uint64_t seed = 0;
  double learning_rate = 1e-3;
  int batch_size = 256;
  int max_epochs = 200;
  int patience = 15;
};

struct FnnModel {
  FnnConfig config;
  std::vector<RMat> weights;  // weights[l] maps layer l inputs to outputs
  std::vector<RVec> biases;
  int trained_epochs = 0;
  // fingerprint of the device set whose features this model was trained
  // on; 0 when untrained
  std::uint64_t device_fingerprint = 0;
};

struct DatasetMeta {
  std::vector<int> dims;
  std::string layout = "full";
  std::uint64_t device_fingerprint = 0;
  std::vector<std::string> criteria;
  std::vector<std::uint64_t> seeds;
  double scale = 1.0;
};

struct LabeledDataset {
  RMat features;            // n_samples x feature_dim
  std::vector<int> labels;  // 0/1
  DatasetMeta meta;

  int size() const { return static_cast<int>(features.rows()); }
  int feature_dim() const { return static_cast<int>(features.cols()); }
};

struct TrainingReport {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  int best_epoch = 0;
};

FnnModel init_model(const FnnConfig& cfg);

double forward(const FnnModel& m, const RVec& x);
// Batch forward; when train_mode, dropout masks are drawn from rng with
// inverted scaling.
RVec forward_batch(const FnnModel& m, const RMat& x, bool train_mode, std::mt19937_64* rng);

double bce_loss(const RVec& predictions, const std::vector<int>& labels);

TrainingReport train(FnnModel& m, const LabeledDataset& data);

bool predict(const FnnModel& m, const RVec& x);
double evaluate(const FnnModel& m, const LabeledDataset& data);

// Analytic gradient of the mean BCE over a batch, flattened layerwise
// (w then b per layer); exposed for the finite-difference check.
std::vector<double> loss_gradient(const FnnModel& m, const RMat& x, const std::vector<int>& y);
std::vector<double*> parameter_view(FnnModel& m);

std::string model_to_json(const FnnModel& m);
FnnModel model_from_json(const std::string& text);
void save_model(const FnnModel& m, const std::string& path);
FnnModel load_model(const std::string& path);

void save_dataset(const LabeledDataset& d, const std::string& manifest_path);
LabeledDataset load_dataset(const std::string& manifest_path);

}  // namespace gme
