#include "gme/learn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "gme/qcore.hpp"

static_assert(std::endian::native == std::endian::little,
              "raw dataset files are little-endian");

namespace gme {

namespace {

constexpr double kClampLo = 1e-7;
constexpr double kClampHi = 1.0 - 1e-7;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<int> layer_sizes(const FnnConfig& cfg) {
  std::vector<int> sizes{cfg.input_dim};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(1);
  return sizes;
}

struct ForwardPass {
  std::vector<RMat> activations;  // activations[0] = input
  std::vector<RMat> masks;        // dropout masks, empty when unused
  RVec output;
};

ForwardPass run_forward(const FnnModel& m, const RMat& x, bool train_mode,
                        std::mt19937_64* rng) {
  if (x.cols() != m.config.input_dim)
    throw std::invalid_argument("forward: feature length mismatch");
  ForwardPass fp;
  fp.activations.push_back(x);
  fp.masks.resize(m.weights.size());
  RMat a = x;
  const size_t n_layers = m.weights.size();
  for (size_t l = 0; l < n_layers; ++l) {
    RMat z = (a * m.weights[l].transpose()).rowwise() + m.biases[l].transpose();
    if (l + 1 < n_layers) {
      a = z.cwiseMax(0.0);
      if (l == 0 && train_mode && m.config.dropout_after_first > 0.0) {
        const double keep = 1.0 - m.config.dropout_after_first;
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        RMat mask(a.rows(), a.cols());
        for (long i = 0; i < a.rows(); ++i)
          for (long j = 0; j < a.cols(); ++j)
            mask(i, j) = (unif(*rng) < keep) ? 1.0 / keep : 0.0;
        a = a.cwiseProduct(mask);
        fp.masks[l] = std::move(mask);
      }
      fp.activations.push_back(a);
    } else {
      fp.output = z.col(0).unaryExpr([](double v) { return sigmoid(v); });
    }
  }
  return fp;
}

// Backprop of the mean BCE; returns per-layer gradients.
void run_backward(const FnnModel& m, const ForwardPass& fp, const std::vector<int>& y,
                  std::vector<RMat>& gw, std::vector<RVec>& gb) {
  const long n = fp.output.size();
  const size_t n_layers = m.weights.size();
  gw.resize(n_layers);
  gb.resize(n_layers);
  RMat delta(n, 1);
  for (long i = 0; i < n; ++i) delta(i, 0) = (fp.output(i) - y[i]) / n;
  for (size_t l = n_layers; l-- > 0;) {
    gw[l] = delta.transpose() * fp.activations[l];
    gb[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      RMat up = delta * m.weights[l];
      if (fp.masks[l - 1].size() > 0) up = up.cwiseProduct(fp.masks[l - 1]);
      // ReLU gate: activations already reflect the mask, so > 0 works
      delta = up.cwiseProduct(
          (fp.activations[l].array() > 0.0).cast<double>().matrix());
    }
  }
}

std::string raw_path_for(const std::string& manifest_path) {
  if (manifest_path.size() > 5 && manifest_path.ends_with(".json"))
    return manifest_path.substr(0, manifest_path.size() - 5) + ".bin";
  return manifest_path + ".bin";
}

}  // namespace

FnnModel init_model(const FnnConfig& cfg) {
  if (cfg.input_dim < 1 || cfg.hidden.empty())
    throw std::invalid_argument("init_model: need input_dim >= 1 and nonempty hidden layers");
  for (int h : cfg.hidden)
    if (h < 1) throw std::invalid_argument("init_model: zero-width hidden layer");
  FnnModel m;
  m.config = cfg;
  auto sizes = layer_sizes(cfg);
  std::mt19937_64 rng(derive_seed(cfg.seed, 0xF11));
  for (size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int fan_in = sizes[l], fan_out = sizes[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> unif(-limit, limit);
    RMat w(fan_out, fan_in);
    for (long i = 0; i < w.rows(); ++i)
      for (long j = 0; j < w.cols(); ++j) w(i, j) = unif(rng);
    m.weights.push_back(std::move(w));
    m.biases.push_back(RVec::Zero(fan_out));
  }
  return m;
}

double forward(const FnnModel& m, const RVec& x) {
  RMat xm = x.transpose();
  return run_forward(m, xm, false, nullptr).output(0);
}

RVec forward_batch(const FnnModel& m, const RMat& x, bool train_mode, std::mt19937_64* rng) {
  return run_forward(m, x, train_mode, rng).output;
}

double bce_loss(const RVec& predictions, const std::vector<int>& labels) {
  if (predictions.size() != static_cast<long>(labels.size()))
    throw std::invalid_argument("bce_loss: length mismatch");
  double loss = 0;
  for (long i = 0; i < predictions.size(); ++i) {
    double p = std::clamp(predictions(i), kClampLo, kClampHi);
    loss -= labels[i] * std::log(p) + (1 - labels[i]) * std::log(1 - p);
  }
  return loss / predictions.size();
}

std::vector<double> loss_gradient(const FnnModel& m, const RMat& x, const std::vector<int>& y) {
  auto fp = run_forward(m, x, false, nullptr);
  std::vector<RMat> gw;
  std::vector<RVec> gb;
  run_backward(m, fp, y, gw, gb);
  std::vector<double> flat;
  for (size_t l = 0; l < gw.size(); ++l) {
    flat.insert(flat.end(), gw[l].data(), gw[l].data() + gw[l].size());
    flat.insert(flat.end(), gb[l].data(), gb[l].data() + gb[l].size());
  }
  return flat;
}

std::vector<double*> parameter_view(FnnModel& m) {
  std::vector<double*> ptrs;
  for (size_t l = 0; l < m.weights.size(); ++l) {
    for (long i = 0; i < m.weights[l].size(); ++i) ptrs.push_back(m.weights[l].data() + i);
    for (long i = 0; i < m.biases[l].size(); ++i) ptrs.push_back(m.biases[l].data() + i);
  }
  return ptrs;
}

TrainingReport train(FnnModel& m, const LabeledDataset& data) {
  if (data.size() == 0) throw std::invalid_argument("train: empty dataset");
  if (data.feature_dim() != m.config.input_dim)
    throw std::invalid_argument("train: feature dim mismatch");

  const FnnConfig& cfg = m.config;
  std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, 0x51));
  std::mt19937_64 dropout_rng(derive_seed(cfg.seed, 0xD0));

  std::vector<int> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), shuffle_rng);
  const int n_val = data.size() / 10;
  const int n_train = data.size() - n_val;
  std::vector<int> val_idx(idx.begin() + n_train, idx.end());
  idx.resize(n_train);

  RMat val_x(n_val, data.feature_dim());
  std::vector<int> val_y(n_val);
  for (int i = 0; i < n_val; ++i) {
    val_x.row(i) = data.features.row(val_idx[i]);
    val_y[i] = data.labels[val_idx[i]];
  }

  // Adam state
  std::vector<RMat> mw, vw;
  std::vector<RVec> mb, vb;
  for (size_t l = 0; l < m.weights.size(); ++l) {
    mw.push_back(RMat::Zero(m.weights[l].rows(), m.weights[l].cols()));
    vw.push_back(RMat::Zero(m.weights[l].rows(), m.weights[l].cols()));
    mb.push_back(RVec::Zero(m.biases[l].size()));
    vb.push_back(RVec::Zero(m.biases[l].size()));
  }
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  long step = 0;

  TrainingReport report;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<RMat> best_w = m.weights;
  std::vector<RVec> best_b = m.biases;
  int best_epoch = 0, stall = 0;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::shuffle(idx.begin(), idx.end(), shuffle_rng);
    double epoch_loss = 0;
    int n_batches = 0;
    for (int start = 0; start < n_train; start += cfg.batch_size) {
      const int bs = std::min(cfg.batch_size, n_train - start);
      RMat bx(bs, data.feature_dim());
      std::vector<int> by(bs);
      for (int i = 0; i < bs; ++i) {
        bx.row(i) = data.features.row(idx[start + i]);
        by[i] = data.labels[idx[start + i]];
      }
      auto fp = run_forward(m, bx, true, &dropout_rng);
      epoch_loss += bce_loss(fp.output, by);
      ++n_batches;
      std::vector<RMat> gw;
      std::vector<RVec> gb;
      run_backward(m, fp, by, gw, gb);
      ++step;
      const double corr = cfg.learning_rate * std::sqrt(1 - std::pow(b2, step)) /
                          (1 - std::pow(b1, step));
      for (size_t l = 0; l < m.weights.size(); ++l) {
        mw[l] = b1 * mw[l] + (1 - b1) * gw[l];
        vw[l] = b2 * vw[l] + (1 - b2) * gw[l].cwiseProduct(gw[l]);
        m.weights[l] -= corr * mw[l].cwiseQuotient((vw[l].cwiseSqrt().array() + eps).matrix());
        mb[l] = b1 * mb[l] + (1 - b1) * gb[l];
        vb[l] = b2 * vb[l] + (1 - b2) * gb[l].cwiseProduct(gb[l]);
        m.biases[l] -= corr * mb[l].cwiseQuotient((vb[l].cwiseSqrt().array() + eps).matrix());
      }
    }
    report.train_loss.push_back(epoch_loss / std::max(1, n_batches));

    double vloss;
    if (n_val > 0) {
      RVec vp = forward_batch(m, val_x, false, nullptr);
      vloss = bce_loss(vp, val_y);
    } else {
      vloss = report.train_loss.back();
    }
    report.val_loss.push_back(vloss);
    m.trained_epochs = epoch + 1;

    if (vloss < best_val - 1e-9) {
      best_val = vloss;
      best_w = m.weights;
      best_b = m.biases;
      best_epoch = epoch;
      stall = 0;
    } else if (++stall >= cfg.patience) {
      break;
    }
  }
  m.weights = best_w;
  m.biases = best_b;
  report.best_epoch = best_epoch;
  return report;
}

bool predict(const FnnModel& m, const RVec& x) { return forward(m, x) >= 0.5; }

double evaluate(const FnnModel& m, const LabeledDataset& data) {
  if (data.size() == 0) throw std::invalid_argument("evaluate: empty dataset");
  RVec p = forward_batch(m, data.features, false, nullptr);
  int correct = 0;
  for (int i = 0; i < data.size(); ++i)
    if ((p(i) >= 0.5) == (data.labels[i] == 1)) ++correct;
  return static_cast<double>(correct) / data.size();
}

std::string model_to_json(const FnnModel& m) {
  nlohmann::json j;
  j["version"] = 1;
  j["config"] = {{"input_dim", m.config.input_dim},
                 {"hidden", m.config.hidden},
                 {"dropout_after_first", m.config.dropout_after_first},
                 {"seed", m.config.seed},
                 {"learning_rate", m.config.learning_rate},
                 {"batch_size", m.config.batch_size},
                 {"max_epochs", m.config.max_epochs},
                 {"patience", m.config.patience}};
  j["trained_epochs"] = m.trained_epochs;
  j["device_fingerprint"] = m.device_fingerprint;
  auto layers = nlohmann::json::array();
  for (size_t l = 0; l < m.weights.size(); ++l) {
    nlohmann::json lj;
    auto w = nlohmann::json::array();
    for (long r = 0; r < m.weights[l].rows(); ++r) {
      auto row = nlohmann::json::array();
      for (long c = 0; c < m.weights[l].cols(); ++c) row.push_back(m.weights[l](r, c));
      w.push_back(row);
    }
    lj["w"] = w;
    auto b = nlohmann::json::array();
    for (long i = 0; i < m.biases[l].size(); ++i) b.push_back(m.biases[l](i));
    lj["b"] = b;
    layers.push_back(lj);
  }
  j["layers"] = layers;
  return j.dump();
}

FnnModel model_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  if (j.at("version").get<int>() != 1)
    throw std::runtime_error("model_from_json: unsupported model file version");
  FnnModel m;
  const auto& cj = j.at("config");
  m.config.input_dim = cj.at("input_dim").get<int>();
  m.config.hidden = cj.at("hidden").get<std::vector<int>>();
  m.config.dropout_after_first = cj.at("dropout_after_first").get<double>();
  m.config.seed = cj.at("seed").get<std::uint64_t>();
  m.config.learning_rate = cj.at("learning_rate").get<double>();
  m.config.batch_size = cj.at("batch_size").get<int>();
  m.config.max_epochs = cj.at("max_epochs").get<int>();
  m.config.patience = cj.at("patience").get<int>();
  m.trained_epochs = j.at("trained_epochs").get<int>();
  m.device_fingerprint = j.value("device_fingerprint", 0ULL);
  for (const auto& lj : j.at("layers")) {
    const auto& w = lj.at("w");
    RMat wm(w.size(), w.at(0).size());
    for (size_t r = 0; r < w.size(); ++r)
      for (size_t c = 0; c < w.at(r).size(); ++c) wm(r, c) = w.at(r).at(c).get<double>();
    m.weights.push_back(std::move(wm));
    const auto& b = lj.at("b");
    RVec bv(b.size());
    for (size_t i = 0; i < b.size(); ++i) bv(i) = b.at(i).get<double>();
    m.biases.push_back(std::move(bv));
  }
  auto sizes = layer_sizes(m.config);
  if (m.weights.size() + 1 != sizes.size())
    throw std::runtime_error("model_from_json: layer count mismatch");
  for (size_t l = 0; l < m.weights.size(); ++l)
    if (m.weights[l].rows() != sizes[l + 1] || m.weights[l].cols() != sizes[l])
      throw std::runtime_error("model_from_json: layer shape mismatch");
  return m;
}

void save_model(const FnnModel& m, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_model: cannot open " + path);
  f << model_to_json(m);
}

FnnModel load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_model: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return model_from_json(ss.str());
}

void save_dataset(const LabeledDataset& d, const std::string& manifest_path) {
  nlohmann::json j;
  j["n"] = d.size();
  j["dim"] = d.feature_dim();
  j["labels"] = d.labels;
  j["device_fingerprint"] = d.meta.device_fingerprint;
  j["layout"] = d.meta.layout;
  j["seeds"] = d.meta.seeds;
  j["dims"] = d.meta.dims;
  j["criteria"] = d.meta.criteria;
  j["scale"] = d.meta.scale;
  const std::string raw = raw_path_for(manifest_path);
  j["raw"] = raw.substr(raw.find_last_of('/') + 1);
  std::ofstream mf(manifest_path, std::ios::binary);
  if (!mf) throw std::runtime_error("save_dataset: cannot open " + manifest_path);
  mf << j.dump();

  std::ofstream rf(raw, std::ios::binary);
  if (!rf) throw std::runtime_error("save_dataset: cannot open " + raw);
  for (int r = 0; r < d.size(); ++r)
    for (int c = 0; c < d.feature_dim(); ++c) {
      float v = static_cast<float>(d.features(r, c));
      rf.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
}

LabeledDataset load_dataset(const std::string& manifest_path) {
  std::ifstream mf(manifest_path, std::ios::binary);
  if (!mf) throw std::runtime_error("load_dataset: cannot open " + manifest_path);
  nlohmann::json j;
  mf >> j;
  LabeledDataset d;
  const int n = j.at("n").get<int>();
  const int dim = j.at("dim").get<int>();
  d.labels = j.at("labels").get<std::vector<int>>();
  d.meta.device_fingerprint = j.at("device_fingerprint").get<std::uint64_t>();
  d.meta.layout = j.at("layout").get<std::string>();
  d.meta.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  d.meta.dims = j.at("dims").get<std::vector<int>>();
  d.meta.criteria = j.at("criteria").get<std::vector<std::string>>();
  d.meta.scale = j.at("scale").get<double>();
  if (static_cast<int>(d.labels.size()) != n)
    throw std::runtime_error("load_dataset: label count mismatch");

  std::string dir;
  auto slash = manifest_path.find_last_of('/');
  if (slash != std::string::npos) dir = manifest_path.substr(0, slash + 1);
  std::ifstream rf(dir + j.at("raw").get<std::string>(), std::ios::binary);
  if (!rf) throw std::runtime_error("load_dataset: cannot open raw file");
  d.features.resize(n, dim);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < dim; ++c) {
      float v;
      rf.read(reinterpret_cast<char*>(&v), sizeof(v));
      if (!rf) throw std::runtime_error("load_dataset: raw file truncated");
      d.features(r, c) = v;
    }
  return d;
}

}  // namespace gme
