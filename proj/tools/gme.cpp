// gme: command-line driver for the whole pipeline: device generation,
// dataset building, training, evaluation, and the experiment drivers.
// Exit codes: 0 success, 2 usage, 3 fingerprint mismatch, 4 numerical
// validation failure.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gme/pipeline.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitFingerprint = 3;
constexpr int kExitNumerical = 4;

struct FingerprintMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << content;
}

void write_manifest(const std::string& command, const std::vector<std::string>& artifacts,
                    std::uint64_t root_seed, double wall_seconds) {
  if (artifacts.empty()) return;
  nlohmann::json j;
  j["command"] = command;
  j["artifacts"] = artifacts;
  j["root_seed"] = root_seed;
  j["toolkit_version"] = "1.0";
  j["wall_time_seconds"] = wall_seconds;
  write_file(artifacts.front() + ".manifest.json", j.dump());
}

void check_fingerprint(std::uint64_t a, std::uint64_t b, const std::string& what) {
  if (a != 0 && b != 0 && a != b)
    throw FingerprintMismatch("device fingerprint mismatch between " + what);
}

std::vector<int> parse_dims(const std::string& s) {
  std::vector<int> dims;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) dims.push_back(std::stoi(tok));
  if (dims.empty()) throw CLI::ValidationError("--dims", "empty dimension list");
  return dims;
}

gme::WernerFamily parse_family(const std::string& s) {
  if (s == "GHZ3") return gme::WernerFamily::kGhz3;
  if (s == "W3") return gme::WernerFamily::kW3;
  if (s == "GHZ4") return gme::WernerFamily::kGhz4;
  if (s == "W4") return gme::WernerFamily::kW4;
  if (s == "Cl4") return gme::WernerFamily::kCl4;
  if (s == "D24") return gme::WernerFamily::kD24;
  if (s == "GHZ5") return gme::WernerFamily::kGhz5;
  if (s == "GHZ43") return gme::WernerFamily::kGhz43;
  throw CLI::ValidationError("--family", "unknown family " + s);
}

gme::FnnConfig config_for_dataset(const gme::LabeledDataset& data, std::uint64_t seed) {
  const auto& dims = data.meta.dims;
  const int n = static_cast<int>(dims.size());
  const int d = dims.empty() ? 2 : dims[0];
  return gme::fnn_config_for(n, d, data.feature_dim(), seed);
}

int run(int argc, char** argv) {
  CLI::App app{"GME certification toolkit"};
  app.require_subcommand(1);
  const auto t0 = std::chrono::steady_clock::now();
  auto wall = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  int jobs = 0;
  app.add_option("--jobs", jobs, "worker threads (default: GME_JOBS or hardware)");

  // gen-devices
  auto* gen_dev = app.add_subcommand("gen-devices", "sample and persist a measurement device set");
  std::string dims_str = "2,2,2", out_path;
  int m = 2;
  std::uint64_t seed = 1;
  gen_dev->add_option("--dims", dims_str, "comma-separated subsystem dimensions");
  gen_dev->add_option("--m", m, "devices per party")->check(CLI::PositiveNumber);
  gen_dev->add_option("--seed", seed, "root seed");
  gen_dev->add_option("--out", out_path, "output device JSON")->required();
  gen_dev->callback([&] {
    auto dims = parse_dims(dims_str);
    auto ds = gme::sample_device_set(dims, m, seed);
    gme::save_devices(ds, out_path);
    long features = 1;
    for (int i = 0; i < static_cast<int>(dims.size()); ++i) features *= m;
    for (int d : dims) features *= d;
    std::printf("devices: %zu parties, m=%d, full feature length %ld\n", dims.size(), m, features);
    std::printf("fingerprint: %016llx\n",
                static_cast<unsigned long long>(gme::device_fingerprint(ds)));
    write_manifest("gen-devices", {out_path}, seed, wall());
  });

  // gen-dataset
  auto* gen_ds = app.add_subcommand("gen-dataset", "build a labeled feature dataset");
  std::string case_id, devices_path, ds_out;
  double scale = 1.0;
  gen_ds->add_option("--case", case_id, "3q | 4q | 3qudit | 5part | random-test")->required();
  gen_ds->add_option("--devices", devices_path, "device JSON file")->required();
  gen_ds->add_option("--scale", scale, "count scale factor");
  gen_ds->add_option("--seed", seed, "root seed");
  gen_ds->add_option("--out", ds_out, "output dataset manifest (json)")->required();
  gen_ds->callback([&] {
    auto devices = gme::load_devices(devices_path);
    gme::StateSet set;
    if (case_id == "3q") set = gme::build_states_3qubit(seed, scale, jobs);
    else if (case_id == "4q") set = gme::build_states_4qubit(seed, scale, jobs);
    else if (case_id == "3qudit") set = gme::build_states_3qudit(seed, scale, jobs);
    else if (case_id == "5part") set = gme::build_states_5partite(seed, scale, jobs);
    else if (case_id == "random-test") {
      if (devices.dims == std::vector<int>{2, 2, 2})
        set = gme::build_random_test_3qubit(seed, scale, jobs);
      else if (devices.dims == std::vector<int>{2, 2, 2, 2})
        set = gme::build_random_test_4qubit(seed, scale, jobs);
      else if (devices.dims == std::vector<int>{4, 4, 4, 4, 4})
        set = gme::build_random_test_5partite(seed, scale, jobs);
      else throw CLI::ValidationError("--case", "no random-test case for these device dims");
    } else throw CLI::ValidationError("--case", "unknown case " + case_id);
    if (set.dims != devices.dims)
      throw FingerprintMismatch("dataset case and device dimensions");
    auto data = gme::featurize(set, devices, {}, jobs);
    gme::save_dataset(data, ds_out);
    std::map<int, int> counts;
    for (int l : set.labels) counts[l]++;
    std::printf("dataset: %d rows, feature dim %d, scale %g\n", data.size(),
                data.feature_dim(), scale);
    for (auto& [label, count] : counts) std::printf("  label %d: %d\n", label, count);
    write_manifest("gen-dataset", {ds_out}, seed, wall());
  });

  // train
  auto* tr = app.add_subcommand("train", "train an FNN classifier on a dataset");
  std::string train_ds, config_path, model_out;
  tr->add_option("--dataset", train_ds)->required();
  tr->add_option("--config", config_path, "optional FnnConfig JSON (flags take precedence)");
  tr->add_option("--seed", seed, "training seed");
  tr->add_option("--out", model_out)->required();
  tr->callback([&] {
    auto data = gme::load_dataset(train_ds);
    gme::FnnConfig cfg = config_for_dataset(data, seed);
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw std::runtime_error("cannot open " + config_path);
      nlohmann::json j;
      f >> j;
      if (j.contains("hidden")) cfg.hidden = j["hidden"].get<std::vector<int>>();
      if (j.contains("dropout_after_first")) cfg.dropout_after_first = j["dropout_after_first"];
      if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"];
      if (j.contains("batch_size")) cfg.batch_size = j["batch_size"];
      if (j.contains("max_epochs")) cfg.max_epochs = j["max_epochs"];
      if (j.contains("patience")) cfg.patience = j["patience"];
    }
    cfg.seed = seed;
    gme::FnnModel model = gme::init_model(cfg);
    model.device_fingerprint = data.meta.device_fingerprint;
    auto report = gme::train(model, data);
    gme::save_model(model, model_out);
    std::printf("trained %d epochs (best %d), final train loss %s, train accuracy %s\n",
                model.trained_epochs, report.best_epoch,
                gme::format_real(report.train_loss.back()).c_str(),
                gme::format_real(gme::evaluate(model, data)).c_str());
    write_manifest("train", {model_out}, seed, wall());
  });

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a model on a dataset");
  std::string model_path, eval_ds;
  ev->add_option("--model", model_path)->required();
  ev->add_option("--dataset", eval_ds)->required();
  ev->callback([&] {
    auto model = gme::load_model(model_path);
    auto data = gme::load_dataset(eval_ds);
    check_fingerprint(model.device_fingerprint, data.meta.device_fingerprint,
                      "model and dataset");
    std::printf("accuracy: %s on %d samples\n",
                gme::format_real(gme::evaluate(model, data)).c_str(), data.size());
  });

  // scan
  auto* sc = app.add_subcommand("scan", "threshold scan over a Werner-type family");
  std::string family_str = "GHZ3", convention_str = "noise-weight", scan_out;
  sc->add_option("--model", model_path)->required();
  sc->add_option("--devices", devices_path)->required();
  sc->add_option("--family", family_str, "GHZ3 W3 GHZ4 W4 Cl4 D24 GHZ5 GHZ43");
  sc->add_option("--convention", convention_str, "noise-weight | state-weight");
  sc->add_option("--out", scan_out, "CSV output path");
  sc->callback([&] {
    auto model = gme::load_model(model_path);
    auto devices = gme::load_devices(devices_path);
    check_fingerprint(model.device_fingerprint, gme::device_fingerprint(devices),
                      "model and devices");
    auto family = parse_family(family_str);
    auto conv = convention_str == "state-weight" ? gme::NoiseConvention::kStateWeight
                                                 : gme::NoiseConvention::kNoiseWeight;
    auto report = gme::scan_werner(model, devices, family, conv, {});
    std::printf("family %s: threshold %s, wrong interval (%s, %s), accuracy on known %s\n",
                family_str.c_str(), gme::format_real(report.reported_threshold).c_str(),
                gme::format_real(report.wrong_interval.first).c_str(),
                gme::format_real(report.wrong_interval.second).c_str(),
                gme::format_real(report.accuracy_on_known).c_str());
    if (!scan_out.empty()) {
      write_file(scan_out, gme::scan_report_csv(report, family));
      write_manifest("scan", {scan_out}, seed, wall());
    }
  });

  // alpha-beta
  auto* ab = app.add_subcommand("alpha-beta", "prediction map over the qutrit family");
  double step = 0.01;
  std::string ab_out;
  ab->add_option("--model", model_path)->required();
  ab->add_option("--devices", devices_path)->required();
  ab->add_option("--step", step);
  ab->add_option("--out", ab_out, "CSV grid output");
  ab->callback([&] {
    auto model = gme::load_model(model_path);
    auto devices = gme::load_devices(devices_path);
    check_fingerprint(model.device_fingerprint, gme::device_fingerprint(devices),
                      "model and devices");
    auto report = gme::scan_alpha_beta(model, devices, step);
    std::printf("alpha=0 boundary beta: %s\n",
                gme::format_real(report.beta_boundary_at_alpha0).c_str());
    if (!ab_out.empty()) {
      write_file(ab_out, gme::alpha_beta_csv(report));
      write_manifest("alpha-beta", {ab_out}, seed, wall());
    }
  });

  // graph
  auto* gr = app.add_subcommand("graph", "graph-state connectivity experiment");
  int graph_n = 12, kcorr_k = 4;
  std::string graph_out;
  gr->add_option("--n", graph_n)->check(CLI::Range(2, 14));
  gr->add_option("--k", kcorr_k)->check(CLI::PositiveNumber);
  gr->add_option("--seed", seed);
  gr->add_option("--out", graph_out, "JSON result path");
  gr->callback([&] {
    auto res = gme::graph_experiment(graph_n, kcorr_k, seed, jobs);
    std::printf("graph experiment n=%d k=%d: accuracy %s (%d train / %d test)\n", graph_n,
                kcorr_k, gme::format_real(res.accuracy).c_str(), res.train_size, res.test_size);
    if (!graph_out.empty()) {
      nlohmann::json j{{"n", graph_n}, {"k", kcorr_k}, {"accuracy", res.accuracy},
                       {"train_size", res.train_size}, {"test_size", res.test_size}};
      write_file(graph_out, j.dump());
      write_manifest("graph", {graph_out}, seed, wall());
    }
  });

  // kcorr
  auto* kc = app.add_subcommand("kcorr", "retrain the 4-qubit model on k-correlation data");
  std::string kcorr_out;
  kc->add_option("--k", kcorr_k)->required()->check(CLI::PositiveNumber);
  kc->add_option("--scale", scale);
  kc->add_option("--seed", seed);
  kc->add_option("--out", kcorr_out, "JSON accuracy table");
  kc->callback([&] {
    auto devices = gme::sample_device_set({2, 2, 2, 2}, std::max(kcorr_k, 2),
                                          gme::derive_seed(seed, 0xDEF));
    auto states = gme::build_states_4qubit(gme::derive_seed(seed, 1), scale, jobs);
    gme::FeatureSpec spec{gme::CorrelationLayout::kKcorr, kcorr_k};
    auto data = gme::featurize(states, devices, spec, jobs);
    auto cfg = gme::fnn_config_for(4, 2, data.feature_dim(), gme::derive_seed(seed, 2));
    gme::FnnModel model = gme::init_model(cfg);
    model.device_fingerprint = data.meta.device_fingerprint;
    gme::train(model, data);
    nlohmann::json j{{"k", kcorr_k}, {"feature_dim", data.feature_dim()}};
    const std::pair<gme::WernerFamily, std::string> fams[] = {
        {gme::WernerFamily::kGhz4, "GHZ4"}, {gme::WernerFamily::kW4, "W4"},
        {gme::WernerFamily::kCl4, "Cl4"}, {gme::WernerFamily::kD24, "D24"}};
    for (auto& [fam, name] : fams) {
      auto rep = gme::scan_werner(model, devices, fam, gme::NoiseConvention::kNoiseWeight, spec);
      j["accuracy"][name] = rep.accuracy_on_known;
      std::printf("k=%d %s: accuracy on known %s\n", kcorr_k, name.c_str(),
                  gme::format_real(rep.accuracy_on_known).c_str());
    }
    if (!kcorr_out.empty()) {
      write_file(kcorr_out, j.dump());
      write_manifest("kcorr", {kcorr_out}, seed, wall());
    }
  });

  // robustness
  auto* rb = app.add_subcommand("robustness", "device re-sampling robustness study");
  std::string rb_out;
  rb->add_option("--scale", scale);
  rb->add_option("--seed", seed);
  rb->add_option("--out", rb_out, "JSON result path");
  rb->callback([&] {
    auto res = gme::robustness_experiment(seed, scale, jobs);
    double lo = 1, hi = 0;
    for (double a : res.device_seed_accuracies) {
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
    std::printf("device-seed accuracies:");
    for (double a : res.device_seed_accuracies) std::printf(" %s", gme::format_real(a).c_str());
    std::printf("\nspread (max-min): %s\nfixed-observable accuracy: %s\n",
                gme::format_real(hi - lo).c_str(),
                gme::format_real(res.fixed_observable_accuracy).c_str());
    if (!rb_out.empty()) {
      nlohmann::json j{{"device_seed_accuracies", res.device_seed_accuracies},
                       {"spread", hi - lo},
                       {"fixed_observable_accuracy", res.fixed_observable_accuracy}};
      write_file(rb_out, j.dump());
      write_manifest("robustness", {rb_out}, seed, wall());
    }
  });

  // bisep-search
  auto* bs = app.add_subcommand("bisep-search", "biseparable-decomposition search (qutrit family)");
  double alpha = 0, beta = 0;
  int budget = 2000;
  std::string cert_out;
  bs->add_option("--alpha", alpha)->required();
  bs->add_option("--beta", beta)->required();
  bs->add_option("--budget", budget)->check(CLI::PositiveNumber);
  bs->add_option("--out", cert_out, "certificate JSON path");
  bs->callback([&] {
    auto rho = gme::qutrit_family(alpha, beta);
    auto res = gme::bisep_search(rho, budget);
    if (res.found) {
      double err = gme::bisep_reconstruction_error(rho, res);
      if (err >= 1e-6 || !gme::bisep_atoms_are_product(res, rho.dims))
        throw std::domain_error("bisep-search: certificate failed verification");
      std::printf("found: distance %s, %zu atoms\n", gme::format_real(res.distance).c_str(),
                  res.atoms.size());
      if (!cert_out.empty()) {
        nlohmann::json j{{"alpha", alpha}, {"beta", beta}, {"distance", res.distance}};
        auto atoms = nlohmann::json::array();
        for (auto& a : res.atoms) {
          nlohmann::json aj{{"cut_party", a.cut_party}, {"weight", a.weight}};
          auto v = nlohmann::json::array();
          for (long i = 0; i < a.vector.size(); ++i)
            v.push_back({a.vector(i).real(), a.vector(i).imag()});
          aj["vector"] = v;
          atoms.push_back(aj);
        }
        j["atoms"] = atoms;
        write_file(cert_out, j.dump());
        write_manifest("bisep-search", {cert_out}, seed, wall());
      }
    } else {
      std::printf("not-found (inconclusive): best distance %s\n",
                  gme::format_real(res.distance).c_str());
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const FingerprintMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFingerprint;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const CLI::ParseError& e) {
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
