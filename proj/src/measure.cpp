#include "gme/measure.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gme {

namespace {

void check_unitary(const CMat& u, const char* what) {
  CMat gram = u.adjoint() * u;
  if ((gram - CMat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() > 1e-9)
    throw InvariantViolation(std::string(what) + ": device unitary fails completeness check");
}

// In-place application of a local operator to one subsystem of a
// statevector.
void apply_local(CVec& v, const std::vector<int>& dims, int party, const CMat& op) {
  int left = 1, right = 1;
  for (int i = 0; i < party; ++i) left *= dims[i];
  for (size_t i = party + 1; i < dims.size(); ++i) right *= dims[i];
  const int d = dims[party];
  CVec tmp(d);
  for (int l = 0; l < left; ++l)
    for (int r = 0; r < right; ++r) {
      for (int a = 0; a < d; ++a) tmp(a) = v((l * d + a) * right + r);
      for (int a = 0; a < d; ++a) {
        Complex s = 0;
        for (int b = 0; b < d; ++b) s += op(a, b) * tmp(b);
        v((l * d + a) * right + r) = s;
      }
    }
}

std::vector<double> probs_for_setting(const DensityMatrix& rho, const DeviceSet& ds,
                                      const std::vector<int>& setting) {
  CMat u = ds.parties[0][setting[0]].source_unitary;
  for (int i = 1; i < ds.n_parties(); ++i) u = kron(u, ds.parties[i][setting[i]].source_unitary);
  // p(a|x) = <u_a| rho |u_a> = diag of U^dagger rho U
  CMat rot = u.adjoint() * rho.mat * u;
  std::vector<double> p(rho.total_dim());
  for (int i = 0; i < rho.total_dim(); ++i) p[i] = std::max(0.0, rot(i, i).real());
  return p;
}

std::vector<double> probs_for_setting(const PureState& psi, const DeviceSet& ds,
                                      const std::vector<int>& setting) {
  CVec v = psi.amps;
  for (int i = 0; i < ds.n_parties(); ++i)
    apply_local(v, psi.dims, i, ds.parties[i][setting[i]].source_unitary.adjoint());
  std::vector<double> p(psi.total_dim());
  for (int i = 0; i < psi.total_dim(); ++i) p[i] = std::norm(v(i));
  return p;
}

template <typename State>
CorrelationVector full_correlation(const State& state, const DeviceSet& ds) {
  if (state.dims != ds.dims) throw InvalidDimension("correlation: state/device dims mismatch");
  const int n = ds.n_parties();
  long n_settings = 1;
  for (int i = 0; i < n; ++i) n_settings *= ds.m;
  CorrelationVector out;
  out.layout = CorrelationLayout::kFull;
  out.values.reserve(n_settings * ds.outcome_space());
  std::vector<int> setting(n, 0);
  for (long s = 0; s < n_settings; ++s) {
    long rem = s;
    for (int i = n - 1; i >= 0; --i) {
      setting[i] = rem % ds.m;
      rem /= ds.m;
    }
    auto p = probs_for_setting(state, ds, setting);
    out.values.insert(out.values.end(), p.begin(), p.end());
  }
  return out;
}

template <typename State>
CorrelationVector diag_correlation(const State& state, const DeviceSet& ds, int k) {
  if (state.dims != ds.dims) throw InvalidDimension("k_correlation: state/device dims mismatch");
  if (k < 1 || k > ds.m) throw InvalidDimension("k_correlation: k exceeds device count");
  CorrelationVector out;
  out.layout = CorrelationLayout::kKcorr;
  out.values.reserve(static_cast<size_t>(k) * ds.outcome_space());
  for (int x = 0; x < k; ++x) {
    auto p = probs_for_setting(state, ds, std::vector<int>(ds.n_parties(), x));
    out.values.insert(out.values.end(), p.begin(), p.end());
  }
  return out;
}

}  // namespace

CMat Device::projector(int outcome) const {
  return source_unitary.col(outcome) * source_unitary.col(outcome).adjoint();
}

int DeviceSet::outcome_space() const {
  int p = 1;
  for (int d : dims) p *= d;
  return p;
}

DeviceSet sample_device_set(const std::vector<int>& dims, int m, std::uint64_t seed) {
  if (m < 1) throw InvalidDimension("sample_device_set: m must be >= 1");
  DeviceSet ds;
  ds.dims = dims;
  ds.m = m;
  ds.seed = seed;
  for (size_t i = 0; i < dims.size(); ++i) {
    std::vector<Device> devs;
    for (int j = 0; j < m; ++j)
      devs.push_back({haar_unitary(dims[i], derive_seed(seed, i * 1000 + j))});
    ds.parties.push_back(std::move(devs));
  }
  return ds;
}

DeviceSet fixed_observable_devices(int n, double phi) {
  if (n < 2) throw InvalidDimension("fixed_observable_devices: need n >= 2");
  const double theta = (n + 1) * phi / (2.0 * n);
  CMat z_basis = CMat::Identity(2, 2);
  // eigenbasis of cos(theta) sx + sin(theta) sy: (|0> +- e^{i theta}|1>)/sqrt(2)
  CMat a_basis(2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  a_basis(0, 0) = r;
  a_basis(1, 0) = r * std::exp(Complex(0, theta));
  a_basis(0, 1) = r;
  a_basis(1, 1) = -r * std::exp(Complex(0, theta));
  DeviceSet ds;
  ds.dims = std::vector<int>(n, 2);
  ds.m = 2;
  ds.seed = 0;
  for (int i = 0; i < n; ++i) ds.parties.push_back({Device{z_basis}, Device{a_basis}});
  return ds;
}

CorrelationVector correlation(const DensityMatrix& rho, const DeviceSet& ds) {
  return full_correlation(rho, ds);
}

CorrelationVector correlation_pure(const PureState& psi, const DeviceSet& ds) {
  return full_correlation(psi, ds);
}

CorrelationVector k_correlation(const DensityMatrix& rho, const DeviceSet& ds, int k) {
  return diag_correlation(rho, ds, k);
}

CorrelationVector k_correlation(const PureState& psi, const DeviceSet& ds, int k) {
  return diag_correlation(psi, ds, k);
}

std::string devices_to_json(const DeviceSet& ds) {
  nlohmann::json j;
  j["dims"] = ds.dims;
  j["m"] = ds.m;
  j["seed"] = ds.seed;
  auto parties = nlohmann::json::array();
  for (const auto& devs : ds.parties) {
    auto pj = nlohmann::json::array();
    for (const auto& dev : devs) {
      auto mj = nlohmann::json::array();
      for (int r = 0; r < dev.dim(); ++r) {
        auto row = nlohmann::json::array();
        for (int c = 0; c < dev.dim(); ++c)
          row.push_back({dev.source_unitary(r, c).real(), dev.source_unitary(r, c).imag()});
        mj.push_back(row);
      }
      pj.push_back(mj);
    }
    parties.push_back(pj);
  }
  j["parties"] = parties;
  return j.dump();
}

DeviceSet devices_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  DeviceSet ds;
  ds.dims = j.at("dims").get<std::vector<int>>();
  ds.m = j.at("m").get<int>();
  ds.seed = j.at("seed").get<std::uint64_t>();
  const auto& parties = j.at("parties");
  if (parties.size() != ds.dims.size())
    throw InvariantViolation("devices_from_json: party count mismatch");
  for (size_t i = 0; i < parties.size(); ++i) {
    if (static_cast<int>(parties[i].size()) != ds.m)
      throw InvariantViolation("devices_from_json: device count mismatch");
    std::vector<Device> devs;
    for (const auto& mj : parties[i]) {
      int d = ds.dims[i];
      CMat u(d, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
          u(r, c) = Complex(mj.at(r).at(c).at(0).get<double>(), mj.at(r).at(c).at(1).get<double>());
      check_unitary(u, "devices_from_json");
      devs.push_back({std::move(u)});
    }
    ds.parties.push_back(std::move(devs));
  }
  return ds;
}

void save_devices(const DeviceSet& ds, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_devices: cannot open " + path);
  f << devices_to_json(ds);
}

DeviceSet load_devices(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_devices: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return devices_from_json(ss.str());
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t device_fingerprint(const DeviceSet& ds) { return fnv1a(devices_to_json(ds)); }

}  // namespace gme
