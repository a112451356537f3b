// Python bindings for the core operations: state construction, criteria,
// measurement simulation, the classifier, and the experiment drivers.

#include <map>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gme/pipeline.hpp"

namespace py = pybind11;
using namespace gme;

namespace {

const char* criterion_name(CriterionId id) {
  switch (id) {
    case CriterionId::kGuhne3: return "guhne3";
    case CriterionId::kGuhne3Ghz: return "guhne3_ghz";
    case CriterionId::kVrho: return "vrho";
    case CriterionId::kConcurrenceLb: return "concurrence_lb";
    case CriterionId::kTensor4: return "tensor4";
    case CriterionId::kNpt: return "npt";
  }
  return "unknown";
}

}  // namespace

PYBIND11_MODULE(_gme, m) {
  m.doc() = "GME certification toolkit core";

  py::register_exception<InvalidDimension>(m, "InvalidDimension", PyExc_ValueError);
  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_ValueError);

  py::class_<PureState>(m, "PureState")
      .def(py::init<std::vector<int>, CVec>(), py::arg("dims"), py::arg("amps"))
      .def_readonly("dims", &PureState::dims)
      .def_readonly("amps", &PureState::amps)
      .def("n_parties", &PureState::n_parties);

  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def(py::init<std::vector<int>, CMat, bool>(), py::arg("dims"), py::arg("mat"),
           py::arg("validate") = true)
      .def_readonly("dims", &DensityMatrix::dims)
      .def_readonly("mat", &DensityMatrix::mat)
      .def("purity", &DensityMatrix::purity)
      .def("n_parties", &DensityMatrix::n_parties);

  py::class_<CriterionVerdict>(m, "CriterionVerdict")
      .def_readonly("detected", &CriterionVerdict::detected)
      .def_readonly("margin", &CriterionVerdict::margin)
      .def_property_readonly(
          "criterion", [](const CriterionVerdict& v) { return criterion_name(v.criterion_id); })
      .def("__repr__", [](const CriterionVerdict& v) {
        return std::string("CriterionVerdict(") + (v.detected ? "detected" : "silent") +
               ", margin=" + std::to_string(v.margin) + ", " + criterion_name(v.criterion_id) +
               ")";
      });

  py::class_<Graph>(m, "Graph")
      .def(py::init([](int n, std::vector<std::pair<int, int>> edges) {
             return Graph{n, std::move(edges)};
           }),
           py::arg("n"), py::arg("edges"))
      .def_readonly("n", &Graph::n)
      .def_readonly("edges", &Graph::edges);

  m.def("derive_seed", &derive_seed);
  m.def("haar_unitary", &haar_unitary, py::arg("d"), py::arg("seed"));
  m.def("random_density", [](int dim, int rank, std::uint64_t seed) {
    return random_density({dim, rank, seed});
  });
  m.def("projector", &projector);
  m.def("partial_trace", &partial_trace);
  m.def("partial_transpose", &partial_transpose);
  m.def("permute_subsystems", &permute_subsystems);
  m.def("von_neumann_entropy", &von_neumann_entropy);
  m.def("kyfan_norm", &kyfan_norm);
  m.def("min_eigenvalue", &min_eigenvalue);

  m.def("ghz", &ghz, py::arg("n"), py::arg("d"));
  m.def("w_state", &w_state);
  m.def("cluster4", &cluster4);
  m.def("dicke24", &dicke24);
  m.def("qutrit_family", &qutrit_family, py::arg("alpha"), py::arg("beta"));
  m.def("sample_fully_separable", &sample_fully_separable);
  m.def("sample_biseparable", &sample_biseparable);
  m.def("sample_intactness", &sample_intactness);
  m.def("merge", &merge, py::arg("rho"), py::arg("tau"), py::arg("n_shared"));
  m.def("graph_state", &graph_state);
  m.def("random_graph", &random_graph);
  m.def("is_connected", &is_connected);

  m.def("guhne3", &guhne3);
  m.def("guhne3_ghz", &guhne3_ghz);
  m.def("guhne_ghz_n", &guhne_ghz_n);
  m.def("vrho", &vrho);
  m.def(
      "concurrence_probe_search",
      [](const DensityMatrix& rho, std::uint64_t seed, int max_probes) {
        return concurrence_probe_search(rho, seed, max_probes);
      },
      py::arg("rho"), py::arg("seed"), py::arg("max_probes") = 200);
  m.def("tensor4_criterion", &tensor4_criterion);
  m.def("is_npt", &is_npt);

  py::class_<DeviceSet>(m, "DeviceSet")
      .def_readonly("dims", &DeviceSet::dims)
      .def_readonly("m", &DeviceSet::m)
      .def_readonly("seed", &DeviceSet::seed)
      .def("fingerprint", &device_fingerprint);
  m.def("sample_device_set", &sample_device_set, py::arg("dims"), py::arg("m"), py::arg("seed"));
  m.def("fixed_observable_devices", &fixed_observable_devices);
  m.def("save_devices", &save_devices);
  m.def("load_devices", &load_devices);
  m.def("correlation",
        [](const DensityMatrix& rho, const DeviceSet& ds) { return correlation(rho, ds).values; });
  m.def("k_correlation", [](const DensityMatrix& rho, const DeviceSet& ds, int k) {
    return k_correlation(rho, ds, k).values;
  });

  py::class_<FnnModel>(m, "FnnModel")
      .def_readonly("trained_epochs", &FnnModel::trained_epochs)
      .def_readonly("device_fingerprint", &FnnModel::device_fingerprint)
      .def("predict", [](const FnnModel& m_, const RVec& x) { return predict(m_, x); })
      .def("forward", [](const FnnModel& m_, const RVec& x) { return forward(m_, x); });
  m.def("load_model", &load_model);
  m.def("save_model", &save_model);

  py::class_<BisepAtom>(m, "BisepAtom")
      .def_readonly("cut_party", &BisepAtom::cut_party)
      .def_readonly("weight", &BisepAtom::weight)
      .def_readonly("vector", &BisepAtom::vector);
  py::class_<BisepSearchResult>(m, "BisepSearchResult")
      .def_readonly("found", &BisepSearchResult::found)
      .def_readonly("distance", &BisepSearchResult::distance)
      .def_readonly("atoms", &BisepSearchResult::atoms);
  m.def("bisep_search", &bisep_search, py::arg("rho"), py::arg("budget") = 2000,
        py::arg("seed") = 7);
  m.def("bisep_reconstruction_error", &bisep_reconstruction_error);

  m.def("werner_state", [](const std::string& family, double p, const std::string& convention) {
    static const std::map<std::string, WernerFamily> fams{
        {"GHZ3", WernerFamily::kGhz3}, {"W3", WernerFamily::kW3},
        {"GHZ4", WernerFamily::kGhz4}, {"W4", WernerFamily::kW4},
        {"Cl4", WernerFamily::kCl4},   {"D24", WernerFamily::kD24},
        {"GHZ5", WernerFamily::kGhz5}, {"GHZ43", WernerFamily::kGhz43}};
    auto it = fams.find(family);
    if (it == fams.end()) throw std::invalid_argument("unknown family: " + family);
    NoiseConvention conv = convention == "state-weight" ? NoiseConvention::kStateWeight
                                                        : NoiseConvention::kNoiseWeight;
    return werner_state(it->second, p, conv);
  });
}
