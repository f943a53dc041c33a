#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>

#include "rescomp/error.hpp"
#include "rescomp/pipeline.hpp"

namespace py = pybind11;
using namespace rescomp;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Encoder error compensation: calibration data, networks, Fourier models";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result([&] { return py::exception<Error>(m, "RescompError"); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error_type.get_stored(), (std::string(e.name()) + ": " + e.what()).c_str());
    }
  });

  // caldata
  py::class_<CalibrationSample>(m, "CalibrationSample")
      .def(py::init<double, double>(), py::arg("table_angle_deg"), py::arg("encoder_angle_deg"))
      .def_readonly("table_angle_deg", &CalibrationSample::table_angle_deg)
      .def_readonly("encoder_angle_deg", &CalibrationSample::encoder_angle_deg);

  py::class_<CalibrationSet>(m, "CalibrationSet")
      .def(py::init([](const std::vector<std::pair<double, double>>& rows, std::string id, std::string epoch) {
             std::vector<CalibrationSample> s;
             for (auto [t, e] : rows) s.push_back({t, e});
             return CalibrationSet(std::move(s), std::move(id), std::move(epoch));
           }),
           py::arg("rows"), py::arg("encoder_id") = "", py::arg("epoch") = "")
      .def("__len__", &CalibrationSet::size)
      .def_property_readonly("encoder_id", &CalibrationSet::encoder_id)
      .def_property_readonly("samples", [](const CalibrationSet& c) {
        return std::vector<CalibrationSample>(c.samples().begin(), c.samples().end());
      });

  py::class_<ErrorPoint>(m, "ErrorPoint")
      .def_readonly("encoder_angle_deg", &ErrorPoint::encoder_angle_deg)
      .def_readonly("error_arcmin", &ErrorPoint::error_arcmin);
  py::class_<ErrorProfile>(m, "ErrorProfile")
      .def("__len__", &ErrorProfile::size)
      .def_readonly("points", &ErrorProfile::points);

  py::class_<ProfileStats>(m, "ProfileStats")
      .def_readonly("mae_arcmin", &ProfileStats::mae_arcmin)
      .def_readonly("rms_arcmin", &ProfileStats::rms_arcmin)
      .def_readonly("min_arcmin", &ProfileStats::min_arcmin)
      .def_readonly("max_arcmin", &ProfileStats::max_arcmin)
      .def_readonly("n_samples", &ProfileStats::n_samples);

  m.def("load_calibration", &load_calibration, py::arg("path"), py::arg("encoder_id") = "",
        py::arg("epoch") = "");
  m.def("save_calibration", &save_calibration, py::arg("path"), py::arg("cal"));
  m.def("error_profile", &error_profile);
  m.def("partition_even_odd", &partition_even_odd);
  m.def("stats", py::overload_cast<const ErrorProfile&>(&stats));

  // simgen
  py::class_<HarmonicTerm>(m, "HarmonicTerm")
      .def(py::init<int, double, double>(), py::arg("n"), py::arg("amp_arcmin"), py::arg("phase_rad") = 0.0)
      .def_readwrite("n", &HarmonicTerm::n)
      .def_readwrite("amp_arcmin", &HarmonicTerm::amp_arcmin)
      .def_readwrite("phase_rad", &HarmonicTerm::phase_rad);
  py::class_<HarmonicSpec>(m, "HarmonicSpec")
      .def(py::init([](std::vector<HarmonicTerm> terms, double sigma, std::uint64_t seed) {
             return HarmonicSpec{std::move(terms), sigma, seed};
           }),
           py::arg("terms") = std::vector<HarmonicTerm>{}, py::arg("noise_sigma_arcmin") = 0.1,
           py::arg("seed") = 42)
      .def_readwrite("terms", &HarmonicSpec::terms)
      .def_readwrite("noise_sigma_arcmin", &HarmonicSpec::noise_sigma_arcmin)
      .def_readwrite("seed", &HarmonicSpec::seed);
  m.def("quantize16", &quantize16);
  m.def("reference_archetype", &reference_archetype);
  m.def(
      "synthesize",
      [](const HarmonicSpec& spec, double step, double offset, bool quantize, std::string id) {
        return synthesize(spec, {step, offset, quantize, std::move(id), {}});
      },
      py::arg("spec"), py::arg("step") = 2.0, py::arg("offset") = 0.0, py::arg("quantize") = true,
      py::arg("encoder_id") = "synthetic");

  // ann + optim
  py::class_<NetworkShape>(m, "NetworkShape")
      .def(py::init<std::size_t, std::size_t, std::size_t>(), py::arg("inputs") = 1, py::arg("hidden") = 80,
           py::arg("outputs") = 1)
      .def_readonly("inputs", &NetworkShape::inputs)
      .def_readonly("hidden", &NetworkShape::hidden)
      .def_readonly("outputs", &NetworkShape::outputs)
      .def("parameter_count", &NetworkShape::parameter_count);
  py::class_<Network>(m, "Network")
      .def_property_readonly("shape", &Network::shape)
      .def_property_readonly("parameters", [](const Network& n) { return n.params.flatten(); });
  py::class_<Dataset>(m, "Dataset")
      .def(py::init<Eigen::MatrixXd, Eigen::MatrixXd>(), py::arg("inputs"), py::arg("targets"))
      .def_readonly("inputs", &Dataset::inputs)
      .def_readonly("targets", &Dataset::targets);

  py::class_<TrainingConfig>(m, "TrainingConfig")
      .def(py::init<>())
      .def_readwrite("max_iterations", &TrainingConfig::max_iterations)
      .def_readwrite("learning_rate", &TrainingConfig::learning_rate)
      .def_readwrite("lm_lambda0", &TrainingConfig::lm_lambda0)
      .def_readwrite("lm_factor", &TrainingConfig::lm_factor)
      .def_readwrite("stall_window", &TrainingConfig::stall_window)
      .def_readwrite("stall_tol", &TrainingConfig::stall_tol)
      .def_readwrite("seed", &TrainingConfig::seed);
  py::class_<TrainingHistory>(m, "TrainingHistory")
      .def_readonly("mse_per_iteration", &TrainingHistory::mse_per_iteration)
      .def_readonly("iterations_run", &TrainingHistory::iterations_run)
      .def_property_readonly("stop_reason",
                             [](const TrainingHistory& h) { return std::string(to_string(h.stop_reason)); });

  m.def("init_network", &init_network, py::arg("shape"), py::arg("seed"), py::arg("lo_arcmin") = -6.0,
        py::arg("hi_arcmin") = 6.0);
  m.def("forward", &forward);
  m.def("mse", &mse);
  m.def("gradient", [](const Network& n, const Dataset& d) { return gradient(n, d).flatten(); });
  m.def("make_dataset", [](const CalibrationSet& cal, double lo, double hi) {
    return make_dataset(cal, target_map(lo, hi));
  }, py::arg("cal"), py::arg("lo_arcmin") = -6.0, py::arg("hi_arcmin") = 6.0);
  auto unpack = [](TrainingResult r) { return py::make_tuple(std::move(r.network), std::move(r.history), r.final_mse); };
  m.def("train_lm", [unpack](const Network& n, const Dataset& d, const TrainingConfig& c) {
    return unpack(train_lm(n, d, c));
  });
  m.def("train_backprop", [unpack](const Network& n, const Dataset& d, const TrainingConfig& c) {
    return unpack(train_backprop(n, d, c));
  });

  // prune
  m.def("activation_matrix", [](const Network& n, const Dataset& d) { return activation_matrix(n, d).values; });
  m.def("singular_values", [](const Eigen::MatrixXd& x) { return singular_values({x}).values; });
  m.def("effective_rank", [](const std::vector<double>& s, double tol) { return effective_rank({s}, tol); },
        py::arg("spectrum"), py::arg("rel_tol") = 1e-3);

  // fourier
  py::class_<FourierTerm>(m, "FourierTerm")
      .def_readonly("n", &FourierTerm::n)
      .def_readonly("a", &FourierTerm::a)
      .def_readonly("b", &FourierTerm::b);
  py::class_<FourierModel>(m, "FourierModel")
      .def(py::init<>())
      .def_readwrite("a0", &FourierModel::a0)
      .def_readonly("terms", &FourierModel::terms);
  m.def("harmonic_spectrum", [](const ErrorProfile& p) {
    std::vector<std::pair<int, double>> out;
    for (const auto& e : harmonic_spectrum(p).entries) out.emplace_back(e.n, e.amplitude_arcmin);
    return out;
  });
  m.def("select_top", [](const ErrorProfile& p, std::size_t count) {
    return select_top(harmonic_spectrum(p), count);
  }, py::arg("profile"), py::arg("count") = 10);
  m.def("fit_fourier", [](const ErrorProfile& p, const std::vector<int>& orders) {
    return fit_fourier(p, orders);
  });
  m.def("eval_fourier", &eval_fourier);

  // pipeline
  py::enum_<ModelKind>(m, "ModelKind").value("ANN", ModelKind::ANN).value("Fourier", ModelKind::Fourier);
  py::class_<CompensationModel>(m, "CompensationModel")
      .def_static("ann", &CompensationModel::ann, py::arg("network"), py::arg("encoder_id") = "")
      .def_static("fourier", &CompensationModel::fourier, py::arg("model"), py::arg("encoder_id") = "")
      .def_readonly("kind", &CompensationModel::kind)
      .def_readonly("encoder_id", &CompensationModel::encoder_id);
  py::class_<EvaluationReport>(m, "EvaluationReport")
      .def_readonly("pre_stats", &EvaluationReport::pre_stats)
      .def_readonly("post_stats", &EvaluationReport::post_stats)
      .def_readonly("max_abs_residual_arcmin", &EvaluationReport::max_abs_residual_arcmin);
  m.def("save_model", &save_model);
  m.def("load_model", [](const std::filesystem::path& p) { return load_model(p); });
  m.def("predict_error", &predict_error);
  m.def("correct", &correct);
  m.def("evaluate", &evaluate);
}
