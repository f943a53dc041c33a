// Weight-file persistence for compensation models.
//
// Layout (format_version 1):
//   { "format_version": 1, "kind": "ann" | "fourier", "encoder_id": "...", ...payload }
// ANN payload: "shape" {inputs, hidden, outputs}, "input_norm" and "target_norm"
// {lo, hi, norm_lo, norm_hi}, "parameters" {hidden_weights (J×K row-major),
// hidden_thresholds, output_weights (I×J row-major), output_thresholds}.
// Fourier payload: "a0" and "terms" [{n, a, b}].
// Doubles are written in shortest round-trip form, so reloading is bit-exact.

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rescomp/error.hpp"
#include "rescomp/pipeline.hpp"

namespace rescomp {
namespace {

using nlohmann::json;

json map_to_json(const AffineMap& m) {
  return {{"lo", m.lo}, {"hi", m.hi}, {"norm_lo", m.norm_lo}, {"norm_hi", m.norm_hi}};
}

AffineMap map_from_json(const json& j) {
  AffineMap m{j.at("lo").get<double>(), j.at("hi").get<double>(), j.at("norm_lo").get<double>(),
              j.at("norm_hi").get<double>()};
  if (!(m.hi > m.lo) || m.norm_hi == m.norm_lo) {
    throw Error(ErrorCode::CorruptFile, "normalization map is not invertible");
  }
  return m;
}

json row_major(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

json vec(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

std::vector<double> doubles(const json& j, std::size_t expected, const char* field) {
  auto values = j.at(field).get<std::vector<double>>();
  if (values.size() != expected) {
    throw Error(ErrorCode::CorruptFile, std::string(field) + " has " + std::to_string(values.size()) +
                                            " entries, expected " + std::to_string(expected));
  }
  return values;
}

json network_payload(const Network& net) {
  const auto shape = net.shape();
  const auto& p = net.params;
  return {{"shape", {{"inputs", shape.inputs}, {"hidden", shape.hidden}, {"outputs", shape.outputs}}},
          {"input_norm", map_to_json(net.input_norm)},
          {"target_norm", map_to_json(net.target_norm)},
          {"parameters",
           {{"hidden_weights", row_major(p.w_hidden)},
            {"hidden_thresholds", vec(p.theta_hidden)},
            {"output_weights", row_major(p.w_output)},
            {"output_thresholds", vec(p.theta_output)}}}};
}

Network network_from(const json& j) {
  const auto& s = j.at("shape");
  const NetworkShape shape{s.at("inputs").get<std::size_t>(), s.at("hidden").get<std::size_t>(),
                           s.at("outputs").get<std::size_t>()};
  if (shape.inputs == 0 || shape.hidden == 0 || shape.outputs == 0) {
    throw Error(ErrorCode::CorruptFile, "network shape has an empty layer");
  }
  Network net;
  net.input_norm = map_from_json(j.at("input_norm"));
  net.target_norm = map_from_json(j.at("target_norm"));
  net.params = Parameters::zeros(shape);

  const auto& p = j.at("parameters");
  std::vector<double> flat;
  flat.reserve(shape.parameter_count());
  for (auto [field, n] : {std::pair{"hidden_weights", shape.hidden * shape.inputs},
                          std::pair{"hidden_thresholds", shape.hidden},
                          std::pair{"output_weights", shape.outputs * shape.hidden},
                          std::pair{"output_thresholds", shape.outputs}}) {
    const auto part = doubles(p, n, field);
    flat.insert(flat.end(), part.begin(), part.end());
  }
  net.params.assign(Eigen::Map<const Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size())));
  if (!net.params.all_finite()) throw Error(ErrorCode::CorruptFile, "non-finite network parameter");
  return net;
}

json fourier_payload(const FourierModel& m) {
  json terms = json::array();
  for (const auto& t : m.terms) terms.push_back({{"n", t.n}, {"a", t.a}, {"b", t.b}});
  return {{"a0", m.a0}, {"terms", terms}};
}

FourierModel fourier_from(const json& j) {
  FourierModel m;
  m.a0 = j.at("a0").get<double>();
  for (const auto& t : j.at("terms")) {
    m.terms.push_back({t.at("n").get<int>(), t.at("a").get<double>(), t.at("b").get<double>()});
    if (m.terms.back().n <= 0) throw Error(ErrorCode::CorruptFile, "Fourier term order must be > 0");
  }
  return m;
}

std::optional<ModelKind> parse_kind(const std::string& s) {
  if (s == "ann") return ModelKind::ANN;
  if (s == "fourier") return ModelKind::Fourier;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(ModelKind kind) noexcept {
  return kind == ModelKind::ANN ? "ann" : "fourier";
}

CompensationModel CompensationModel::ann(Network net, std::string encoder_id) {
  return {ModelKind::ANN, std::move(encoder_id), std::move(net), kModelFormatVersion};
}

CompensationModel CompensationModel::fourier(FourierModel model, std::string encoder_id) {
  return {ModelKind::Fourier, std::move(encoder_id), std::move(model), kModelFormatVersion};
}

void write_model(std::ostream& out, const CompensationModel& model) {
  const bool is_ann = std::holds_alternative<Network>(model.payload);
  if (is_ann != (model.kind == ModelKind::ANN)) {
    throw Error(ErrorCode::KindMismatch, "model kind tag does not match its payload");
  }
  json j = is_ann ? network_payload(std::get<Network>(model.payload))
                  : fourier_payload(std::get<FourierModel>(model.payload));
  j["format_version"] = model.format_version;
  j["kind"] = std::string(to_string(model.kind));
  j["encoder_id"] = model.encoder_id;
  out << j.dump(2) << '\n';
}

CompensationModel read_model(std::istream& in, std::optional<ModelKind> expected) {
  const json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::CorruptFile, "model file is not a JSON object");
  }
  try {
    if (!j.contains("format_version") || !j.at("format_version").is_number_integer()) {
      throw Error(ErrorCode::CorruptFile, "model file lacks an integer format_version");
    }
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw Error(ErrorCode::UnsupportedVersion,
                  "model format_version " + std::to_string(version) + " is not supported");
    }
    const auto kind = parse_kind(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::CorruptFile, "unknown model kind");
    if (expected && *expected != *kind) {
      throw Error(ErrorCode::KindMismatch, "expected a " + std::string(to_string(*expected)) +
                                               " model, file holds " + std::string(to_string(*kind)));
    }
    const bool has_ann = j.contains("parameters");
    const bool has_fourier = j.contains("a0");
    if ((*kind == ModelKind::ANN && !has_ann && has_fourier) ||
        (*kind == ModelKind::Fourier && !has_fourier && has_ann)) {
      throw Error(ErrorCode::KindMismatch, "payload does not match kind tag");
    }

    CompensationModel model;
    model.kind = *kind;
    model.format_version = version;
    model.encoder_id = j.value("encoder_id", std::string{});
    if (*kind == ModelKind::ANN) {
      model.payload = network_from(j);
    } else {
      model.payload = fourier_from(j);
    }
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptFile, std::string("malformed model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const CompensationModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_model(out, model);
}

CompensationModel load_model(const std::filesystem::path& path, std::optional<ModelKind> expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_model(in, expected);
}

}  // namespace rescomp
