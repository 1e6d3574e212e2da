#include "tniso/io.hpp"

#include <fstream>

namespace tniso {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

template <typename T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

Eigen::Index get_dim(const Json& j, const char* key) {
  const auto v = get<long long>(j, key);
  if (v < 0) throw ParseError(std::string("field '") + key + "' must be nonnegative");
  return static_cast<Eigen::Index>(v);
}

Json optional_double(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> optional_double_from(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get<double>(j, key);
}

Json matrices_to_json(const std::vector<ComplexMatrix>& ms) {
  Json a = Json::array();
  for (const auto& m : ms) a.push_back(matrix_to_json(m));
  return a;
}

std::vector<ComplexMatrix> matrices_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("expected an array of matrices");
  std::vector<ComplexMatrix> out;
  for (const auto& m : j) out.push_back(matrix_from_json(m));
  return out;
}

}  // namespace

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw ParseError("matrix must be a nonempty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ParseError("matrix rows must have equal length");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      const Json& e = row.at(static_cast<std::size_t>(k));
      if (e.is_number()) {
        m(i, k) = Complex(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ParseError("matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

Json real_vector_to_json(const RealVector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

RealVector real_vector_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("expected an array of numbers");
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError("expected an array of numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Json channel_to_json(const KrausChannel& e) {
  Json ks = Json::array();
  for (const auto& k : e.kraus()) ks.push_back(matrix_to_json(k));
  return {{"dim_in", e.dim_in()}, {"dim_out", e.dim_out()}, {"kraus", std::move(ks)}};
}

std::vector<ComplexMatrix> kraus_from_json(const Json& j) {
  const Eigen::Index din = get_dim(j, "dim_in");
  const Eigen::Index dout = get_dim(j, "dim_out");
  const Json& ks = field(j, "kraus");
  if (!ks.is_array() || ks.empty()) throw ParseError("'kraus' must be a nonempty array");
  std::vector<ComplexMatrix> out;
  for (const auto& k : ks) {
    ComplexMatrix m = matrix_from_json(k);
    if (m.rows() != dout || m.cols() != din) {
      throw ParseError("Kraus operator shape differs from dim_out x dim_in");
    }
    out.push_back(std::move(m));
  }
  return out;
}

KrausChannel channel_from_json(const Json& j, double tp_tol) {
  return KrausChannel(kraus_from_json(j), tp_tol);
}

Json decomposition_to_json(const SubsystemDecomposition& dec) {
  return {{"d_S", dec.d_s()}, {"d_F", dec.d_f()}, {"d_R", dec.d_r()},
          {"basis", matrix_to_json(dec.basis())}};
}

SubsystemDecomposition decomposition_from_json(const Json& j) {
  const Eigen::Index ds = get_dim(j, "d_S");
  const Eigen::Index df = get_dim(j, "d_F");
  const Eigen::Index dr = get_dim(j, "d_R");
  if (!j.contains("basis") || j.at("basis").is_null()) return SubsystemDecomposition::standard(ds, df, dr);
  return SubsystemDecomposition(ds, df, dr, matrix_from_json(j.at("basis")));
}

Json encoding_to_json(const IsometricEncoding& phi) {
  Json j = decomposition_to_json(phi.decomposition());
  j["tau"] = matrix_to_json(phi.cofactor().matrix());
  return j;
}

IsometricEncoding encoding_from_json(const Json& j) {
  SubsystemDecomposition dec = decomposition_from_json(j);
  return IsometricEncoding(std::move(dec), DensityOperator(matrix_from_json(field(j, "tau"))));
}

DensityOperator state_from_json(const Json& j) {
  if (j.is_object()) return DensityOperator(matrix_from_json(field(j, "state")));
  return DensityOperator(matrix_from_json(j));
}

Json to_json(const Verdict& v) { return {{"value", v.value}, {"residual", v.residual}}; }

Verdict verdict_from_json(const Json& j) { return {get<bool>(j, "value"), get<double>(j, "residual")}; }

Json to_json(const StructureReport& s) {
  Json j = {{"found", s.found},
            {"failed_stage", s.failed_stage},
            {"residual", s.residual},
            {"weights", real_vector_to_json(s.weights)},
            {"conjugation", to_string(s.conjugation)},
            {"anti_unitary_weights", s.anti_unitary_weights},
            {"alignment_residual", s.alignment_residual}};
  j["decomposition"] = s.decomposition ? decomposition_to_json(*s.decomposition) : Json(nullptr);
  j["cofactor"] = s.cofactor ? matrix_to_json(s.cofactor->matrix()) : Json(nullptr);
  return j;
}

StructureReport structure_from_json(const Json& j) {
  StructureReport s;
  s.found = get<bool>(j, "found");
  s.failed_stage = get<std::string>(j, "failed_stage");
  s.residual = get<double>(j, "residual");
  s.weights = real_vector_from_json(field(j, "weights"));
  const auto c = get<std::string>(j, "conjugation");
  if (c == "unitary") {
    s.conjugation = Conjugation::unitary;
  } else if (c == "anti-unitary") {
    s.conjugation = Conjugation::anti_unitary;
  } else if (c == "mixed") {
    s.conjugation = Conjugation::mixed;
  } else {
    throw ParseError("unknown conjugation '" + c + "'");
  }
  s.anti_unitary_weights = get<std::vector<bool>>(j, "anti_unitary_weights");
  s.alignment_residual = get<double>(j, "alignment_residual");
  if (j.contains("decomposition") && !j.at("decomposition").is_null()) {
    s.decomposition = decomposition_from_json(j.at("decomposition"));
  }
  if (j.contains("cofactor") && !j.at("cofactor").is_null()) {
    s.cofactor.emplace(matrix_from_json(j.at("cofactor")));
  }
  return s;
}

Json to_json(const ClassificationReport& r) {
  return {{"fixed", to_json(r.fixed)},
          {"preserved", to_json(r.preserved)},
          {"noiseless_certificate", to_json(r.noiseless_certificate)},
          {"correctable", to_json(r.correctable)},
          {"completely_correctable", to_json(r.completely_correctable)},
          {"protectable", to_json(r.protectable)},
          {"unitarily_correctable", to_json(r.unitarily_correctable)},
          {"unitarily_recoverable", to_json(r.unitarily_recoverable)},
          {"horizon", r.horizon},
          {"tolerance", r.tolerance}};
}

ClassificationReport classification_from_json(const Json& j) {
  ClassificationReport r;
  r.fixed = verdict_from_json(field(j, "fixed"));
  r.preserved = verdict_from_json(field(j, "preserved"));
  r.noiseless_certificate = verdict_from_json(field(j, "noiseless_certificate"));
  r.correctable = verdict_from_json(field(j, "correctable"));
  r.completely_correctable = verdict_from_json(field(j, "completely_correctable"));
  r.protectable = verdict_from_json(field(j, "protectable"));
  r.unitarily_correctable = verdict_from_json(field(j, "unitarily_correctable"));
  r.unitarily_recoverable = verdict_from_json(field(j, "unitarily_recoverable"));
  r.horizon = get<unsigned>(j, "horizon");
  r.tolerance = get<double>(j, "tolerance");
  return r;
}

Json to_json(const SimulationTrace& t) {
  return {{"iterations", t.iterations},
          {"epsilon", t.epsilon},
          {"errors", t.errors},
          {"decoded_errors", t.decoded_errors},
          {"linear_bound", t.linear_bound},
          {"alpha_estimates", t.alpha_estimates},
          {"alpha_max", optional_double(t.alpha_max)},
          {"geometric_bound", optional_double(t.geometric_bound)},
          {"states", matrices_to_json(t.states)},
          {"decoded_states", matrices_to_json(t.decoded_states)}};
}

SimulationTrace trace_from_json(const Json& j) {
  SimulationTrace t;
  t.iterations = get<std::size_t>(j, "iterations");
  t.epsilon = get<double>(j, "epsilon");
  t.errors = get<std::vector<double>>(j, "errors");
  t.decoded_errors = get<std::vector<double>>(j, "decoded_errors");
  t.linear_bound = get<std::vector<double>>(j, "linear_bound");
  t.alpha_estimates = get<std::vector<double>>(j, "alpha_estimates");
  t.alpha_max = optional_double_from(j, "alpha_max");
  t.geometric_bound = optional_double_from(j, "geometric_bound");
  if (j.contains("states")) t.states = matrices_from_json(j.at("states"));
  if (j.contains("decoded_states")) t.decoded_states = matrices_from_json(j.at("decoded_states"));
  return t;
}

Json to_json(const EpsilonEstimate& e) {
  return {{"epsilon", e.epsilon},
          {"upper_bound", e.upper_bound},
          {"witness", matrix_to_json(e.witness.matrix())},
          {"method",
           {{"samples", e.method.samples},
            {"refine_steps", e.method.refine_steps},
            {"seed", e.method.seed}}}};
}

EpsilonEstimate epsilon_from_json(const Json& j) {
  const Json& m = field(j, "method");
  return {get<double>(j, "epsilon"), get<double>(j, "upper_bound"),
          DensityOperator(matrix_from_json(field(j, "witness"))),
          {get<std::size_t>(m, "samples"), get<std::size_t>(m, "refine_steps"),
           get<std::uint64_t>(m, "seed")}};
}

Json to_json(const Report& r) {
  return {{"tniso_version", r.tniso_version},
          {"command", r.command},
          {"config", r.config},
          {"results", r.results},
          {"duration_seconds", r.duration_seconds}};
}

Report report_from_json(const Json& j) {
  return {get<std::string>(j, "tniso_version"), get<std::string>(j, "command"), field(j, "config"),
          field(j, "results"), get<double>(j, "duration_seconds")};
}

std::string report_body(const Report& r) {
  Json j = to_json(r);
  j.erase("duration_seconds");
  return j.dump();
}

}  // namespace tniso
