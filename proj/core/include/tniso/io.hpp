#pragma once

// JSON formats.
//
//   matrix   [[[re, im], ...], ...]   rows of [re, im] pairs (plain numbers
//                                     are read as real entries)
//   channel  {"dim_in", "dim_out", "kraus": [matrix, ...]}
//   code     {"d_S", "d_F", "d_R", "basis": matrix, "tau": matrix}
//   state    matrix, or {"state": matrix}

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tniso/analysis.hpp"
#include "tniso/channels.hpp"
#include "tniso/codes.hpp"
#include "tniso/robustness.hpp"

namespace tniso {

using Json = nlohmann::json;

// Malformed or inconsistent input.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);
Json real_vector_to_json(const RealVector& v);
RealVector real_vector_from_json(const Json& j);

Json channel_to_json(const KrausChannel& e);
// Shape checks only; trace preservation is left to the caller.
std::vector<ComplexMatrix> kraus_from_json(const Json& j);
KrausChannel channel_from_json(const Json& j, double tp_tol = kDefaultTolerances.tp);

Json decomposition_to_json(const SubsystemDecomposition& dec);
SubsystemDecomposition decomposition_from_json(const Json& j);
Json encoding_to_json(const IsometricEncoding& phi);
IsometricEncoding encoding_from_json(const Json& j);

DensityOperator state_from_json(const Json& j);

Json to_json(const Verdict& v);
Verdict verdict_from_json(const Json& j);

Json to_json(const StructureReport& s);
StructureReport structure_from_json(const Json& j);

Json to_json(const ClassificationReport& r);
ClassificationReport classification_from_json(const Json& j);

Json to_json(const SimulationTrace& t);
SimulationTrace trace_from_json(const Json& j);

Json to_json(const EpsilonEstimate& e);
EpsilonEstimate epsilon_from_json(const Json& j);

struct Report {
  std::string tniso_version;
  std::string command;
  Json config;
  Json results;
  double duration_seconds = 0.0;
};

Json to_json(const Report& r);
Report report_from_json(const Json& j);
// Serialized report without the wall-clock field.
std::string report_body(const Report& r);

}  // namespace tniso
