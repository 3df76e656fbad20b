#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pqlab/asymptotics.hpp"
#include "pqlab/eigenvalue.hpp"
#include "pqlab/infinity.hpp"
#include "pqlab/solver.hpp"

namespace pqlab {

inline constexpr const char* kArtifactVersion = "0.3.0";

using Json = nlohmann::ordered_json;

/// "%.17g"; non-finite values print as nan / inf / -inf.
std::string format_number(double x);

Json to_json(const Domain& domain);
Json to_json(const ProblemParams& params);
Json to_json(const SolverConfig& cfg);
Json to_json(const EnergyBreakdown& e);
Json to_json(const MaxSet& m, const Domain& domain);
Json to_json(const GateDecision& g);
Json to_json(const SolveReport& r);
Json to_json(const EigenResult& r);
Json to_json(const LambdaInfEstimate& e);
Json to_json(const ContinuationReport& r);
Json to_json(const SweepSpec& s);
Json to_json(const PredictedLimits& p);
Json to_json(const ConvergenceReport& r);
Json to_json(const ConsistencyDiagnostics& c);

/// Writes body with "artifact_version" and "config_hash" prepended.
void write_json(const std::string& path, const Json& body, const std::string& config_hash);

/// Writes a "# artifact_version=... config_hash=..." line, the header and the rows.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows, const std::string& config_hash);

/// Iteration trace: iter, energy, nehari_residual, step, stationarity.
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace, const std::string& config_hash);

/// Sweep table: p, q, lambda_root, u_sup, grad_sup, grad_sup_off_tip, max_node,
/// max_x, max_y, envelope_max, weak_residual, nehari_residual, skipped.
void write_sweep_csv(const std::string& path, const ConvergenceReport& r, const std::string& config_hash);

}  // namespace pqlab
