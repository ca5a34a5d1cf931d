#pragma once

#include "attdet/estimation.hpp"
#include "attdet/matcore.hpp"
#include "attdet/measurements.hpp"
#include "attdet/simulation.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace attdet {

using Json = nlohmann::json;

/// Matrices serialize as row-major nested arrays.
Json matrix_to_json(const Mat& X);
Mat matrix_from_json(const Json& j, const char* what);
Json vector_to_json(const Vec& v);
Vec vector_from_json(const Json& j, const char* what);

Json to_json(const NoiseSpec& noise);
NoiseSpec noise_from_json(const Json& j);

Json to_json(const MeasurementSet& ms);
MeasurementSet measurement_set_from_json(const Json& j);

Json to_json(const TrajectorySpec& ts);
TrajectorySpec trajectory_from_json(const Json& j);

Json to_json(const ScenarioSpec& sc);
ScenarioSpec scenario_from_json(const Json& j);

Json to_json(const FilterStudyConfig& fc);
FilterStudyConfig filter_study_from_json(const Json& j);

/// Shortest round-trip-exact decimal rendering of a double (%.17g), so CSV
/// artifacts are byte-stable for identical inputs.
std::string format_double(double v);

/// Per-trial sweep rows: scenario_id,N,M,kind,trial,eta_rad,loss,sigma3_rms,seed
void write_sweep_csv(const std::string& path, const std::string& scenario_id,
                     const SweepResult& result, std::uint64_t seed);

/// Per-cell summary rows.
void write_summary_csv(const std::string& path, const std::string& scenario_id,
                       const SweepResult& result);

/// Filter log: t,q0,q1,q2,q3,bias_x,bias_y,bias_z,nis
void write_filter_csv(const std::string& path, const std::vector<FilterLogRow>& rows);

/// Reproducibility block stamped into every JSON artifact.
Json metadata_json(std::uint64_t seed, const Json& resolved_config);

void write_json_file(const std::string& path, const Json& j);
Json read_json_file(const std::string& path);

}  // namespace attdet
