#pragma once

#include <string>

#include <json.hpp>

#include "coexist/results.hpp"
#include "coexist/signal_model.hpp"

namespace coexist {

/// Scene <-> JSON. Complex numbers are [re, im] pairs; field names follow the
/// scene structure. The frequency-domain dictionary is recomputed on load so
/// the DFT relation between the two dictionary views holds exactly.
nlohmann::json scene_to_json(const SceneConfig& scene);
SceneConfig scene_from_json(const nlohmann::json& j);

std::string scene_to_json_string(const SceneConfig& scene);
SceneConfig scene_from_json_string(const std::string& text);

/// Observation CSV with header "k,re,im", '.' decimal, one row per subcarrier.
std::string observation_to_csv(const FreqObservation& obs);
FreqObservation observation_from_csv(const std::string& text, double noise_var);

/// Radar estimates as JSON (delay in seconds and normalized, coefficient
/// block, waveform energy).
nlohmann::json radar_report_json(const std::vector<RadarEstimate>& radars);

/// Solve result summary (symbols and traces included).
nlohmann::json solve_result_json(const SolveResult& result);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace coexist
