#pragma once

#include <filesystem>
#include <json.hpp>

#include "fwgames/experiment_game.hpp"
#include "fwgames/games.hpp"
#include "fwgames/strategies.hpp"

namespace fwg {

/// Game files: {"kind": "normal_form" | "congestion" | "markov", ...} or
/// {"builtin": "experiment", ...experiment overrides}. Malformed input throws
/// Error with ConfigError.
Game game_from_json(const nlohmann::json& j);
nlohmann::json game_to_json(const Game& game);
Game load_game(const std::filesystem::path& path);
void save_game(const Game& game, const std::filesystem::path& path);

NoiseModel noise_from_json(const nlohmann::json& j);
nlohmann::json noise_to_json(const NoiseModel& noise);

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json experiment_config_to_json(const ExperimentConfig& c);

/// Reads and parses a JSON file; missing files and parse errors are ConfigError.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace fwg
