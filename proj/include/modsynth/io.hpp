#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "modsynth/evolve.hpp"
#include "modsynth/modlib.hpp"
#include "modsynth/planner.hpp"
#include "modsynth/tasks.hpp"

namespace modsynth {

using nlohmann::json;

json transform_to_json(const Transform& t);
Transform transform_from_json(const json& j);

json primitive_to_json(const Primitive& p);
Primitive primitive_from_json(const json& j);

json library_to_json(const ModuleLibrary& library);
ModuleLibrary library_from_json(const json& j);

json task_to_json(const Task& task);
Task task_from_json(const json& j);

json trajectory_to_json(const Trajectory& trajectory);
Trajectory trajectory_from_json(const json& j);

json fitness_to_json(const FitnessVector& f);

json history_to_json(const RunHistory& history);
std::string history_to_csv(const RunHistory& history);

/// Throws ParseError with the file name on malformed input.
json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

ModuleLibrary load_library(const std::filesystem::path& path);
Task load_task(const std::filesystem::path& path);

}  // namespace modsynth
