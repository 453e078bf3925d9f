#pragma once

#include <filesystem>
#include <vector>

#include "lgd/core_model.hpp"

namespace lgd {

// Task files are JSON arrays of
//   {"d_x": .., "n": .., "n_v": .., "X": [[..], ..], "y": [..],
//    "Xv": [[..], ..], "yv": [..], "w_star": [..] | null}
// with row-major nested arrays. Doubles are written in shortest round-trip form.

void save_tasks(const std::filesystem::path& path, const std::vector<Task>& tasks);
std::vector<Task> load_tasks(const std::filesystem::path& path);

std::string tasks_to_json_string(const std::vector<Task>& tasks);
/// Throws ParseError naming the offending task index and field.
std::vector<Task> tasks_from_json_string(const std::string& text);

}  // namespace lgd
