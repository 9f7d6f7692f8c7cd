#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "krein/singular_perturbation.hpp"

namespace krein {

// {"dim": n, "re": [[...]], "im": [[...]]}, row-major.
nlohmann::json matrix_to_json(const Mat& m);
Mat matrix_from_json(const nlohmann::json& j);

void write_matrix(const std::filesystem::path& path, const Mat& m);
Mat read_matrix(const std::filesystem::path& path);

// {"H", "A", "S", "s_exponent", "lambda_circ"}
nlohmann::json singular_model_to_json(const SingularModel& sm);
SingularModel singular_model_from_json(const nlohmann::json& j);

// Writes JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace krein
