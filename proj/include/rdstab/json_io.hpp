#pragma once

#include <string>

#include <json.hpp>

#include "rdstab/matrix.hpp"
#include "rdstab/rds.hpp"

namespace rdstab {

// Matrix files: {"n": <dim>, "rows": [[...], ...]}.  Entries must be finite
// and nonnegative; values in (-1e-12, 0) produced by serialization are
// clamped to zero on load.
NonnegMatrix matrix_from_json(const nlohmann::json& j, double slack = 1e-12);
nlohmann::ordered_json matrix_to_json(const NonnegMatrix& m);
NonnegMatrix load_matrix_file(const std::string& path, double slack = 1e-12);

// Certificates: {"flavor": ..., "margin": ...} plus the flavor's payload
// ("vector", "diag", or spectral radii for the structural kinds).
nlohmann::ordered_json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const nlohmann::json& j);
Certificate load_certificate_file(const std::string& path);

nlohmann::ordered_json verdict_to_json(const RdsVerdict& v);

Vector vector_from_json(const nlohmann::json& j, const char* what);

} // namespace rdstab
