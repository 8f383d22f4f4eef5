#pragma once

#include "isonorm/body.hpp"
#include "isonorm/estimate.hpp"
#include "isonorm/measure.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace isonorm {

using Json = nlohmann::ordered_json;

/// Body schema: {"type": "cube", "dim": 3, "half_width": 0.5}, matrices
/// row-major; attached estimated volumes and the isotropic flag round-trip.
Json body_to_json(const Body& body);
Body body_from_json(const nlohmann::json& j);

/// Measure schema: {"type": "uniform"|"gaussian"|"weighted_sum"|"rescaled", ...}.
Json measure_to_json(const MeasureSpec& measure);
MeasureSpec measure_from_json(const nlohmann::json& j);

Json estimate_to_json(const Estimate& est);

/// Convenience: parse a body from either an inline JSON object or a name
/// like "cube", "ball2", "ball1", "ballinf", "pball:1.5" (dim supplied).
Body body_from_cli(const std::string& text, int dim);

} // namespace isonorm
