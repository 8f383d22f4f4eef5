#pragma once

#include "isonorm/body.hpp"
#include "isonorm/rng.hpp"

#include <cstdint>
#include <string>

namespace isonorm {

enum class SampleMethod : std::uint64_t { direct = 0, rejection = 1, hit_and_run = 2 };

const char* to_string(SampleMethod m);

/// A block of sampled points with full provenance. Points are stored one
/// point per row (count x dim).
struct SampleBatch {
    Mat points;
    std::string source; // measure label
    SampleMethod method = SampleMethod::direct;
    std::int64_t burn_in = 0;
    std::int64_t thinning = 0;
    RngKey stream{};
    double acceptance_rate = 1.0; // rejection only; 1 otherwise

    std::int64_t count() const { return points.rows(); }
    int dim() const { return static_cast<int>(points.cols()); }
};

/// Flat binary layout: magic "ISONBAT1", then little-endian 64-bit fields
/// dim, count, method, seed, stream_id, then count*dim doubles row-major.
/// A JSON sidecar `<path>.meta.json` carries the full metadata.
void save_batch(const SampleBatch& batch, const std::string& path);
SampleBatch load_batch(const std::string& path);

} // namespace isonorm
