#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "darkpoint/bench.hpp"
#include "darkpoint/heatmap.hpp"

namespace darkpoint {

// HMAP container: "HMAP" magic, u16 format version, u32 width, u32 height,
// f64 lambda, then width*height IEEE-754 float32 activations row-major.
// Every field is little-endian.
inline constexpr uint16_t kHmapVersion = 1;
inline constexpr size_t kHmapHeaderBytes = 4 + 2 + 4 + 4 + 8;

/// Serializes to a temp file then renames, so an interrupted run never
/// leaves a half-written heatmap behind.
void write_hmap(const std::filesystem::path& path, const HeatmapF& h);

inline void write_hmap(const std::filesystem::path& path, const Heatmap& h) {
    write_hmap(path, h.cast<float>());
}

HeatmapF read_hmap(const std::filesystem::path& path);

/// Whole-file write via temp + rename; shared by every text output.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Deterministic JSON rendering of a report: cells keyed "encoding/strategy",
/// wall-clock timings excluded so identical runs produce identical bytes.
std::string report_to_json(const BenchReport& report);

/// One CSV row per cell, including the (non-deterministic) ns_per_decode.
std::string report_to_csv(const BenchReport& report);

/// Fixed-width mean-error table for eyeballing on stdout.
std::string report_to_table(const BenchReport& report);

inline const char* to_string(NormMode norm) {
    return norm == NormMode::Density ? "density" : "peakone";
}

inline NormMode parse_norm(const std::string& text) {
    if (text == "density") return NormMode::Density;
    if (text == "peakone") return NormMode::PeakOne;
    throw ConfigError("invalid config: unknown normalization '" + text + "'");
}

}  // namespace darkpoint
