#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "specbeam/camera.hpp"
#include "specbeam/fusion.hpp"
#include "specbeam/radar.hpp"
#include "specbeam/resilience.hpp"
#include "specbeam/specular.hpp"

namespace specbeam {

inline constexpr int kFormatVersion = 1;

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

/// Locale-independent shortest-round-trip decimal rendering; every number
/// in the text formats goes through this so byte-identical reruns hold.
std::string format_double(double v);

nlohmann::json radar_config_to_json(const RadarConfig& cfg);
RadarConfig radar_config_from_json(const nlohmann::json& j);

// IQ capture container: one-line JSON header, '\n', then little-endian
// float32 (re, im) pairs row-major [antenna][sample].
void write_iq_file(const IQCube& cube, const std::string& scene_hash,
                   const std::filesystem::path& path);
struct IqFile {
    IQCube cube;
    std::string scene_hash;
};
IqFile read_iq_file(const std::filesystem::path& path);

// Monocular map: same container, float32 grid row-major [row][col], NaN
// where undefined.
void write_mono_file(const MonocularDepthMap& map, const std::filesystem::path& path);
MonocularDepthMap read_mono_file(const std::filesystem::path& path);

void write_mask_file(const SegmentationMask& mask, const std::filesystem::path& path);
SegmentationMask read_mask_file(const std::filesystem::path& path);

nlohmann::json declutter_report_to_json(const DeclutterReport& report);

void write_correlation_csv(const CorrelationCurve& curve, const std::filesystem::path& path);
void write_sparse_cloud_csv(const SparsePointCloud& cloud, const std::filesystem::path& path);
void write_dense_image_csv(const DenseDepthImage& image, const std::filesystem::path& path);
void write_dense_points_csv(const DenseDepthImage& image, const std::filesystem::path& path);

}  // namespace specbeam
