#include "specbeam/serial.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>

#include "specbeam/errors.hpp"

namespace specbeam {

namespace {

using nlohmann::json;

void write_f32_payload(std::ofstream& out, std::span<const float> values) {
    static_assert(sizeof(float) == 4);
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(float)));
}

std::vector<float> read_f32_payload(std::ifstream& in, std::size_t count,
                                    const std::string& what) {
    std::vector<float> values(count);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(count * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(float)) {
        throw ParseError("truncated payload in " + what);
    }
    return values;
}

json read_header_line(std::ifstream& in, const std::string& what) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("missing header in " + what);
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError("malformed header in " + what + ": " + e.what());
    }
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string format_double(double v) {
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json radar_config_to_json(const RadarConfig& cfg) {
    return json{{"carrier_hz", cfg.carrier_hz},
                {"bandwidth_hz", cfg.bandwidth_hz},
                {"num_samples", cfg.num_samples},
                {"num_antennas", cfg.num_antennas},
                {"element_spacing_wavelengths", cfg.element_spacing_wavelengths},
                {"rng_seed", cfg.rng_seed},
                {"amplitude_exponent", cfg.amplitude_exponent}};
}

RadarConfig radar_config_from_json(const json& j) {
    RadarConfig cfg;
    cfg.carrier_hz = j.at("carrier_hz").get<double>();
    cfg.bandwidth_hz = j.at("bandwidth_hz").get<double>();
    cfg.num_samples = j.at("num_samples").get<int>();
    cfg.num_antennas = j.at("num_antennas").get<int>();
    cfg.element_spacing_wavelengths = j.at("element_spacing_wavelengths").get<double>();
    cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    if (j.contains("amplitude_exponent")) {
        cfg.amplitude_exponent = j.at("amplitude_exponent").get<double>();
    }
    cfg.validate();
    return cfg;
}

void write_iq_file(const IQCube& cube, const std::string& scene_hash,
                   const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write capture file: " + path.string());
    const json header{{"format_version", kFormatVersion},
                      {"kind", "iq_capture"},
                      {"config", radar_config_to_json(cube.config)},
                      {"scene_hash", scene_hash}};
    out << header.dump() << '\n';
    std::vector<float> payload;
    payload.reserve(cube.data.size() * 2);
    for (const auto& v : cube.data) {
        payload.push_back(static_cast<float>(v.real()));
        payload.push_back(static_cast<float>(v.imag()));
    }
    write_f32_payload(out, payload);
}

IqFile read_iq_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open capture file: " + path.string());
    const json header = read_header_line(in, path.string());
    if (header.value("kind", "") != "iq_capture") {
        throw ParseError("not an IQ capture file: " + path.string());
    }
    if (header.value("format_version", -1) != kFormatVersion) {
        throw ParseError("unsupported capture format version in " + path.string());
    }
    IqFile file;
    file.cube.config = radar_config_from_json(header.at("config"));
    file.scene_hash = header.value("scene_hash", "");
    const std::size_t n = static_cast<std::size_t>(file.cube.config.num_antennas) *
                          file.cube.config.num_samples;
    const auto payload = read_f32_payload(in, n * 2, path.string());
    file.cube.data.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        file.cube.data[i] = {payload[2 * i], payload[2 * i + 1]};
    }
    return file;
}

void write_mono_file(const MonocularDepthMap& map, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write depth map: " + path.string());
    const json header{{"format_version", kFormatVersion},
                      {"kind", "monocular_depth"},
                      {"width", map.width},
                      {"height", map.height},
                      {"sigma_abs_at_60m", map.params.sigma_abs_at_60m},
                      {"relative_noise_sigma", map.params.relative_noise_sigma}};
    out << header.dump() << '\n';
    std::vector<float> payload;
    payload.reserve(map.depth.size());
    for (double v : map.depth) payload.push_back(static_cast<float>(v));
    write_f32_payload(out, payload);
}

MonocularDepthMap read_mono_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open depth map: " + path.string());
    const json header = read_header_line(in, path.string());
    if (header.value("kind", "") != "monocular_depth") {
        throw ParseError("not a monocular depth file: " + path.string());
    }
    MonocularDepthMap map;
    map.width = header.at("width").get<int>();
    map.height = header.at("height").get<int>();
    if (map.width < 1 || map.height < 1) {
        throw ValidationError("depth map dimensions must be >= 1");
    }
    map.params.sigma_abs_at_60m = header.value("sigma_abs_at_60m", map.params.sigma_abs_at_60m);
    map.params.relative_noise_sigma =
        header.value("relative_noise_sigma", map.params.relative_noise_sigma);
    const std::size_t n = static_cast<std::size_t>(map.width) * map.height;
    const auto payload = read_f32_payload(in, n, path.string());
    map.depth.assign(payload.begin(), payload.end());
    return map;
}

void write_mask_file(const SegmentationMask& mask, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write mask file: " + path.string());
    const json j{{"object_id", mask.object_id},
                 {"class", std::string(to_string(mask.cls))},
                 {"confidence", mask.confidence},
                 {"columns", json::array({mask.col_min, mask.col_max})},
                 {"rows_per_column", mask.rows_per_column}};
    out << j.dump(2) << '\n';
}

SegmentationMask read_mask_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mask file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("malformed mask file " + path.string() + ": " + e.what());
    }
    SegmentationMask mask;
    mask.object_id = j.at("object_id").get<int>();
    mask.cls = object_class_from_string(j.at("class").get<std::string>());
    mask.confidence = j.at("confidence").get<double>();
    const auto& cols = j.at("columns");
    if (!cols.is_array() || cols.size() != 2) {
        throw ParseError("mask columns must be [min, max] in " + path.string());
    }
    mask.col_min = cols[0].get<int>();
    mask.col_max = cols[1].get<int>();
    mask.rows_per_column = j.at("rows_per_column").get<std::vector<int>>();
    if (mask.col_max < mask.col_min) {
        throw ValidationError("mask columns out of order in " + path.string());
    }
    if (static_cast<int>(mask.rows_per_column.size()) != mask.width()) {
        throw ValidationError("rows_per_column length does not match mask width in " +
                              path.string());
    }
    return mask;
}

json declutter_report_to_json(const DeclutterReport& report) {
    auto peak_json = [](const Peak& p) {
        return json{{"range_bin", p.range_bin},
                    {"azimuth_bin", p.azimuth_bin},
                    {"range_m", p.range},
                    {"azimuth_deg", rad2deg(p.azimuth)},
                    {"power", p.power}};
    };
    json removed = json::array();
    for (const auto& p : report.removed_peaks) removed.push_back(peak_json(p));
    json unresolved = json::array();
    for (const auto& p : report.unresolved_peaks) unresolved.push_back(peak_json(p));
    return json{{"iterations", report.iterations},
                {"converged", report.converged},
                {"residual_out_of_span_max", report.residual_out_of_span_max},
                {"out_of_span_max_history", report.out_of_span_max_history},
                {"removed_peaks", removed},
                {"unresolved_peaks", unresolved}};
}

void write_correlation_csv(const CorrelationCurve& curve, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write correlation CSV: " + path.string());
    out << "d_m,value\n";
    for (std::size_t i = 0; i < curve.d_grid.size(); ++i) {
        out << format_double(curve.d_grid[i]) << ',' << format_double(curve.values[i]) << '\n';
    }
}

void write_sparse_cloud_csv(const SparsePointCloud& cloud, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write point cloud CSV: " + path.string());
    out << "x_m,z_m,power\n";
    for (const auto& p : cloud.points) {
        out << format_double(p.x) << ',' << format_double(p.z) << ',' << format_double(p.power)
            << '\n';
    }
}

void write_dense_image_csv(const DenseDepthImage& image, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dense image CSV: " + path.string());
    out << "azimuth_deg,depth_m,source\n";
    for (const auto& e : image.entries) {
        out << format_double(rad2deg(e.azimuth)) << ',' << format_double(e.depth) << ','
            << (e.source == DepthSource::Radar ? "radar" : "mono-aligned") << '\n';
    }
}

void write_dense_points_csv(const DenseDepthImage& image, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dense point CSV: " + path.string());
    out << "x_m,z_m\n";
    for (const Vec2& p : image.to_points()) {
        out << format_double(p.x) << ',' << format_double(p.z) << '\n';
    }
}

}  // namespace specbeam
