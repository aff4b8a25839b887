#include "specbeam/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "specbeam/errors.hpp"
#include "specbeam/serial.hpp"

namespace specbeam {

namespace {

using nlohmann::json;

void reject_unknown_fields(const json& j, std::initializer_list<const char*> allowed,
                           const char* where) {
    for (const auto& [key, _] : j.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&key](const char* a) { return key == a; }) == allowed.end()) {
            throw ParseError(std::string("unknown field \"") + key + "\" in " + where);
        }
    }
}

double require_number(const json& j, const char* field, const char* where) {
    if (!j.contains(field)) {
        throw ParseError(std::string("missing field \"") + field + "\" in " + where);
    }
    if (!j.at(field).is_number()) {
        throw ParseError(std::string("field \"") + field + "\" in " + where + " is not a number");
    }
    return j.at(field).get<double>();
}

Scatterer scatterer_from_json(const json& j, const char* where) {
    if (!j.is_object()) throw ParseError(std::string("scatterer in ") + where + " is not an object");
    reject_unknown_fields(j, {"x", "z", "reflectivity", "specularity"}, where);
    Scatterer s;
    s.x = require_number(j, "x", where);
    s.z = require_number(j, "z", where);
    s.reflectivity = require_number(j, "reflectivity", where);
    s.specularity = require_number(j, "specularity", where);
    return s;
}

json scatterer_to_json(const Scatterer& s) {
    return json{{"x", s.x}, {"z", s.z}, {"reflectivity", s.reflectivity},
                {"specularity", s.specularity}};
}

void validate_scatterer(const Scatterer& s, const std::string& where) {
    if (!(s.z > 0.0)) {
        throw ValidationError("z must be > 0 (" + where + ": z = " + format_double(s.z) + ")");
    }
    if (!(s.reflectivity >= 0.0)) {
        throw ValidationError("reflectivity must be >= 0 (" + where + ")");
    }
    if (!(s.specularity >= 0.0 && s.specularity <= 1.0)) {
        throw ValidationError("specularity must be in [0, 1] (" + where + ")");
    }
}

Scene scene_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("scene file root is not an object");
    reject_unknown_fields(j, {"noise_power", "objects", "clutter"}, "scene");
    Scene scene;
    scene.noise_power = require_number(j, "noise_power", "scene");
    if (!j.contains("objects") || !j.at("objects").is_array()) {
        throw ParseError("missing or non-array field \"objects\" in scene");
    }
    if (!j.contains("clutter") || !j.at("clutter").is_array()) {
        throw ParseError("missing or non-array field \"clutter\" in scene");
    }
    for (const auto& jo : j.at("objects")) {
        reject_unknown_fields(jo, {"id", "class", "orientation_deg", "is_occluder", "scatterers"},
                              "object");
        SceneObject obj;
        if (!jo.contains("id") || !jo.at("id").is_number_integer()) {
            throw ParseError("missing or non-integer field \"id\" in object");
        }
        obj.id = jo.at("id").get<int>();
        if (!jo.contains("class") || !jo.at("class").is_string()) {
            throw ParseError("missing or non-string field \"class\" in object");
        }
        obj.cls = object_class_from_string(jo.at("class").get<std::string>());
        obj.orientation = deg2rad(require_number(jo, "orientation_deg", "object"));
        if (!jo.contains("is_occluder") || !jo.at("is_occluder").is_boolean()) {
            throw ParseError("missing or non-boolean field \"is_occluder\" in object");
        }
        obj.is_occluder = jo.at("is_occluder").get<bool>();
        if (!jo.contains("scatterers") || !jo.at("scatterers").is_array()) {
            throw ParseError("missing or non-array field \"scatterers\" in object");
        }
        for (const auto& js : jo.at("scatterers")) {
            obj.scatterers.push_back(scatterer_from_json(js, "object scatterers"));
        }
        scene.objects.push_back(std::move(obj));
    }
    for (const auto& js : j.at("clutter")) {
        scene.clutter.push_back(scatterer_from_json(js, "clutter"));
    }
    scene.validate();
    return scene;
}

json scene_to_json(const Scene& scene) {
    json jobjects = json::array();
    for (const auto& obj : scene.objects) {
        json jsc = json::array();
        for (const auto& s : obj.scatterers) jsc.push_back(scatterer_to_json(s));
        jobjects.push_back(json{{"id", obj.id},
                                {"class", std::string(to_string(obj.cls))},
                                {"orientation_deg", rad2deg(obj.orientation)},
                                {"is_occluder", obj.is_occluder},
                                {"scatterers", std::move(jsc)}});
    }
    json jclutter = json::array();
    for (const auto& s : scene.clutter) jclutter.push_back(scatterer_to_json(s));
    return json{{"noise_power", scene.noise_power},
                {"objects", std::move(jobjects)},
                {"clutter", std::move(jclutter)}};
}

}  // namespace

std::string_view to_string(ObjectClass cls) {
    switch (cls) {
        case ObjectClass::Car: return "Car";
        case ObjectClass::Person: return "Person";
        case ObjectClass::Sign: return "Sign";
        case ObjectClass::Unknown: return "Unknown";
    }
    return "Unknown";
}

ObjectClass object_class_from_string(std::string_view name) {
    if (name == "Car") return ObjectClass::Car;
    if (name == "Person") return ObjectClass::Person;
    if (name == "Sign") return ObjectClass::Sign;
    if (name == "Unknown") return ObjectClass::Unknown;
    throw ParseError("unknown object class \"" + std::string(name) + "\"");
}

Vec2 SceneObject::centroid() const {
    Vec2 c{};
    for (const auto& s : scatterers) {
        c.x += s.x;
        c.z += s.z;
    }
    const double n = static_cast<double>(scatterers.size());
    return {c.x / n, c.z / n};
}

std::pair<double, double> SceneObject::range_span() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& s : scatterers) {
        const double r = std::hypot(s.x, s.z);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return {lo, hi};
}

const SceneObject& Scene::object_by_id(int id) const {
    for (const auto& obj : objects) {
        if (obj.id == id) return obj;
    }
    throw ValidationError("unknown object id " + std::to_string(id));
}

void Scene::validate() const {
    if (!(noise_power >= 0.0)) throw ValidationError("noise_power must be >= 0");
    std::set<int> ids;
    for (const auto& obj : objects) {
        const std::string where = "object id " + std::to_string(obj.id);
        if (!ids.insert(obj.id).second) {
            throw ValidationError("duplicate object id " + std::to_string(obj.id));
        }
        if (obj.scatterers.empty()) {
            throw ValidationError(where + " has an empty scatterer list");
        }
        for (std::size_t i = 0; i < obj.scatterers.size(); ++i) {
            validate_scatterer(obj.scatterers[i], where + " scatterer " + std::to_string(i));
        }
    }
    for (std::size_t i = 0; i < clutter.size(); ++i) {
        validate_scatterer(clutter[i], "clutter scatterer " + std::to_string(i));
    }
}

Scene load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scene file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("malformed scene file " + path.string() + ": " + e.what());
    }
    return scene_from_json(j);
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write scene file: " + path.string());
    out << scene_to_json(scene).dump(2) << '\n';
}

std::string scene_hash(const Scene& scene) {
    return fnv1a64_hex(scene_to_json(scene).dump());
}

double effective_reflectivity(const Scatterer& s, double object_orientation,
                              double view_angle, double lobe_exponent) {
    if (s.specularity <= 0.0) return s.reflectivity;
    const double c = std::max(0.0, std::cos(object_orientation - view_angle));
    return s.reflectivity *
           ((1.0 - s.specularity) + s.specularity * std::pow(c, lobe_exponent));
}

std::vector<TruthContourPoint> ground_truth_contour(const Scene& scene, int id,
                                                    std::span<const double> azimuth_grid) {
    const SceneObject& obj = scene.object_by_id(id);
    if (azimuth_grid.empty()) return {};
    std::vector<double> best(azimuth_grid.size(), std::numeric_limits<double>::infinity());
    for (const auto& s : obj.scatterers) {
        const double az = std::atan2(s.x, s.z);
        const double r = std::hypot(s.x, s.z);
        // nearest grid point = bin the scatterer falls in
        std::size_t j = 0;
        double dmin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < azimuth_grid.size(); ++i) {
            const double d = std::abs(azimuth_grid[i] - az);
            if (d < dmin) {
                dmin = d;
                j = i;
            }
        }
        best[j] = std::min(best[j], r);
    }
    std::vector<TruthContourPoint> out;
    for (std::size_t i = 0; i < azimuth_grid.size(); ++i) {
        if (std::isfinite(best[i])) out.push_back({azimuth_grid[i], best[i]});
    }
    return out;
}

}  // namespace specbeam
