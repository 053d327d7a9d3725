#include "ioncavity/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "ioncavity/errors.hpp"
#include "ioncavity/version.hpp"

namespace ioncavity {

namespace {

std::string utc_now() {
    const std::time_t now =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buffer;
}

} // namespace

RunManifest::RunManifest() : tool_version(kVersion) {}

std::string write_manifest_sidecar(const RunManifest& manifest,
                                   const std::string& data_path) {
    nlohmann::ordered_json doc;
    doc["tool"] = "ioncavity";
    doc["tool_version"] = manifest.tool_version;
    doc["command"] = manifest.command;
    doc["config_path"] = manifest.config_path;
    doc["output_path"] = manifest.output_path;
    if (manifest.seed) {
        doc["seed"] = *manifest.seed;
    }
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [key, value] : manifest.parameters) {
        params[key] = value;
    }
    doc["parameters"] = params;
    doc["created_utc"] = utc_now();

    const std::string sidecar_path = data_path + ".manifest.json";
    std::ofstream out(sidecar_path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot open '" + sidecar_path + "' for writing");
    }
    out << doc.dump(2) << '\n';
    return sidecar_path;
}

} // namespace ioncavity
