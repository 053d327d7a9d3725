#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ioncavity {

// Reproducibility record attached to every CLI output file so a run can
// be repeated exactly. Written as a JSON sidecar `<output>.manifest.json`;
// the wall-clock timestamp lives only here, keeping the data files
// byte-identical across reruns with the same inputs.
struct RunManifest {
    std::string command;
    std::string config_path;  // empty when no config file was given
    std::string output_path;
    std::optional<uint64_t> seed;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::string tool_version;

    RunManifest();
};

// Serialises the manifest (plus a created_utc timestamp) next to
// `data_path`. Returns the sidecar path.
std::string write_manifest_sidecar(const RunManifest& manifest,
                                   const std::string& data_path);

} // namespace ioncavity
