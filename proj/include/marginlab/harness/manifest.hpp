#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace marginlab {

// SHA-1 of "blob <size>\0<content>", as git hashes file contents.
std::string git_blob_hash(const std::string& content);

struct ManifestEntry {
    std::string file;  // relative to the output directory
    std::string hash;
};

// Record of one run. The run id is derived from the inputs only (command,
// seed, resolved config), so identical inputs give identical manifests.
struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    std::string config_snapshot;
    std::vector<ManifestEntry> outputs;

    std::string input_hash() const;
    std::string run_id() const;  // first 12 hex digits of input_hash()
    std::string to_string() const;
};

// Writes `content` to dir/file and records its hash in the manifest.
void write_output(RunManifest& manifest, const std::filesystem::path& dir, const std::string& file,
                  const std::string& content);

// Writes dir/config.resolved and dir/manifest.txt.
void finalize_manifest(const RunManifest& manifest, const std::filesystem::path& dir);

}  // namespace marginlab
