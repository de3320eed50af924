#include "marginlab/harness/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <stdexcept>

namespace marginlab {

namespace {

std::string sha1_hex(const std::string& data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha1(), nullptr) != 1)
        throw std::runtime_error("SHA-1 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::string git_blob_hash(const std::string& content) {
    std::string blob = "blob " + std::to_string(content.size());
    blob.push_back('\0');
    blob += content;
    return sha1_hex(blob);
}

std::string RunManifest::input_hash() const {
    return git_blob_hash("command=" + command + "\nseed=" + std::to_string(seed) + "\n" + config_snapshot);
}

std::string RunManifest::run_id() const { return input_hash().substr(0, 12); }

std::string RunManifest::to_string() const {
    std::string out;
    out += "run_id=" + run_id() + "\n";
    out += "command=" + command + "\n";
    out += "seed=" + std::to_string(seed) + "\n";
    out += "config=config.resolved " + git_blob_hash(config_snapshot) + "\n";
    out += "input_hash=" + input_hash() + "\n";
    for (const auto& e : outputs) out += "output=" + e.file + " " + e.hash + "\n";
    return out;
}

void write_output(RunManifest& manifest, const std::filesystem::path& dir, const std::string& file,
                  const std::string& content) {
    write_file(dir / file, content);
    manifest.outputs.push_back({file, git_blob_hash(content)});
}

void finalize_manifest(const RunManifest& manifest, const std::filesystem::path& dir) {
    write_file(dir / "config.resolved", manifest.config_snapshot);
    write_file(dir / "manifest.txt", manifest.to_string());
}

}  // namespace marginlab
