#pragma once

// Content-addressed render cache on the local filesystem.
//
// Layout: <dir>/<k0k1>/<k2k3>/<key>, one file per entry holding the
// serialized MathML. The key is the SHA-256 of the formula, the options
// fingerprint and the registry version. Writes go to a temporary file in
// <dir> and are renamed into place.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include <openssl/evp.h>

namespace texmath {

inline std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

class RenderCache {
public:
    struct Stats {
        std::size_t entries = 0;
        std::uintmax_t bytes = 0;
    };

    explicit RenderCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    const std::filesystem::path& dir() const { return dir_; }

    /// TEXMATHC_CACHE_DIR, else $XDG_CACHE_HOME/texmathc, else
    /// $HOME/.cache/texmathc, else ./.texmathc-cache.
    static std::filesystem::path default_dir() {
        if (const char* d = std::getenv("TEXMATHC_CACHE_DIR"); d && *d) return d;
        if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return std::filesystem::path(x) / "texmathc";
        if (const char* h = std::getenv("HOME"); h && *h) return std::filesystem::path(h) / ".cache" / "texmathc";
        return ".texmathc-cache";
    }

    /// Fields are length-prefixed so that no two inputs share a preimage.
    static std::string key(std::string_view formula, std::string_view fingerprint, std::string_view registry_version) {
        std::string buf;
        for (auto part : {registry_version, fingerprint, formula}) {
            buf += std::to_string(part.size());
            buf += ':';
            buf += part;
        }
        return sha256_hex(buf);
    }

    std::filesystem::path entry_path(const std::string& key) const {
        return dir_ / key.substr(0, 2) / key.substr(2, 2) / key;
    }

    std::optional<std::string> get(const std::string& key) const {
        std::ifstream in(entry_path(key), std::ios::binary);
        if (!in) return std::nullopt;
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void put(const std::string& key, std::string_view value) const {
        auto target = entry_path(key);
        std::filesystem::create_directories(target.parent_path());
        auto tmp = dir_ / (".tmp-" + random_suffix());
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw std::filesystem::filesystem_error("cannot write cache entry", tmp,
                                                              std::make_error_code(std::errc::permission_denied));
            out.write(value.data(), static_cast<std::streamsize>(value.size()));
            out.close();
            if (!out) {
                std::error_code ec;
                std::filesystem::remove(tmp, ec);
                throw std::filesystem::filesystem_error("cannot write cache entry", tmp,
                                                        std::make_error_code(std::errc::io_error));
            }
        }
        std::filesystem::rename(tmp, target);
    }

    Stats stats() const {
        Stats s;
        if (!std::filesystem::exists(dir_)) return s;
        for (const auto& e : std::filesystem::recursive_directory_iterator(dir_)) {
            if (!e.is_regular_file() || e.path().filename().string().rfind(".tmp-", 0) == 0) continue;
            ++s.entries;
            s.bytes += e.file_size();
        }
        return s;
    }

    /// Detaches the directory with one rename, then deletes it. Returns the
    /// number of entries removed.
    std::size_t purge() const {
        if (!std::filesystem::exists(dir_)) return 0;
        std::size_t n = stats().entries;
        auto doomed = dir_;
        doomed += ".purge-" + random_suffix();
        std::filesystem::rename(dir_, doomed);
        std::filesystem::remove_all(doomed);
        return n;
    }

private:
    std::filesystem::path dir_;

    static std::string random_suffix() {
        std::random_device rd;
        std::uniform_int_distribution<std::uint64_t> dist;
        std::ostringstream ss;
        ss << std::hex << dist(rd);
        return ss.str();
    }
};

}  // namespace texmath
