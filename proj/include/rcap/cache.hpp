#ifndef RCAP_CACHE_HPP
#define RCAP_CACHE_HPP

#include <filesystem>
#include <optional>
#include <string>

#include "rcap/report.hpp"

namespace rcap {

inline constexpr char const * kCacheEnv = "RCAP_CACHE_DIR";

/* Content-addressed JSON store: the key document is hashed (SHA-256 of its
 * canonical text) and the value lives in <dir>/<h[0:2]>/<h>.json. Writes go
 * to a temporary file first and are renamed into place. */
class ResultCache
{
    std::filesystem::path dir_;

    public:

    ResultCache() = default;
    explicit ResultCache(std::filesystem::path dir) : dir_(std::move(dir)) {}
    /// Flag value if non-empty, else the environment variable, else disabled.
    static ResultCache resolve(std::string const & flag);

    bool enabled() const { return !dir_.empty(); }
    std::filesystem::path const & dir() const { return dir_; }
    std::filesystem::path path_of(json const & key) const;

    std::optional<json> get(json const & key) const;
    void put(json const & key, json const & value) const;
};

} // namespace rcap

#endif
