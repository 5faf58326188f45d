#include "rcap/cache.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

namespace rcap {

namespace fs = std::filesystem;

ResultCache ResultCache::resolve(std::string const & flag)
{
    if (!flag.empty())
        return ResultCache(flag);
    if (char const * env = std::getenv(kCacheEnv); env && *env)
        return ResultCache(env);
    return ResultCache();
}

fs::path ResultCache::path_of(json const & key) const
{
    std::string h = sha256_hex(canonical(envelope("cache-key", json{{"key", key}})));
    return dir_ / h.substr(0, 2) / (h + ".json");
}

std::optional<json> ResultCache::get(json const & key) const
{
    if (!enabled())
        return std::nullopt;
    fs::path p = path_of(key);
    std::ifstream in(p);
    if (!in)
        return std::nullopt;
    try {
        json doc = json::parse(in);
        /* a hash collision or a foreign file is treated as a miss */
        if (doc.value("schema", "") != kSchema || doc.at("key") != key)
            return std::nullopt;
        return doc.at("value");
    } catch (json::exception const &) {
        return std::nullopt;
    }
}

void ResultCache::put(json const & key, json const & value) const
{
    if (!enabled())
        return;
    fs::path p = path_of(key);
    fs::create_directories(p.parent_path());
    std::ostringstream suffix;
    suffix << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "." << std::random_device{}();
    fs::path tmp = p;
    tmp += suffix.str();
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write cache file " + tmp.string());
        out << canonical(envelope("cache-entry", json{{"key", key}, {"value", value}})) << '\n';
        if (!out)
            throw std::runtime_error("short write to cache file " + tmp.string());
    }
    fs::rename(tmp, p);
}

} // namespace rcap
