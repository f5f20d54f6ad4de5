#include "flatlab/cache.hpp"

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace flatlab {

namespace {

constexpr char kMagic[8] = {'F', 'L', 'C', 'A', 'C', 'H', 'E', '1'};

}  // namespace

DistanceCache::DistanceCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::optional<std::vector<double>> DistanceCache::load(const std::string& descriptor) const {
    if (!enabled()) return std::nullopt;
    const std::filesystem::path file = dir_ / (hex64(fnv1a64(descriptor)) + ".flc");
    std::ifstream in(file, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) return std::nullopt;
    std::uint32_t dlen = 0;
    if (!in.read(reinterpret_cast<char*>(&dlen), sizeof dlen)) return std::nullopt;
    std::string desc(dlen, '\0');
    if (!in.read(desc.data(), dlen) || desc != descriptor) return std::nullopt;
    std::uint64_t count = 0;
    if (!in.read(reinterpret_cast<char*>(&count), sizeof count)) return std::nullopt;
    std::vector<double> data(count);
    if (!in.read(reinterpret_cast<char*>(data.data()),
                 static_cast<std::streamsize>(count * sizeof(double)))) {
        return std::nullopt;
    }
    return data;
}

void DistanceCache::store(const std::string& descriptor, const std::vector<double>& data) const {
    if (!enabled()) return;
    static std::atomic<unsigned> counter{0};
    const std::string name = hex64(fnv1a64(descriptor));
    const std::filesystem::path tmp =
        dir_ / (name + ".tmp" + std::to_string(static_cast<long long>(::getpid())) + "." +
                std::to_string(counter.fetch_add(1)));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cache: cannot write " + tmp.string());
        out.write(kMagic, 8);
        const auto dlen = static_cast<std::uint32_t>(descriptor.size());
        out.write(reinterpret_cast<const char*>(&dlen), sizeof dlen);
        out.write(descriptor.data(), static_cast<std::streamsize>(descriptor.size()));
        const auto count = static_cast<std::uint64_t>(data.size());
        out.write(reinterpret_cast<const char*>(&count), sizeof count);
        out.write(reinterpret_cast<const char*>(data.data()),
                  static_cast<std::streamsize>(data.size() * sizeof(double)));
        if (!out) throw std::runtime_error("cache: short write " + tmp.string());
    }
    std::filesystem::rename(tmp, dir_ / (name + ".flc"));
}

std::vector<double> cached_dijkstra(const MeshGraph& g, const EdgeLengths& w, std::size_t source,
                                    const DistanceCache& cache) {
    if (!cache.enabled()) return dijkstra(g, w, source);
    const std::string desc = nlohmann::json{{"field", hex64(w.field_hash)},
                                            {"graph", hex64(g.content_hash())},
                                            {"quad", w.quad_order},
                                            {"source", source}}
                                 .dump();
    if (auto hit = cache.load(desc)) {
        if (hit->size() == g.n_nodes()) return std::move(*hit);
    }
    std::vector<double> rows = dijkstra(g, w, source);
    cache.store(desc, rows);
    return rows;
}

}  // namespace flatlab
