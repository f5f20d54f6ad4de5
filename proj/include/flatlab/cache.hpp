#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flatlab/geodesy.hpp"

namespace flatlab {

// Content-addressed store for double vectors (distance rows).  Files are
// written to a temp name and renamed into place, so a cache directory shared
// between concurrent runs never exposes a partial entry.  An entry is only a
// hit when its embedded descriptor matches byte-for-byte; a hash collision or
// truncated file degrades to a miss.
class DistanceCache {
public:
    DistanceCache() = default;  // disabled
    explicit DistanceCache(std::filesystem::path dir);

    bool enabled() const { return !dir_.empty(); }
    std::optional<std::vector<double>> load(const std::string& descriptor) const;
    void store(const std::string& descriptor, const std::vector<double>& data) const;

private:
    std::filesystem::path dir_;
};

// Dijkstra through the cache: key = (graph, field, quadrature, source).
std::vector<double> cached_dijkstra(const MeshGraph& g, const EdgeLengths& w, std::size_t source,
                                    const DistanceCache& cache);

}  // namespace flatlab
