#pragma once

#include <cstdint>
#include <vector>

#include "flatlab/graph.hpp"
#include "flatlab/metric.hpp"

namespace flatlab {

// Per-edge metric lengths for one (graph, field, quadrature) triple.
struct EdgeLengths {
    std::vector<double> len;
    std::uint64_t field_hash = 0;
    int quad_order = 4;
};

// Gauss quadrature of sqrt(disp^T g disp) along each edge segment.
EdgeLengths edge_lengths(const MeshGraph& g, const MetricField& field, int quad_order = 4);

// Length of one straight chart segment anchor + t*disp, t in [0,1].
double segment_length(const MetricField& field, Vec2 anchor, Vec2 disp, int quad_order = 4);

// max_e num.len[e] / den.len[e]; an upper bound for the ratio of the two
// graph distances over every node pair (paths are edge-concatenations).
double max_edge_ratio(const EdgeLengths& num, const EdgeLengths& den);

// Single-source shortest paths.
std::vector<double> dijkstra(const MeshGraph& g, const EdgeLengths& w, std::size_t source);

double graph_distance(const MeshGraph& g, const EdgeLengths& w, std::size_t a, std::size_t b);

// Farthest-point sampling: start at seed % n, then repeatedly take the node
// maximizing the distance to the chosen set (ties -> lowest id).
std::vector<std::size_t> farthest_point_sample(const MeshGraph& g, const EdgeLengths& w,
                                               int count, unsigned seed);

// Max eccentricity over `landmarks` farthest-point samples; a lower estimate
// of the true graph diameter that callers inflate by the mesh tolerance.
// landmarks >= 2: a single-landmark "diameter" is a radius and is rejected.
double diameter_estimate(const MeshGraph& g, const EdgeLengths& w, int landmarks = 8,
                         unsigned seed = 0);

// Graph-Voronoi partition induced by seed nodes: nearest seed by w-distance,
// ties -> lower seed index.
struct VoronoiAssign {
    std::vector<std::int32_t> owner;  // seed index per node
    std::vector<double> dist;         // distance to that seed
};
VoronoiAssign voronoi_partition(const MeshGraph& g, const EdgeLengths& w,
                                const std::vector<std::size_t>& seeds);

// Node-sampled Riemannian area: sum sqrt(det g) * dual cell area.
double total_volume(const ParamChart& chart, const MetricField& field);

// Same, restricted to nodes with mask[id] != 0.  mask.size() == n_nodes();
// an all-zero mask integrates nothing and returns 0.
double total_volume(const ParamChart& chart, const MetricField& field,
                    const std::vector<std::uint8_t>& mask);

// Metric length of the polyline through the given chart points, each straight
// segment integrated by Gauss quadrature.  Points are taken literally (no
// wrapping): callers express seam crossings with coordinates just outside the
// fundamental domain, which every analytic field evaluates periodically.
// Fewer than two points -> 0.
double curve_length(const MetricField& field, const std::vector<Vec2>& polyline,
                    int quad_order = 4);

// Grid node nearest to a chart point (pole vertices compete on polar angle
// alone: at a pole every azimuth is the same point).
std::size_t nearest_node(const ParamChart& chart, Vec2 p);

// Calibrated relative distance tolerance of the discretization: the worst
// landmark-pair error of the (resolution, stencil, quadrature) combination
// against the closed-form round unit sphere.  Memoized; resolution is the
// sphere chart's nu (nv = 2 nu).
double mesh_tolerance(int resolution, int stencil, int quad_order);

}  // namespace flatlab
