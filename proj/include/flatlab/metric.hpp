#pragma once

#include <memory>
#include <string>
#include <vector>

#include "flatlab/chart.hpp"
#include "flatlab/util.hpp"

namespace flatlab {

// Radial profile f(u), used as conformal factor or torus warp.  All profiles
// are C^1 (smoothstep ramps) so 4-point Gauss quadrature along edges is
// effectively exact for the integrands they produce.
struct Profile {
    enum class Kind { Constant, Cinch, DyadicSpikes, Bump };
    Kind kind = Kind::Constant;
    double value = 1.0;   // Constant
    int level = 1;        // Cinch, DyadicSpikes: family index j >= 1
    double floor = 0.2;   // Cinch, DyadicSpikes: relative value at the pinch
    double height = 1.0;  // DyadicSpikes: plateau value away from spikes
    double amp = 0.0;     // Bump
    double width = 1.0;   // Bump half-width, Cinch uses 1/level
    double center = 0.0;  // Bump center

    // Cinch: dips from 1 to `floor` at u = pi/2 over half-width 1/level.
    // DyadicSpikes: height*floor at the 2^level dyadic angles, `height` away
    //   from them, ramp half-width 4^-level (periodic in u).
    // Bump: 1 + amp*(1 - (d/width)^2)^2 for |u - center| < width, else 1.
    double eval(double u) const;
    std::string tag() const;
};

Profile profile_constant(double value);
Profile profile_cinch(int level, double floor_value);
Profile profile_dyadic_spikes(int level, double floor_value, double height);
Profile profile_bump(double amp, double width, double center);

// A smooth metric tensor field over chart coordinates.  Implementations wrap
// periodic coordinates themselves, so edge segments may be evaluated on the
// covering plane.
class MetricField {
public:
    virtual ~MetricField() = default;
    virtual Mat2 eval(Vec2 p) const = 0;
    // Canonical JSON (sorted keys); the field's cache identity.
    virtual std::string descriptor() const = 0;
    std::uint64_t content_hash() const { return fnv1a64(descriptor()); }
};

using FieldPtr = std::shared_ptr<const MetricField>;

// Round sphere of the given radius: diag(R^2, R^2 sin^2 u).
FieldPtr make_round_sphere(double radius);

// f(u)^2 * base.
FieldPtr make_conformal(FieldPtr base, Profile f);

// diag(1, f(u)^2) on the flat torus chart.
FieldPtr make_warped_torus(Profile f);

// Uniform scalar multiple s * base, s > 0.
FieldPtr make_scaled(FieldPtr base, double factor);

// Unit round sphere with disjoint radial wells: at well center q of radius
// rho and depth parameter R, the metric gains (a(s)^2 - 1) ds (x) ds where s
// is the spherical distance to q and
//   a(s) = 1 + (R/rho) * (15/8) * (1 - (s/rho)^2)^2   for s < rho, else 1.
// a is C^1 at the rim and integrates to int_0^rho (a-1) ds = R exactly, so a
// radial crossing of a well is longer than the round one by exactly 2R.
FieldPtr make_well_sphere(const std::vector<Vec2>& centers, double rho, double R);

// Default well layout for the j-well family: first well at the north pole,
// last at the south pole, interior wells on a golden-angle spiral.
std::vector<Vec2> default_well_centers(int j);

// Tensor given on its own uniform lattice over the chart domain, bilinearly
// interpolated (convex combinations preserve SPD).  Sphere: (nu+1) x nv
// lattice rows u=0..pi inclusive, v periodic; torus: nu x nv, both periodic.
FieldPtr make_grid_tensor(ChartKind domain, int nu, int nv, std::vector<Mat2> values);

}  // namespace flatlab
