#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace flatlab {

// Exit-code convention: 0 ok, 2 infeasible, 3 invariant violation, 4 bad config.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Vec2 {
    double u = 0.0;
    double v = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.u + b.u, a.v + b.v}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.u - b.u, a.v - b.v}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.u, s * a.v}; }

// Symmetric 2x2 tensor.  All metric tensors in the lab are SPD at evaluation
// points; the quadratic-form helpers assume nothing beyond symmetry.
struct Mat2 {
    double xx = 1.0;
    double xy = 0.0;
    double yy = 1.0;

    double det() const { return xx * yy - xy * xy; }
    double trace() const { return xx + yy; }
    bool spd() const { return xx > 0.0 && det() > 0.0; }

    // v^T M v
    double quad(Vec2 d) const { return xx * d.u * d.u + 2.0 * xy * d.u * d.v + yy * d.v * d.v; }

    Mat2 inverse() const {
        const double dt = det();
        if (dt == 0.0) throw std::invalid_argument("Mat2::inverse: singular");
        return {yy / dt, -xy / dt, xx / dt};
    }
};

inline Mat2 operator+(Mat2 a, Mat2 b) { return {a.xx + b.xx, a.xy + b.xy, a.yy + b.yy}; }
inline Mat2 operator-(Mat2 a, Mat2 b) { return {a.xx - b.xx, a.xy - b.xy, a.yy - b.yy}; }
inline Mat2 operator*(double s, Mat2 a) { return {s * a.xx, s * a.xy, s * a.yy}; }

// Eigenvalues of the pencil (A, B): the two roots lambda of det(B - lambda A) = 0
// with A SPD.  These are the eigenvalues of A^{-1}B, real because the pencil is
// symmetric-definite.  Returned ascending.  Computed by Cholesky congruence
// C = L^{-1} B L^{-T} and the hypot form of the symmetric gap, which avoids the
// catastrophic tr^2 - 4 det cancellation of the characteristic quadratic when
// the two eigenvalues nearly coincide (B close to a multiple of A), keeping
// absolute eigenvalue error near machine precision there.
inline std::array<double, 2> pencil_eigs(const Mat2& a, const Mat2& b) {
    if (!a.spd()) throw std::invalid_argument("pencil_eigs: base tensor not SPD");
    const double l11 = std::sqrt(a.xx);
    const double l21 = a.xy / l11;
    const double l22 = std::sqrt(a.yy - l21 * l21);  // = sqrt(det a / a.xx) > 0
    const double y11 = b.xx / l11;
    const double y12 = b.xy / l11;
    const double y21 = (b.xy - l21 * y11) / l22;
    const double y22 = (b.yy - l21 * y12) / l22;
    const double c11 = y11 / l11;
    const double c12 = y21 / l11;
    const double c22 = (y22 - l21 * y21 / l11) / l22;
    const double mean = 0.5 * (c11 + c22);
    const double gap = 0.5 * std::hypot(c11 - c22, 2.0 * c12);
    return {mean - gap, mean + gap};
}

// FNV-1a, 64-bit.  Used for content-addressed cache keys; stability across
// runs and platforms matters, speed does not.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

// Shortest-round-trip double formatting, for byte-stable CSV output.
inline std::string fmt_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
}

struct GaussPoint {
    double t;  // node in [0,1]
    double w;  // weight, sums to 1
};

// Gauss-Legendre rules mapped to [0,1].  q=4 integrates degree-7 polynomials
// exactly, which covers every closed-form profile used by the metric families.
inline const std::vector<GaussPoint>& gauss_rule(int q) {
    static const std::vector<GaussPoint> g1 = {{0.5, 1.0}};
    static const std::vector<GaussPoint> g2 = {
        {0.21132486540518713, 0.5},
        {0.78867513459481287, 0.5},
    };
    static const std::vector<GaussPoint> g4 = {
        {0.069431844202973714, 0.17392742256872692},
        {0.33000947820757187, 0.32607257743127305},
        {0.66999052179242813, 0.32607257743127305},
        {0.93056815579702623, 0.17392742256872692},
    };
    switch (q) {
        case 1: return g1;
        case 2: return g2;
        case 4: return g4;
        default: throw std::invalid_argument("gauss_rule: q must be 1, 2 or 4");
    }
}

inline double smoothstep01(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * (3.0 - 2.0 * x);
}

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 6.28318530717958647692;

// Wrap into [-pi, pi).
inline double wrap_pi(double x) {
    double y = std::fmod(x + kPi, kTwoPi);
    if (y < 0.0) y += kTwoPi;
    return y - kPi;
}

// Circle distance between angles, in [0, pi].
inline double circle_dist(double a, double b) { return std::fabs(wrap_pi(a - b)); }

}  // namespace flatlab
