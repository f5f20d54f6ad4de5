#include "flatlab/metric.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace flatlab {

namespace {

using nlohmann::json;

json profile_json(const Profile& p) {
    switch (p.kind) {
        case Profile::Kind::Constant:
            return {{"kind", "constant"}, {"value", p.value}};
        case Profile::Kind::Cinch:
            return {{"floor", p.floor}, {"kind", "cinch"}, {"level", p.level}};
        case Profile::Kind::DyadicSpikes:
            return {{"floor", p.floor}, {"height", p.height}, {"kind", "dyadic"},
                    {"level", p.level}};
        case Profile::Kind::Bump:
            return {{"amp", p.amp}, {"center", p.center}, {"kind", "bump"}, {"width", p.width}};
    }
    throw std::invalid_argument("profile kind");
}

}  // namespace

double Profile::eval(double u) const {
    switch (kind) {
        case Kind::Constant:
            return value;
        case Kind::Cinch: {
            const double x = std::fabs(u - 0.5 * kPi) * level;
            if (x >= 1.0) return 1.0;
            return floor + (1.0 - floor) * smoothstep01(x);
        }
        case Kind::DyadicSpikes: {
            // 2^level spike centers, ramp half-width 4^-level.
            const double n = std::pow(2.0, level);
            const double spacing = kTwoPi / n;
            const double rel = (wrap_pi(u) + kPi) / spacing;
            const double d = std::fabs(rel - std::round(rel)) * spacing;
            const double x = d * std::pow(4.0, level);
            return height * (floor + (1.0 - floor) * smoothstep01(std::min(x, 1.0)));
        }
        case Kind::Bump: {
            const double x = std::fabs(u - center) / width;
            if (x >= 1.0) return 1.0;
            const double y = 1.0 - x * x;
            return 1.0 + amp * y * y;
        }
    }
    throw std::invalid_argument("profile kind");
}

std::string Profile::tag() const { return profile_json(*this).dump(); }

Profile profile_constant(double value) {
    if (value <= 0.0) throw std::invalid_argument("profile value must be positive");
    Profile p;
    p.kind = Profile::Kind::Constant;
    p.value = value;
    return p;
}

Profile profile_cinch(int level, double floor_value) {
    if (level < 1) throw std::invalid_argument("cinch level must be >= 1");
    if (floor_value <= 0.0 || floor_value > 1.0)
        throw std::invalid_argument("cinch floor must be in (0,1]");
    Profile p;
    p.kind = Profile::Kind::Cinch;
    p.level = level;
    p.floor = floor_value;
    return p;
}

Profile profile_dyadic_spikes(int level, double floor_value, double height) {
    if (level < 1 || level > 12) throw std::invalid_argument("spike level must be in [1,12]");
    if (floor_value <= 0.0 || floor_value > 1.0)
        throw std::invalid_argument("spike floor must be in (0,1]");
    if (height <= 0.0) throw std::invalid_argument("spike height must be positive");
    Profile p;
    p.kind = Profile::Kind::DyadicSpikes;
    p.level = level;
    p.floor = floor_value;
    p.height = height;
    return p;
}

Profile profile_bump(double amp, double width, double center) {
    if (amp < 0.0) throw std::invalid_argument("bump amplitude must be >= 0");
    if (width <= 0.0) throw std::invalid_argument("bump width must be positive");
    Profile p;
    p.kind = Profile::Kind::Bump;
    p.amp = amp;
    p.width = width;
    p.center = center;
    return p;
}

namespace {

class RoundSphereField final : public MetricField {
public:
    explicit RoundSphereField(double radius) : r2_(radius * radius) {
        if (radius <= 0.0) throw std::invalid_argument("sphere radius must be positive");
        radius_ = radius;
    }
    Mat2 eval(Vec2 p) const override {
        const double s = std::sin(p.u);
        return {r2_, 0.0, r2_ * s * s};
    }
    std::string descriptor() const override {
        return json{{"family", "round_sphere"}, {"radius", radius_}}.dump();
    }

private:
    double radius_, r2_;
};

class ConformalField final : public MetricField {
public:
    ConformalField(FieldPtr base, Profile f) : base_(std::move(base)), f_(f) {
        if (!base_) throw std::invalid_argument("conformal base is null");
    }
    Mat2 eval(Vec2 p) const override {
        const double f = f_.eval(p.u);
        return (f * f) * base_->eval(p);
    }
    std::string descriptor() const override {
        return json{{"base", json::parse(base_->descriptor())},
                    {"family", "conformal"},
                    {"profile", json::parse(f_.tag())}}
            .dump();
    }

private:
    FieldPtr base_;
    Profile f_;
};

class WarpedTorusField final : public MetricField {
public:
    explicit WarpedTorusField(Profile f) : f_(f) {}
    Mat2 eval(Vec2 p) const override {
        const double f = f_.eval(wrap_pi(p.u));
        return {1.0, 0.0, f * f};
    }
    std::string descriptor() const override {
        return json{{"family", "warped_torus"}, {"profile", json::parse(f_.tag())}}.dump();
    }

private:
    Profile f_;
};

class ScaledField final : public MetricField {
public:
    ScaledField(FieldPtr base, double factor) : base_(std::move(base)), factor_(factor) {
        if (!base_) throw std::invalid_argument("scaled base is null");
        if (factor <= 0.0) throw std::invalid_argument("scale factor must be positive");
    }
    Mat2 eval(Vec2 p) const override { return factor_ * base_->eval(p); }
    std::string descriptor() const override {
        return json{{"base", json::parse(base_->descriptor())},
                    {"factor", factor_},
                    {"family", "scaled"}}
            .dump();
    }

private:
    FieldPtr base_;
    double factor_;
};

class WellSphereField final : public MetricField {
public:
    WellSphereField(std::vector<Vec2> centers, double rho, double R)
        : centers_(std::move(centers)), rho_(rho), big_r_(R) {
        if (centers_.empty()) throw std::invalid_argument("well field needs at least one center");
        if (rho <= 0.0 || rho >= 0.5 * kPi)
            throw std::invalid_argument("well radius must be in (0, pi/2)");
        if (R <= 0.0) throw std::invalid_argument("well depth must be positive");
        for (Vec2& c : centers_) {
            if (c.u < 0.0 || c.u > kPi)
                throw std::invalid_argument("well center polar angle out of [0,pi]");
            c.v = wrap_pi(c.v);
        }
        // Radial exactness (a well crossed through its center costs +2R)
        // needs the wells pairwise disjoint.
        for (std::size_t i = 0; i < centers_.size(); ++i) {
            for (std::size_t j = i + 1; j < centers_.size(); ++j) {
                if (sphere_dist(centers_[i], centers_[j]) < 2.0 * rho) {
                    throw std::invalid_argument("well supports overlap");
                }
            }
        }
    }

    Mat2 eval(Vec2 p) const override {
        const double su = std::sin(p.u);
        Mat2 g{1.0, 0.0, su * su};
        const double cu = std::cos(p.u);
        for (const Vec2& q : centers_) {
            const double suc = std::sin(q.u);
            const double cuc = std::cos(q.u);
            const double dv = p.v - q.v;
            const double c = cu * cuc + su * suc * std::cos(dv);
            const double s = std::acos(std::clamp(c, -1.0, 1.0));
            if (s >= rho_) continue;
            const double sin_s = std::sqrt(std::max(1.0 - c * c, 0.0));
            if (sin_s < 1e-12) continue;  // gradient direction degenerates at the center point
            const double dcu = -su * cuc + cu * suc * std::cos(dv);
            const double dcv = -su * suc * std::sin(dv);
            const double gsu = -dcu / sin_s;  // ds/du
            const double gsv = -dcv / sin_s;  // ds/dv
            const double a = well_a(s);
            const double k = a * a - 1.0;
            g.xx += k * gsu * gsu;
            g.xy += k * gsu * gsv;
            g.yy += k * gsv * gsv;
        }
        return g;
    }

    std::string descriptor() const override {
        json cs = json::array();
        for (const Vec2& c : centers_) cs.push_back({c.u, c.v});
        return json{{"R", big_r_}, {"centers", cs}, {"family", "well_sphere"}, {"rho", rho_}}
            .dump();
    }

private:
    static double sphere_dist(Vec2 a, Vec2 b) {
        const double c = std::cos(a.u) * std::cos(b.u) +
                         std::sin(a.u) * std::sin(b.u) * std::cos(a.v - b.v);
        return std::acos(std::clamp(c, -1.0, 1.0));
    }
    double well_a(double s) const {
        const double x = s / rho_;
        const double y = 1.0 - x * x;
        return 1.0 + (big_r_ / rho_) * 1.875 * y * y;
    }

    std::vector<Vec2> centers_;
    double rho_, big_r_;
};

class GridTensorField final : public MetricField {
public:
    GridTensorField(ChartKind domain, int nu, int nv, std::vector<Mat2> values)
        : domain_(domain), nu_(nu), nv_(nv), values_(std::move(values)) {
        if (nu < 2 || nv < 2) throw std::invalid_argument("tensor lattice too coarse");
        const std::size_t want = domain == ChartKind::Sphere
                                     ? static_cast<std::size_t>(nu + 1) * nv
                                     : static_cast<std::size_t>(nu) * nv;
        if (values_.size() != want) throw std::invalid_argument("tensor lattice size mismatch");
        for (const Mat2& m : values_) {
            if (!m.spd()) throw std::invalid_argument("tensor lattice value not SPD");
        }
    }

    Mat2 eval(Vec2 p) const override {
        double fu;
        int iu0, iu1;
        if (domain_ == ChartKind::Sphere) {
            const double x = std::clamp(p.u, 0.0, kPi) / kPi * nu_;
            iu0 = std::min(static_cast<int>(x), nu_ - 1);
            iu1 = iu0 + 1;
            fu = x - iu0;
        } else {
            const double x = (wrap_pi(p.u) + kPi) / kTwoPi * nu_;
            iu0 = std::min(static_cast<int>(x), nu_ - 1);
            iu1 = (iu0 + 1) % nu_;
            fu = x - iu0;
        }
        const double y = (wrap_pi(p.v) + kPi) / kTwoPi * nv_;
        const int iv0 = std::min(static_cast<int>(y), nv_ - 1);
        const int iv1 = (iv0 + 1) % nv_;
        const double fv = y - iv0;
        const Mat2& m00 = at(iu0, iv0);
        const Mat2& m01 = at(iu0, iv1);
        const Mat2& m10 = at(iu1, iv0);
        const Mat2& m11 = at(iu1, iv1);
        return ((1 - fu) * (1 - fv)) * m00 + ((1 - fu) * fv) * m01 + (fu * (1 - fv)) * m10 +
               (fu * fv) * m11;
    }

    std::string descriptor() const override {
        std::string blob;
        blob.reserve(values_.size() * 24);
        for (const Mat2& m : values_) {
            blob += fmt_g17(m.xx);
            blob += ',';
            blob += fmt_g17(m.xy);
            blob += ',';
            blob += fmt_g17(m.yy);
            blob += ';';
        }
        return json{{"domain", domain_ == ChartKind::Sphere ? "sphere" : "torus"},
                    {"family", "grid_tensor"},
                    {"nu", nu_},
                    {"nv", nv_},
                    {"values_hash", hex64(fnv1a64(blob))}}
            .dump();
    }

private:
    const Mat2& at(int i, int j) const {
        return values_[static_cast<std::size_t>(i) * nv_ + j];
    }

    ChartKind domain_;
    int nu_, nv_;
    std::vector<Mat2> values_;
};

}  // namespace

FieldPtr make_round_sphere(double radius) { return std::make_shared<RoundSphereField>(radius); }

FieldPtr make_conformal(FieldPtr base, Profile f) {
    return std::make_shared<ConformalField>(std::move(base), f);
}

FieldPtr make_warped_torus(Profile f) { return std::make_shared<WarpedTorusField>(f); }

FieldPtr make_scaled(FieldPtr base, double factor) {
    return std::make_shared<ScaledField>(std::move(base), factor);
}

FieldPtr make_well_sphere(const std::vector<Vec2>& centers, double rho, double R) {
    return std::make_shared<WellSphereField>(centers, rho, R);
}

std::vector<Vec2> default_well_centers(int j) {
    if (j < 1) throw std::invalid_argument("well count must be >= 1");
    std::vector<Vec2> out;
    out.push_back({0.0, 0.0});
    if (j == 1) return out;
    constexpr double kGolden = 0.6180339887498949;
    for (int i = 2; i <= j - 1; ++i) {
        const double frac = i * kGolden - std::floor(i * kGolden);
        out.push_back({kPi * (i - 1) / (j - 1), wrap_pi(kTwoPi * frac)});
    }
    out.push_back({kPi, 0.0});
    return out;
}

FieldPtr make_grid_tensor(ChartKind domain, int nu, int nv, std::vector<Mat2> values) {
    return std::make_shared<GridTensorField>(domain, nu, nv, std::move(values));
}

}  // namespace flatlab
