#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "spwell/grid.hpp"

namespace spwell {

/// Potential-well profile g(x) = plateau · min(1, dist(x, Ω₀)/τ):
///   g = 0 exactly on the closed zero-set Ω₀, ramps linearly over width τ,
///   and equals `plateau` (default 1) beyond, so liminf_{|x|→∞} g = plateau.
/// The potential of the problem is V_µ(x) = 1 + µ·g(x) ≥ 1.
class Well {
public:
    enum class Shape { ball, ellipsoid, union_balls };

    struct BallSpec {
        Point center{0.0, 0.0, 0.0};
        double radius = 1.0;
    };

    static Well ball(Point center, double radius, double tau = 0.25, double plateau = 1.0) {
        Well w;
        w.shape_ = Shape::ball;
        w.balls_ = {BallSpec{center, radius}};
        w.init(tau, plateau);
        return w;
    }

    static Well ellipsoid(Point center, Point semi_axes, double tau = 0.25, double plateau = 1.0) {
        Well w;
        w.shape_ = Shape::ellipsoid;
        w.center_ = center;
        w.axes_ = semi_axes;
        for (double a : semi_axes)
            if (!(a > 0.0)) throw std::invalid_argument("Well: semi-axes must be positive");
        w.init(tau, plateau);
        return w;
    }

    static Well union_balls(std::vector<BallSpec> balls, double tau = 0.25, double plateau = 1.0) {
        if (balls.empty()) throw std::invalid_argument("Well: union needs at least one ball");
        Well w;
        w.shape_ = Shape::union_balls;
        w.balls_ = std::move(balls);
        w.init(tau, plateau);
        return w;
    }

    /// Default non-radial test well: two balls of radius 0.5 at (±0.6, 0, 0).
    static Well default_nonradial() {
        return union_balls({BallSpec{{0.6, 0.0, 0.0}, 0.5}, BallSpec{{-0.6, 0.0, 0.0}, 0.5}});
    }

    Shape shape() const { return shape_; }
    double tau() const { return tau_; }
    double plateau() const { return plateau_; }
    const std::vector<BallSpec>& balls() const { return balls_; }
    Point center() const { return shape_ == Shape::ellipsoid ? center_ : balls_.front().center; }
    Point semi_axes() const { return axes_; }

    /// Distance from x to Ω₀ (0 inside the closed set).
    double dist(const Point& x) const {
        switch (shape_) {
        case Shape::ball:
            return std::max(0.0, norm(sub(x, balls_[0].center)) - balls_[0].radius);
        case Shape::union_balls: {
            double d = std::numeric_limits<double>::infinity();
            for (const auto& b : balls_)
                d = std::min(d, std::max(0.0, norm(sub(x, b.center)) - b.radius));
            return d;
        }
        case Shape::ellipsoid:
            return ellipsoid_dist(sub(x, center_));
        }
        return 0.0;
    }

    bool inside_omega0(const Point& x) const { return dist(x) == 0.0; }

    double value(const Point& x) const {
        return plateau_ * std::min(1.0, dist(x) / tau_);
    }

    /// Largest |y| over Ω₀ (circumradius about the origin).
    double omega0_circumradius() const {
        if (shape_ == Shape::ellipsoid)
            return norm(center_) + *std::max_element(axes_.begin(), axes_.end());
        double r = 0.0;
        for (const auto& b : balls_) r = std::max(r, norm(b.center) + b.radius);
        return r;
    }

    /// Center and radius of a ball contained in Ω₀.
    std::pair<Point, double> inscribed_ball() const {
        if (shape_ == Shape::ellipsoid)
            return {center_, *std::min_element(axes_.begin(), axes_.end())};
        return {balls_.front().center, balls_.front().radius};
    }

    /// Radius beyond which g exceeds `threshold`·plateau (decay-rate window).
    double radius_where_g_exceeds(double threshold) const {
        return omega0_circumradius() + threshold * tau_;
    }

    /// True when g depends only on |x| about the origin, which the radial
    /// grid kind requires.
    bool radially_symmetric() const {
        if (shape_ == Shape::ball)
            return norm(balls_[0].center) == 0.0;
        return false;
    }

    void require_compatible(const Grid& grid) const {
        if (grid.kind() == GridKind::radial && !radially_symmetric())
            throw std::invalid_argument("Well: radial grids need an origin-centered ball well");
        if (omega0_circumradius() >= grid.k())
            throw std::invalid_argument("Well: Ω₀ is not contained in B_k");
    }

private:
    void init(double tau, double plateau) {
        if (!(tau > 0.0)) throw std::invalid_argument("Well: ramp width tau must be positive");
        if (!(plateau > 0.0)) throw std::invalid_argument("Well: plateau must be positive");
        tau_ = tau;
        plateau_ = plateau;
    }

    static Point sub(const Point& a, const Point& b) {
        return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
    }
    static double norm(const Point& a) {
        return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    }

    // Distance from q (relative to center) to the axis-aligned ellipsoid
    // surface, 0 inside. Solves Σ aᵢ²qᵢ²/(aᵢ²+t)² = 1 for t ≥ 0 by bisection;
    // the closest surface point is xᵢ = aᵢ²qᵢ/(aᵢ²+t).
    double ellipsoid_dist(const Point& q) const {
        double level = 0.0;
        for (int i = 0; i < 3; ++i) level += (q[i] / axes_[i]) * (q[i] / axes_[i]);
        if (level <= 1.0) return 0.0;
        auto f = [&](double t) {
            double s = 0.0;
            for (int i = 0; i < 3; ++i) {
                const double d = axes_[i] * axes_[i] + t;
                s += axes_[i] * axes_[i] * q[i] * q[i] / (d * d);
            }
            return s - 1.0;
        };
        double lo = 0.0;
        double hi = norm(q) * *std::max_element(axes_.begin(), axes_.end()) + norm(q) * norm(q);
        while (f(hi) > 0.0) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) > 0.0 ? lo : hi) = mid;
            if (hi - lo < 1e-15 * (1.0 + hi)) break;
        }
        const double t = 0.5 * (lo + hi);
        double d2 = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double xi = axes_[i] * axes_[i] * q[i] / (axes_[i] * axes_[i] + t);
            d2 += (q[i] - xi) * (q[i] - xi);
        }
        return std::sqrt(d2);
    }

    Shape shape_ = Shape::ball;
    std::vector<BallSpec> balls_;
    Point center_{0.0, 0.0, 0.0};
    Point axes_{1.0, 1.0, 1.0};
    double tau_ = 0.25;
    double plateau_ = 1.0;
};

} // namespace spwell
