#pragma once

#include "nld/point.hpp"

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace nld {

class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Ball {
    Point center;
    double radius = 1.0;
};

struct Box {
    Point lo, hi;
};

struct BallUnion {
    std::vector<Ball> balls;
};

/// Bounded open set: a ball, an axis-parallel box or a finite union of balls.
class Domain {
public:
    using Shape = std::variant<Ball, Box, BallUnion>;

    explicit Domain(Shape s);
    static Domain ball(const Point& center, double radius) { return Domain(Ball{center, radius}); }
    static Domain unit_ball(int dim) { return ball(Point(dim), 1.0); }
    static Domain box(const Point& lo, const Point& hi) { return Domain(Box{lo, hi}); }
    static Domain ball_union(std::vector<Ball> balls) { return Domain(BallUnion{std::move(balls)}); }

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] const Shape& shape() const { return shape_; }
    [[nodiscard]] bool contains(const Point& x) const;
    /// Distance to the complement (0 outside). For a union of balls this is the largest
    /// depth inside a single member ball, a lower bound for the true distance.
    [[nodiscard]] double dist_to_boundary(const Point& x) const;
    /// Largest ball centred at x used by the walks; radius dist_to_boundary(x).
    [[nodiscard]] Ball inscribed_ball(const Point& x) const { return {x, dist_to_boundary(x)}; }
    [[nodiscard]] double diameter() const { return diameter_; }
    /// A point of the complement close to x (used when a walk stops in the boundary band).
    [[nodiscard]] Point nearest_exterior(const Point& x) const;
    [[nodiscard]] std::string describe() const;

private:
    Shape shape_;
    int dim_ = 1;
    double diameter_ = 0.0;
};

void to_json(nlohmann::json& j, const Domain& d);
Domain domain_from_json(const nlohmann::json& j);

}  // namespace nld
