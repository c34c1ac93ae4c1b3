#include "nld/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nld {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_ball(const Ball& b) {
    if (!(b.radius > 0.0) || !std::isfinite(b.radius)) throw DomainError("ball radius must be positive");
}

Point json_point(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw DomainError(std::string(what) + " must be a nonempty array");
    std::vector<double> v = j.get<std::vector<double>>();
    if (int(v.size()) > kMaxDim) throw DomainError(std::string(what) + ": dimension too large");
    return Point::from(v);
}

std::vector<double> to_vec(const Point& p) { return {p.c.begin(), p.c.begin() + p.dim}; }

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> keys) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
            throw DomainError("domain: unknown key '" + it.key() + "'");
    }
}

}  // namespace

Domain::Domain(Shape s) : shape_(std::move(s)) {
    std::visit(overloaded{
                   [&](const Ball& b) {
                       check_ball(b);
                       dim_ = b.center.dim;
                       diameter_ = 2.0 * b.radius;
                   },
                   [&](const Box& b) {
                       if (b.lo.dim != b.hi.dim || b.lo.dim < 1) throw DomainError("box corners differ in dimension");
                       for (int i = 0; i < b.lo.dim; ++i)
                           if (!(b.lo[i] < b.hi[i])) throw DomainError("box needs lo < hi in every coordinate");
                       dim_ = b.lo.dim;
                       diameter_ = distance(b.lo, b.hi);
                   },
                   [&](const BallUnion& u) {
                       if (u.balls.empty()) throw DomainError("ball union is empty");
                       dim_ = u.balls.front().center.dim;
                       for (const Ball& b : u.balls) {
                           check_ball(b);
                           if (b.center.dim != dim_) throw DomainError("ball union mixes dimensions");
                       }
                       for (const Ball& a : u.balls)
                           for (const Ball& b : u.balls)
                               diameter_ = std::max(diameter_, distance(a.center, b.center) + a.radius + b.radius);
                   },
               },
               shape_);
}

bool Domain::contains(const Point& x) const { return dist_to_boundary(x) > 0.0; }

double Domain::dist_to_boundary(const Point& x) const {
    if (x.dim != dim_) throw DomainError("point dimension does not match the domain");
    return std::visit(overloaded{
                          [&](const Ball& b) { return std::max(0.0, b.radius - distance(x, b.center)); },
                          [&](const Box& b) {
                              double d = std::numeric_limits<double>::infinity();
                              for (int i = 0; i < dim_; ++i) d = std::min({d, x[i] - b.lo[i], b.hi[i] - x[i]});
                              return std::max(0.0, d);
                          },
                          [&](const BallUnion& u) {
                              double d = 0.0;
                              for (const Ball& b : u.balls) d = std::max(d, b.radius - distance(x, b.center));
                              return d;
                          },
                      },
                      shape_);
}

Point Domain::nearest_exterior(const Point& x) const {
    auto push_out = [](const Point& p, const Ball& b) {
        Point dir = p - b.center;
        double n = norm(dir);
        if (n == 0.0) {
            dir = Point::unit(p.dim, p.dim - 1);
            n = 1.0;
        }
        const double target = b.radius * (1.0 + 1e-12) + 1e-300;
        return b.center + dir * (target / n);
    };
    if (!contains(x)) return x;
    return std::visit(overloaded{
                          [&](const Ball& b) { return push_out(x, b); },
                          [&](const Box& b) {
                              int axis = 0;
                              bool upper = false;
                              double best = std::numeric_limits<double>::infinity();
                              for (int i = 0; i < dim_; ++i) {
                                  if (x[i] - b.lo[i] < best) best = x[i] - b.lo[i], axis = i, upper = false;
                                  if (b.hi[i] - x[i] < best) best = b.hi[i] - x[i], axis = i, upper = true;
                              }
                              Point p = x;
                              const double edge = upper ? b.hi[axis] : b.lo[axis];
                              p[axis] = upper ? std::nextafter(edge, std::numeric_limits<double>::infinity())
                                              : std::nextafter(edge, -std::numeric_limits<double>::infinity());
                              return p;
                          },
                          [&](const BallUnion& u) {
                              // radial exits of the member balls, then a widening search
                              // along coordinate and radial directions
                              Point best;
                              double best_dist = std::numeric_limits<double>::infinity();
                              auto consider = [&](const Point& p) {
                                  if (!contains(p) && distance(p, x) < best_dist) best = p, best_dist = distance(p, x);
                              };
                              for (const Ball& b : u.balls)
                                  if (distance(x, b.center) < b.radius) consider(push_out(x, b));
                              if (std::isfinite(best_dist)) return best;
                              std::vector<Point> dirs;
                              for (int i = 0; i < dim_; ++i) {
                                  dirs.push_back(Point::unit(dim_, i));
                                  dirs.push_back(Point::unit(dim_, i) * -1.0);
                              }
                              for (const Ball& b : u.balls) {
                                  const double n = distance(x, b.center);
                                  if (n > 0.0) dirs.push_back((x - b.center) * (1.0 / n));
                              }
                              for (double t = std::max(dist_to_boundary(x), 1e-12 * diameter_); t <= 4.0 * diameter_;
                                   t *= 2.0) {
                                  for (const Point& e : dirs) consider(x + e * t);
                                  if (std::isfinite(best_dist)) return best;
                              }
                              throw DomainError("nearest_exterior: no exterior point found");
                          },
                      },
                      shape_);
}

std::string Domain::describe() const {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const Ball& b) { os << "ball(r=" << b.radius << ", d=" << dim_ << ")"; },
                   [&](const Box&) { os << "box(d=" << dim_ << ")"; },
                   [&](const BallUnion& u) { os << "union of " << u.balls.size() << " balls (d=" << dim_ << ")"; },
               },
               shape_);
    return os.str();
}

void to_json(nlohmann::json& j, const Domain& d) {
    std::visit(overloaded{
                   [&](const Ball& b) {
                       j = {{"type", "ball"}, {"center", to_vec(b.center)}, {"radius", b.radius}};
                   },
                   [&](const Box& b) { j = {{"type", "box"}, {"lo", to_vec(b.lo)}, {"hi", to_vec(b.hi)}}; },
                   [&](const BallUnion& u) {
                       nlohmann::json arr = nlohmann::json::array();
                       for (const Ball& b : u.balls) arr.push_back({{"center", to_vec(b.center)}, {"radius", b.radius}});
                       j = {{"type", "ball_union"}, {"balls", arr}};
                   },
               },
               d.shape());
}

Domain domain_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type")) throw DomainError("domain: object with a 'type' key expected");
    const std::string type = j.at("type").get<std::string>();
    auto ball_of = [](const nlohmann::json& b) {
        reject_unknown(b, {"type", "center", "radius"});
        return Ball{json_point(b.at("center"), "center"), b.at("radius").get<double>()};
    };
    try {
        if (type == "ball") return Domain(ball_of(j));
        if (type == "box") {
            reject_unknown(j, {"type", "lo", "hi"});
            return Domain(Box{json_point(j.at("lo"), "lo"), json_point(j.at("hi"), "hi")});
        }
        if (type == "ball_union") {
            reject_unknown(j, {"type", "balls"});
            std::vector<Ball> balls;
            for (const auto& b : j.at("balls")) balls.push_back(ball_of(b));
            return Domain(BallUnion{std::move(balls)});
        }
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("domain: ") + e.what());
    }
    throw DomainError("domain: unknown type '" + type + "'");
}

}  // namespace nld
