#include "qsphere/generators.hpp"

#include <cmath>
#include <sstream>

namespace qsphere::gen {

namespace {

double parse_angle(std::string tok) {
  double scale = 1.0;
  if (tok.size() > 3 && tok.compare(tok.size() - 3, 3, "deg") == 0) {
    tok.resize(tok.size() - 3);
    scale = kPi / 180.0;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != tok.size()) throw Error("bad angle: " + tok);
  return v * scale;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  return out;
}

Point rotate(const Point& d, double a) {
  return make_point({std::cos(a) * d(0) - std::sin(a) * d(1), std::sin(a) * d(0) + std::cos(a) * d(1)});
}

}  // namespace

AngleSchedule AngleSchedule::constant(double theta, int generations) {
  AngleSchedule s;
  s.kind = Kind::constant;
  s.theta = theta;
  s.generations = generations;
  s.validate();
  return s;
}

AngleSchedule AngleSchedule::power(double c, double q, int generations) {
  AngleSchedule s;
  s.kind = Kind::power;
  s.c = c;
  s.q = q;
  s.generations = generations;
  s.validate();
  return s;
}

AngleSchedule AngleSchedule::list(std::vector<double> angles) {
  AngleSchedule s;
  s.kind = Kind::list;
  s.generations = static_cast<int>(angles.size());
  s.angles = std::move(angles);
  s.validate();
  return s;
}

AngleSchedule AngleSchedule::parse(const std::string& spec, int generations) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw Error("angle schedule must look like kind:value");
  const std::string kind = spec.substr(0, colon), rest = spec.substr(colon + 1);
  if (kind == "const") return constant(parse_angle(rest), generations);
  if (kind == "power") {
    const auto parts = split(rest, ',');
    if (parts.size() != 2) throw Error("power schedule needs c,q");
    return power(parse_angle(parts[0]), parse_angle(parts[1]), generations);
  }
  if (kind == "list") {
    std::vector<double> a;
    for (const auto& tok : split(rest, ',')) a.push_back(parse_angle(tok));
    auto s = list(std::move(a));
    if (generations > 0) {
      s.generations = generations;
      s.validate();
    }
    return s;
  }
  throw Error("unknown angle schedule kind: " + kind);
}

double AngleSchedule::angle(int j) const {
  if (j < 1) throw Error("generation index starts at 1");
  switch (kind) {
    case Kind::constant: return theta;
    case Kind::power: return c * std::pow(static_cast<double>(j), -q);
    case Kind::list:
      return static_cast<std::size_t>(j) <= angles.size() ? angles[static_cast<std::size_t>(j - 1)] : 0.0;
  }
  return 0.0;
}

void AngleSchedule::validate() const {
  if (generations < 0) throw Error("generation count must be non-negative");
  for (int j = 1; j <= generations; ++j) {
    const double a = angle(j);
    if (!(a >= 0)) throw Error("angles must be non-negative");
    if (!(a < kPi / 2)) throw Error("angle must stay below pi/2");
  }
}

std::string AngleSchedule::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::constant: os << "const:" << theta; break;
    case Kind::power: os << "power:" << c << "," << q; break;
    case Kind::list:
      os << "list:";
      for (std::size_t i = 0; i < angles.size(); ++i) os << (i ? "," : "") << angles[i];
      break;
  }
  return os.str();
}

double piece_ratio(double theta) { return 1.0 / (2.0 * (1.0 + std::cos(theta))); }

double length_factor(double theta) { return 2.0 / (1.0 + std::cos(theta)); }

double SnowflakeCurve::predicted_length() const {
  double l = initial_length;
  for (double f : length_factors) l *= f;
  return l;
}

SnowflakeCurve snowflake(const AngleSchedule& schedule, bool closed) {
  schedule.validate();
  SnowflakeCurve c;
  c.schedule = schedule;
  c.generations = schedule.generations;
  c.closed = closed;
  std::vector<Point> pts;
  if (closed) {
    // Clockwise, so that the left of each edge faces outward.
    pts = {make_point({0, 0}), make_point({1, 0}), make_point({0.5, -std::sqrt(3.0) / 2}),
           make_point({0, 0})};
    c.initial_length = 3.0;
  } else {
    pts = {make_point({0, 0}), make_point({1, 0})};
  }
  for (int j = 1; j <= schedule.generations; ++j) {
    const double th = schedule.angle(j);
    const double p = piece_ratio(th);
    std::vector<Point> next;
    next.reserve(4 * (pts.size() - 1) + 1);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const Point& a = pts[i];
      const Point& b = pts[i + 1];
      const Point d = b - a;
      const Point p1 = a + p * d;
      const Point p2 = p1 + p * rotate(d, th);
      const Point p3 = p2 + p * rotate(d, -th);
      next.push_back(a);
      next.push_back(p1);
      next.push_back(p2);
      next.push_back(p3);
    }
    next.push_back(pts.back());
    pts = std::move(next);
    c.length_factors.push_back(length_factor(th));
  }
  c.polyline = PointSet(2, std::move(pts), closed ? "snowflake_closed" : "snowflake_arc");
  return c;
}

double polyline_length(const PointSet& s) {
  if (s.size() < 2) throw Error("polyline needs at least two points");
  double l = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) l += (s[i + 1] - s[i]).norm();
  return l;
}

std::vector<double> predicted_lengths(const AngleSchedule& schedule, int m) {
  std::vector<double> out{1.0};
  for (int j = 1; j <= m; ++j) out.push_back(out.back() * length_factor(schedule.angle(j)));
  return out;
}

double checked_length(const SnowflakeCurve& c) {
  const double measured = polyline_length(c.polyline);
  const double predicted = c.predicted_length();
  if (std::abs(measured - predicted) > 1e-9 * predicted)
    throw Error("polyline length disagrees with the product formula");
  return measured;
}

}  // namespace qsphere::gen
