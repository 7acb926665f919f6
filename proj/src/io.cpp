#include "qsphere/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace qsphere::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

namespace {

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto b = tok.find_first_not_of(" \t\r");
    const auto e = tok.find_last_not_of(" \t\r");
    if (b == std::string::npos) throw Error("empty CSV field");
    tok = tok.substr(b, e - b + 1);
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      throw Error("malformed CSV number: " + tok);
    out.push_back(v);
  }
  return out;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

void write_pointset_csv(std::ostream& os, const PointSet& s) {
  os << "# dim=" << s.dim << "\n";
  for (const auto& p : s.points) {
    for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? "," : "") << format_double(p(i));
    os << "\n";
  }
}

PointSet read_pointset_csv(std::istream& is) {
  PointSet s;
  bool have_dim = false;
  std::string line;
  while (std::getline(is, line)) {
    if (blank(line)) continue;
    if (line[0] == '#') {
      const auto pos = line.find("dim=");
      if (pos != std::string::npos) {
        s.dim = std::stoi(line.substr(pos + 4));
        have_dim = true;
      }
      continue;
    }
    const auto row = parse_row(line);
    if (!have_dim) throw Error("point set CSV lacks the '# dim=n' header");
    if (static_cast<int>(row.size()) != s.dim) throw Error("CSV row has the wrong number of columns");
    Point p(s.dim);
    for (int i = 0; i < s.dim; ++i) p(i) = row[static_cast<std::size_t>(i)];
    s.points.push_back(p);
  }
  if (!have_dim) throw Error("point set CSV lacks the '# dim=n' header");
  s.validate();
  return s;
}

PointSet read_pointset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_pointset_csv(in);
}

void write_profile_csv(std::ostream& os, const flatness::FlatnessProfile& p, int dim) {
  os << "center_index,scale,theta";
  for (int i = 1; i <= dim; ++i) os << ",normal_" << i;
  os << "\n";
  for (const auto& e : p.entries) {
    os << e.center_index << "," << format_double(e.scale) << "," << format_double(e.theta);
    for (Eigen::Index i = 0; i < e.normal.size(); ++i) os << "," << format_double(e.normal(i));
    os << "\n";
  }
}

dini::ScaleProfile read_scale_profile_csv(std::istream& is) {
  std::vector<double> t, v;
  std::string line;
  while (std::getline(is, line)) {
    if (blank(line) || line[0] == '#') continue;
    if (t.empty() && v.empty() && line.find_first_of("0123456789") != 0 &&
        line.find_first_of("tT") != std::string::npos)
      continue;  // header row
    const auto row = parse_row(line);
    if (row.size() != 2) throw Error("profile CSV rows need two columns t,value");
    t.push_back(row[0]);
    v.push_back(row[1]);
  }
  return dini::ScaleProfile::measured(std::move(t), std::move(v));
}

Json point_to_json(const Point& p) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) j.push_back(p(i));
  return j;
}

Point point_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || j.size() > 3) throw Error("point must be an array of 1-3 numbers");
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) p(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return p;
}

Json matrix_to_json(const Mat& m) {
  Json j = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

Mat matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || j.size() > 3) throw Error("matrix must be a square array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Mat m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw Error("matrix must be a square array of rows");
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Json map_to_json(const maps::MapSpec& f) {
  Json j{{"schema", "mapspec-v1"}, {"variant", f.variant_name()}, {"dim", f.dim}};
  Json params = Json::object();
  Json children = Json::array();
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, maps::Linear>) {
          params["matrix"] = matrix_to_json(k.matrix);
        } else if constexpr (std::is_same_v<K, maps::RadialStretch>) {
          params["exponent"] = k.exponent;
        } else if constexpr (std::is_same_v<K, maps::RadialBlend>) {
          params = {{"inner", k.inner}, {"outer", k.outer}, {"r_inner", k.r_inner}, {"r_outer", k.r_outer}};
        } else if constexpr (std::is_same_v<K, maps::Translation>) {
          params["shift"] = point_to_json(k.shift);
        } else if constexpr (std::is_same_v<K, maps::Composite>) {
          for (const auto& p : k.parts) {
            Json c = map_to_json(p);
            c.erase("schema");
            children.push_back(c);
          }
        }
      },
      f.kind);
  j["params"] = params;
  j["children"] = children;
  return j;
}

maps::MapSpec map_from_json(const Json& j) {
  try {
    if (j.contains("schema") && j.at("schema") != "mapspec-v1")
      throw Error("unsupported map schema: " + j.at("schema").dump());
    const std::string v = j.at("variant").get<std::string>();
    const int dim = j.at("dim").get<int>();
    const Json params = j.value("params", Json::object());
    maps::MapSpec m;
    if (v == "identity") {
      m = maps::MapSpec::identity(dim);
    } else if (v == "linear") {
      m = maps::MapSpec::linear(matrix_from_json(params.at("matrix")));
    } else if (v == "radial_stretch") {
      m = maps::MapSpec::radial_stretch(dim, params.at("exponent").get<double>());
    } else if (v == "radial_blend") {
      m = maps::MapSpec::radial_blend(dim, params.at("inner").get<double>(), params.at("outer").get<double>(),
                                      params.at("r_inner").get<double>(), params.at("r_outer").get<double>());
    } else if (v == "translation") {
      m = maps::MapSpec::translation(point_from_json(params.at("shift")));
    } else if (v == "composite") {
      std::vector<maps::MapSpec> parts;
      for (const auto& c : j.at("children")) parts.push_back(map_from_json(c));
      m = maps::MapSpec::composite(std::move(parts));
    } else {
      throw Error("unknown map variant: " + v);
    }
    if (m.dim != dim) throw Error("map dim field disagrees with its parameters");
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed map document: ") + e.what());
  }
}

Json to_json(const qs::QsEstimate& e) {
  Json w = Json::array();
  for (const auto& p : e.witness) w.push_back(point_to_json(p));
  return {{"H", e.H}, {"H_tilde", e.H_tilde}, {"witness", w}, {"triple_count", e.triple_count},
          {"used_count", e.used_count}, {"seed", e.seed}};
}

Json to_json(const dini::DiniReport& r) {
  return {{"value", number(r.value)},
          {"verdict", dini::to_string(r.verdict)},
          {"p", r.p},
          {"log_weighted", r.log_weighted},
          {"t_min", r.t_min},
          {"t_max", r.t_max},
          {"lower_cutoff", r.lower_cutoff},
          {"tail_estimate", number(r.tail_estimate)},
          {"diagnostic", r.diagnostic}};
}

Json to_json(const special::Interval& v) {
  return {{"lo", number(v.lo)}, {"hi", number(v.hi)}, {"exact", v.exact}};
}

}  // namespace qsphere::io
