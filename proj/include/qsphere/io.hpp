#pragma once

#include "qsphere/core.hpp"
#include "qsphere/dini.hpp"
#include "qsphere/flatness.hpp"
#include "qsphere/maps.hpp"
#include "qsphere/quasisymmetry.hpp"
#include "qsphere/special_functions.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace qsphere::io {

using Json = nlohmann::json;

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

/// CSV with a `# dim=n` header and one point per row.
void write_pointset_csv(std::ostream& os, const PointSet& s);
PointSet read_pointset_csv(std::istream& is);
PointSet read_pointset_file(const std::string& path);

/// Columns center_index, scale, theta, normal_1..normal_n.
void write_profile_csv(std::ostream& os, const flatness::FlatnessProfile& p, int dim);

/// Two columns t,value; lines starting with '#' and a header row are skipped.
dini::ScaleProfile read_scale_profile_csv(std::istream& is);

Json point_to_json(const Point& p);
Point point_from_json(const Json& j);
Json matrix_to_json(const Mat& m);
Mat matrix_from_json(const Json& j);

/// MapSpec documents follow schema "mapspec-v1":
/// {"schema", "variant", "dim", "params", "children"}.
Json map_to_json(const maps::MapSpec& f);
maps::MapSpec map_from_json(const Json& j);

Json to_json(const qs::QsEstimate& e);
Json to_json(const dini::DiniReport& r);
Json to_json(const special::Interval& v);

/// Doubles that are not finite become strings ("inf", "-inf", "nan").
Json number(double v);

}  // namespace qsphere::io
