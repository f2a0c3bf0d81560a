#include "hardcore/field_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace hardcore {

using nlohmann::json;

ActivityField parse_field_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("field file: ") + e.what());
  }
  try {
    const double scale = doc.at("scale").get<double>();
    const auto& r = doc.at("region");
    if (!r.is_array() || r.size() != 4) {
      throw std::invalid_argument("field file: region must be [x_min, y_min, x_max, y_max]");
    }
    const LatticeBox region(r[0].get<int>(), r[1].get<int>(), r[2].get<int>(), r[3].get<int>());
    std::vector<double> values(region.size(), 0.0);
    std::vector<bool> seen(region.size(), false);
    for (const auto& entry : doc.at("values")) {
      if (!entry.is_array() || entry.size() != 3) {
        throw std::invalid_argument("field file: each value must be [x, y, value]");
      }
      const Site v{entry[0].get<int>(), entry[1].get<int>()};
      if (!region.contains(v)) {
        throw std::invalid_argument("field file: site " + to_string(v) + " outside region");
      }
      const auto i = region.index_of(v);
      if (seen[i]) throw std::invalid_argument("field file: duplicate site " + to_string(v));
      seen[i] = true;
      values[i] = entry[2].get<double>();
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
      if (!seen[i]) {
        throw std::invalid_argument("field file: missing site " + to_string(region.site_at(i)));
      }
    }
    return {region, scale, std::move(values)};
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("field file: ") + e.what());
  }
}

ActivityField read_field_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open field file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_field_json(ss.str());
}

std::string field_to_json(const ActivityField& f) {
  const auto& r = f.region();
  json doc;
  doc["scale"] = f.scale();
  doc["region"] = {r.x_min(), r.y_min(), r.x_max(), r.y_max()};
  json values = json::array();
  for (std::size_t i = 0; i < f.values().size(); ++i) {
    const Site v = r.site_at(i);
    values.push_back({v.x, v.y, f.values()[i]});
  }
  doc["values"] = std::move(values);
  return doc.dump();
}

}  // namespace hardcore
