#include "cbcc/region.hpp"

namespace cbcc {

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

nlohmann::json rational_to_json(const Rational& r) {
  return nlohmann::json::array({r.numerator(), r.denominator()});
}

Rational rational_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw ParseError("expected a [num, den] integer pair, got " + j.dump());
  }
  const auto den = j[1].get<std::int64_t>();
  if (den == 0) throw ParseError("zero denominator in " + j.dump());
  return Rational(j[0].get<std::int64_t>(), den);
}

RateRegion<double> to_double(const RateRegion<Rational>& region) {
  RateRegion<double> out;
  out.dimension = region.dimension;
  out.downward_closed = region.downward_closed;
  auto conv = [](const std::vector<Rational>& v) {
    std::vector<double> d;
    d.reserve(v.size());
    for (const auto& x : v) d.push_back(ScalarTraits<Rational>::to_double(x));
    return d;
  };
  for (const auto& v : region.vertices) out.vertices.push_back(conv(v));
  for (const auto& h : region.inequalities) {
    out.inequalities.push_back({conv(h.normal), ScalarTraits<Rational>::to_double(h.offset)});
  }
  return out;
}

nlohmann::json to_json(const RateRegion<Rational>& region) {
  nlohmann::json doc;
  doc["dimension"] = region.dimension;
  doc["downward_closed"] = region.downward_closed;
  nlohmann::json vertices = nlohmann::json::array();
  for (const auto& v : region.vertices) {
    nlohmann::json p = nlohmann::json::array();
    for (const auto& x : v) p.push_back(rational_to_json(x));
    vertices.push_back(std::move(p));
  }
  doc["vertices"] = std::move(vertices);
  nlohmann::json ineqs = nlohmann::json::array();
  for (const auto& h : region.inequalities) {
    nlohmann::json normal = nlohmann::json::array();
    for (const auto& x : h.normal) normal.push_back(rational_to_json(x));
    ineqs.push_back({{"normal", std::move(normal)}, {"offset", rational_to_json(h.offset)}});
  }
  doc["inequalities"] = std::move(ineqs);
  return doc;
}

nlohmann::json to_json(const RateRegion<double>& region) {
  nlohmann::json doc;
  doc["dimension"] = region.dimension;
  doc["downward_closed"] = region.downward_closed;
  doc["vertices"] = region.vertices;
  nlohmann::json ineqs = nlohmann::json::array();
  for (const auto& h : region.inequalities) {
    ineqs.push_back({{"normal", h.normal}, {"offset", h.offset}});
  }
  doc["inequalities"] = std::move(ineqs);
  return doc;
}

RateRegion<Rational> rational_region_from_json(const nlohmann::json& doc) {
  try {
    RateRegion<Rational> region;
    region.dimension = doc.at("dimension").get<std::size_t>();
    region.downward_closed = doc.at("downward_closed").get<bool>();
    for (const auto& v : doc.at("vertices")) {
      Point<Rational> p;
      for (const auto& x : v) p.push_back(rational_from_json(x));
      if (p.size() != region.dimension) throw ParseError("vertex dimension mismatch");
      region.vertices.push_back(std::move(p));
    }
    for (const auto& h : doc.at("inequalities")) {
      Halfspace<Rational> hs;
      for (const auto& x : h.at("normal")) hs.normal.push_back(rational_from_json(x));
      if (hs.normal.size() != region.dimension) throw ParseError("normal dimension mismatch");
      hs.offset = rational_from_json(h.at("offset"));
      region.inequalities.push_back(std::move(hs));
    }
    return region;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("region document: ") + e.what());
  }
}

}  // namespace cbcc
