#include "bfoml/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bfoml {

using nlohmann::json;

namespace {

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
}

const json& field(const json& obj, const char* key, json::value_t type, const char* type_name) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(std::string("missing field \"") + key + "\"");
  if (it->type() != type && !(type == json::value_t::number_unsigned && it->is_number_integer()))
    throw SchemaError(std::string("field \"") + key + "\" must be " + type_name);
  return *it;
}

std::string str(const json& j, const std::string& where) {
  if (!j.is_string()) throw SchemaError(where + ": expected a string");
  return j.get<std::string>();
}

std::pair<std::string, std::string> pair_of(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw SchemaError(where + ": expected a pair");
  return {str(j[0], where), str(j[1], where)};
}

}  // namespace

KripkeModel read_model(std::string_view text) {
  json doc = parse_json(text);
  if (!doc.is_object()) throw SchemaError("model must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (it.key() != "worlds" && it.key() != "domain" && it.key() != "delta" &&
        it.key() != "relation" && it.key() != "valuation")
      throw SchemaError("unknown field \"" + it.key() + "\"");
  KripkeModel m;
  for (const auto& w : field(doc, "worlds", json::value_t::array, "an array")) {
    std::string name = str(w, "worlds");
    if (m.find_world(name)) throw SchemaError("duplicate world " + name);
    m.add_world(name);
  }
  for (const auto& d : field(doc, "domain", json::value_t::array, "an array")) {
    std::string name = str(d, "domain");
    if (m.find_element(name)) throw SchemaError("duplicate element " + name);
    m.add_element(name);
  }
  auto world = [&](const std::string& name, const std::string& where) {
    auto w = m.find_world(name);
    if (!w) throw SchemaError(where + ": unknown world " + name);
    return *w;
  };
  auto element = [&](const json& j, const std::string& where) {
    std::string name = str(j, where);
    auto d = m.find_element(name);
    if (!d) throw SchemaError(where + ": unknown element " + name);
    return *d;
  };
  for (const auto& [w, ds] : field(doc, "delta", json::value_t::object, "an object").items()) {
    WorldId id = world(w, "delta");
    if (!ds.is_array()) throw SchemaError("delta." + w + ": expected an array");
    for (const auto& d : ds) m.add_local(id, element(d, "delta." + w));
  }
  for (const auto& e : field(doc, "relation", json::value_t::array, "an array")) {
    auto [a, b] = pair_of(e, "relation");
    m.add_edge(world(a, "relation"), world(b, "relation"));
  }
  if (doc.contains("valuation")) {
    const auto& val = field(doc, "valuation", json::value_t::object, "an object");
    for (const auto& [w, preds] : val.items()) {
      WorldId id = world(w, "valuation");
      if (!preds.is_object()) throw SchemaError("valuation." + w + ": expected an object");
      for (const auto& [p, tuples] : preds.items()) {
        std::string where = "valuation." + w + "." + p;
        if (!tuples.is_array()) throw SchemaError(where + ": expected an array of tuples");
        for (const auto& t : tuples) {
          if (!t.is_array()) throw SchemaError(where + ": expected a tuple");
          Tuple tup;
          for (const auto& d : t) tup.push_back(element(d, where));
          m.add_fact(id, Pred::named(p), std::move(tup));
        }
      }
    }
  }
  auto report = validate(m);
  if (!report.ok()) throw ModelInvalid(std::move(report));
  return m;
}

std::string write_model(const KripkeModel& m) {
  json doc;
  doc["worlds"] = json::array();
  doc["domain"] = json::array();
  doc["delta"] = json::object();
  doc["relation"] = json::array();
  doc["valuation"] = json::object();
  for (ElemId d = 0; d < m.element_count(); ++d) doc["domain"].push_back(m.element_name(d));
  for (WorldId w = 0; w < m.world_count(); ++w) {
    const std::string& name = m.world_name(w);
    doc["worlds"].push_back(name);
    json local = json::array();
    for (ElemId d : m.local_domain(w)) local.push_back(m.element_name(d));
    doc["delta"][name] = std::move(local);
    json preds = json::object();
    for (const auto& [p, tuples] : m.facts(w)) {
      if (tuples.empty()) continue;
      json ts = json::array();
      for (const auto& t : tuples) {
        json tj = json::array();
        for (ElemId d : t) tj.push_back(m.element_name(d));
        ts.push_back(std::move(tj));
      }
      preds[p.name()] = std::move(ts);
    }
    if (!preds.empty()) doc["valuation"][name] = std::move(preds);
  }
  for (const auto& [a, b] : m.edges())
    doc["relation"].push_back(json::array({m.world_name(a), m.world_name(b)}));
  return doc.dump(2) + "\n";
}

TilingInstance read_tiling(std::string_view text) {
  json doc = parse_json(text);
  if (!doc.is_object()) throw SchemaError("tiling instance must be a JSON object");
  TilingInstance inst;
  for (const auto& t : field(doc, "tiles", json::value_t::array, "an array"))
    inst.tiles.push_back(str(t, "tiles"));
  for (const auto& p : field(doc, "h", json::value_t::array, "an array"))
    inst.h.push_back(pair_of(p, "h"));
  for (const auto& p : field(doc, "v", json::value_t::array, "an array"))
    inst.v.push_back(pair_of(p, "v"));
  inst.t0 = str(field(doc, "t0", json::value_t::string, "a string"), "t0");
  try {
    inst.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  return inst;
}

std::string write_tiling(const TilingInstance& inst) {
  json doc;
  doc["tiles"] = inst.tiles;
  doc["h"] = json::array();
  doc["v"] = json::array();
  for (const auto& [a, b] : inst.h) doc["h"].push_back(json::array({a, b}));
  for (const auto& [a, b] : inst.v) doc["v"].push_back(json::array({a, b}));
  doc["t0"] = inst.t0;
  return doc.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

KripkeModel read_model_file(const std::string& path) { return read_model(read_text_file(path)); }

TilingInstance read_tiling_file(const std::string& path) {
  return read_tiling(read_text_file(path));
}

}  // namespace bfoml
