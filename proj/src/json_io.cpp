#include "birch/json_io.hpp"

namespace birch {

using nlohmann::json;

json character_to_json(const Character& a) {
  json trees = json::array();
  const auto& table = *a.table();
  for (size_t slot = 0; slot < table.tree_ids.size(); ++slot) {
    trees.push_back({{"forest", encode(table.forests[table.tree_ids[slot]])},
                     {"value", a.tree_value(slot)}});
  }
  return json{{"d", table.d}, {"p_floor", table.cap}, {"trees", trees}};
}

Character character_from_json(const json& j) {
  auto table = ForestTable::get(j.at("d").get<int>(), j.at("p_floor").get<int>());
  Character a(table);
  for (const auto& entry : j.at("trees")) {
    Tree t = parse_tree(entry.at("forest").get<std::string>());
    a.set(t, entry.at("value").get<double>());
  }
  return a;
}

json path_to_json(const BranchedRoughPath& x) {
  json values = json::array();
  for (const auto& v : x.values) values.push_back(character_to_json(v));
  return json{{"schema_version", kSchemaVersion},
              {"type", "branched_rough_path"},
              {"p", x.p},
              {"d", x.d()},
              {"p_floor", x.p_floor()},
              {"times", x.times},
              {"values", values}};
}

json integral_report_json(double s, double t, const FullIntegralResult& y,
                          const LocalApproximant& approx,
                          const std::vector<ErrorRow>& errors, double pvar_y) {
  json yt = json::object();
  for (int fid = 0; fid < approx.table_e->num_forests(); ++fid)
    yt[encode(approx.table_e->forests[fid])] = approx.values[fid];
  json errs = json::array();
  for (const auto& row : errors) {
    errs.push_back({{"scale", row.scale},
                    {"remainder", row.remainder},
                    {"remainder_level1", row.remainder_level1},
                    {"omega", row.omega}});
  }
  return json{{"schema_version", kSchemaVersion},
              {"interval", {s, t}},
              {"Y", character_to_json(y.y)},
              {"y_tilde", yt},
              {"errors", errs},
              {"pvar_Y", pvar_y},
              {"level_gaps", y.level_gaps},
              {"converged", y.converged}};
}

}  // namespace birch
