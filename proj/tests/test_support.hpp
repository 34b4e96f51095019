#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vh2kg/vh2kg.hpp"

namespace vh2kg::test {

inline std::filesystem::path data_dir() { return VH2KG_DATA_DIR; }

inline EnvironmentGraph scene(const std::string& file = "scene1.json") {
  PipelineConfig cfg = load_pipeline_config(data_dir() / "pipeline.json");
  cfg.environment = data_dir() / file;
  return load_pipeline_environment(cfg);
}

inline std::vector<ActivityScript> fixture_scripts() {
  return load_scripts(data_dir() / "scripts", data_dir() / "scripts" / "manifest.csv");
}

inline const CorpusRun& base_corpus() {
  static const CorpusRun run =
      run_corpus(fixture_scripts(), scene(), SimConfig{}, RunMode::Strict, default_property_table());
  return run;
}

inline ActivityScript script_of(std::string_view text, Category c = Category::Other) {
  auto s = parse_script(text);
  s.category = c;
  return s;
}

/// Small hand-built scene: one room, an agent, a shelf high up, a cup low down.
inline EnvironmentGraph toy_scene(double shelfCenterY = 2.0, double cupCenterY = 0.2) {
  const std::string json = R"({"scene_id": "toy", "nodes": [
    {"id": 1, "class_name": "kitchen", "is_room": true, "bounding_box": {"center": [0,1.5,0], "size": [10,3,10]}},
    {"id": 2, "class_name": "character", "is_agent": true, "states": ["STANDING"],
     "bounding_box": {"center": [0,0.9,0], "size": [0.5,1.8,0.5]}},
    {"id": 3, "class_name": "box", "properties": ["GRABBABLE", "MOVABLE"],
     "bounding_box": {"center": [1,)" + std::to_string(shelfCenterY) + R"(,0], "size": [0.3,0.4,0.3]}},
    {"id": 4, "class_name": "cup", "properties": ["GRABBABLE"],
     "bounding_box": {"center": [0.5,)" + std::to_string(cupCenterY) + R"(,0.5], "size": [0.1,0.2,0.1]}},
    {"id": 5, "class_name": "fridge", "properties": ["CAN_OPEN", "HAS_SWITCH"], "states": ["CLOSED", "OFF"],
     "bounding_box": {"center": [4,1,4], "size": [0.8,2,0.8]}}
  ], "edges": [
    {"from_id": 2, "to_id": 1, "relation_type": "INSIDE"},
    {"from_id": 3, "to_id": 1, "relation_type": "INSIDE"},
    {"from_id": 4, "to_id": 1, "relation_type": "INSIDE"},
    {"from_id": 5, "to_id": 1, "relation_type": "INSIDE"}
  ]})";
  return load_environment(json);
}

}  // namespace vh2kg::test
