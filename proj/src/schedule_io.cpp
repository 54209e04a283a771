#include "tilefuse/schedule_io.hpp"

#include <stdexcept>

#include <json.hpp>

namespace tilefuse {

std::string schedule_to_json(const FusedSchedule& sched) {
  nlohmann::json root;
  root["n"] = sched.n;
  root["tile_size_t"] = sched.tile_size;
  nlohmann::json waves = nlohmann::json::array();
  for (const auto& wave : sched.wavefronts) {
    nlohmann::json tiles = nlohmann::json::array();
    for (const auto& tile : wave)
      tiles.push_back({{"i_lo", tile.i_lo},
                       {"i_hi", tile.i_hi},
                       {"j_list", tile.j_rows},
                       {"cost", tile.cost}});
    waves.push_back(std::move(tiles));
  }
  root["wavefronts"] = std::move(waves);
  root["fused_ratio"] = fused_ratio(sched);
  return root.dump(2) + "\n";
}

FusedSchedule schedule_from_json(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("schedule json: ") + e.what());
  }
  FusedSchedule sched;
  try {
    sched.n = root.at("n").get<index_t>();
    sched.tile_size = root.at("tile_size_t").get<index_t>();
    for (const auto& wave : root.at("wavefronts")) {
      auto& tiles = sched.wavefronts.emplace_back();
      for (const auto& tile : wave) {
        FusedTile t;
        t.i_lo = tile.at("i_lo").get<index_t>();
        t.i_hi = tile.at("i_hi").get<index_t>();
        t.j_rows = tile.at("j_list").get<std::vector<index_t>>();
        t.cost = tile.at("cost").get<double>();
        tiles.push_back(std::move(t));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("schedule json: ") + e.what());
  }
  return sched;
}

}  // namespace tilefuse
