#include "commforge/env.hpp"

#include "commforge/coop_forage.hpp"
#include "commforge/hidden_target.hpp"

namespace commforge {

std::unique_ptr<Env> make_env(const EnvConfig& config) {
    if (config.grid < 4) throw ConfigError("env: grid must be at least 4");
    if (config.horizon < 1) throw ConfigError("env: horizon must be positive");
    if (config.id == "hidden-target") return std::make_unique<HiddenTargetGrid>(config);
    if (config.id == "coop-forage") return std::make_unique<CoopForage>(config);
    throw ConfigError("env: unknown id '" + config.id + "'");
}

std::vector<std::pair<int, int>> border_spawns(int grid, int n, bool spawn_switch) {
    std::vector<std::pair<int, int>> border;
    const int last = grid - 1;
    for (int x = 0; x < last; ++x) border.emplace_back(x, 0);
    for (int y = 0; y < last; ++y) border.emplace_back(last, y);
    for (int x = last; x > 0; --x) border.emplace_back(x, last);
    for (int y = last; y > 0; --y) border.emplace_back(0, y);

    const int perimeter = static_cast<int>(border.size());
    if (n > perimeter) throw ConfigError("env: too many agents for the grid border");
    std::vector<std::pair<int, int>> spawns;
    for (int k = 0; k < n; ++k)
        spawns.push_back(border[(k * perimeter / n) % perimeter]);
    if (spawn_switch) std::reverse(spawns.begin(), spawns.end());
    return spawns;
}

}  // namespace commforge
