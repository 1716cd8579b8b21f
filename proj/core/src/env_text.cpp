#include "commforge/env_text.hpp"

namespace commforge {

EnvPromptText env_prompt_text(const Env& env, bool simplified) {
    const EnvMeta& meta = env.meta();
    EnvPromptText text;

    std::string roles;
    for (const auto& [role, agents] : meta.roles) {
        if (!roles.empty()) roles += ", ";
        roles += role + " (" + std::to_string(agents.size()) + ")";
    }
    text.task_description = meta.task_summary + "\nTeam: " + std::to_string(env.n_agents()) +
                            " agents [" + roles + "], " + std::to_string(env.n_actions()) +
                            " discrete actions each, horizon " + std::to_string(env.horizon()) +
                            " steps.";

    if (simplified) {
        text.state_description =
            "The global state is a flat " + std::to_string(env.state_schema().width()) +
            "-dim vector concatenating absolute agent positions, task-object attributes, "
            "most recent actions, and the episode step fraction. All values are normalized "
            "to [0,1].";
        std::string obs = "Each agent receives a flat " +
                          std::to_string(env.obs_schema().width()) +
                          "-dim local observation:\n";
        for (const ObsChunk& chunk : meta.obs_chunks)
            obs += "- dims [" + std::to_string(chunk.lo) + "-" + std::to_string(chunk.hi) +
                   "]: " + chunk.label + "\n";
        text.observation_description = obs;
        return text;
    }

    std::string state = "Global state vector, " + std::to_string(env.state_schema().width()) +
                        " dims, all values in [0,1]:\n";
    for (const DimEntry& d : env.state_schema().dims)
        state += "- dim " + std::to_string(d.index) + " (" + d.name + "): " + d.description + "\n";
    text.state_description = state;

    std::string obs = "Per-agent local observation vector, " +
                      std::to_string(env.obs_schema().width()) +
                      " dims, all values in [0,1]. Offsets are relative to the observing "
                      "agent; no absolute positions appear here.\n";
    for (const DimEntry& d : env.obs_schema().dims)
        obs += "- dim " + std::to_string(d.index) + " (" + d.name + "): " + d.description + "\n";
    text.observation_description = obs;
    return text;
}

}  // namespace commforge
