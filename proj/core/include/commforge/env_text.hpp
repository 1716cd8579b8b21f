#pragma once

#include <string>

#include "commforge/env.hpp"

namespace commforge {

/// The three task-description components fed into the generation prompt.
struct EnvPromptText {
    std::string task_description;
    std::string state_description;
    std::string observation_description;
};

/// Render the descriptions from the env's dimension schemas. In simplified
/// mode the state text is a compact summary and the observation text lists
/// chunk ranges instead of per-dimension entries.
EnvPromptText env_prompt_text(const Env& env, bool simplified = false);

}  // namespace commforge
