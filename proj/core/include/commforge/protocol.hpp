#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "commforge/schema.hpp"

namespace commforge {

enum class DiagnosticClass { Syntax, Schema, Semantic };

const char* to_string(DiagnosticClass c);

/// Validation failure, phrased so it can be fed back to the protocol
/// generator verbatim for iterative correction.
struct Diagnostic {
    DiagnosticClass cls = DiagnosticClass::Syntax;
    std::string code;
    std::string message;
};

std::string format_diagnostics(const std::vector<Diagnostic>& diagnostics);

enum class Transform { Identity, DeltaHistory, OneHotId, MeanOverWindow };

const char* to_string(Transform t);

/// One communication rule, fully resolved: role selectors are expanded to
/// agent indices at parse time.
struct MessageRule {
    std::vector<int> senders;          // sorted unique
    bool receivers_all_others = false;
    std::vector<int> receivers;        // sorted unique; unused when all-others
    std::vector<int> features;         // observation dim indices
    Transform transform = Transform::Identity;
    int window = 1;

    int width_per_sender(int n_agents) const {
        return transform == Transform::OneHotId ? n_agents
                                                : static_cast<int>(features.size());
    }
    bool addresses(int sender, int receiver) const {
        if (receiver == sender) return false;
        if (receivers_all_others) return true;
        for (const int r : receivers)
            if (r == receiver) return true;
        return false;
    }
};

bool operator==(const MessageRule& a, const MessageRule& b);

struct ProtocolSpec {
    std::vector<MessageRule> rules;
    int message_width = 0;  // declared; equals the computed width after validation
    std::string rationale;  // free-text design note carried alongside the rules
};

bool operator==(const ProtocolSpec& a, const ProtocolSpec& b);

/// Resolution context: observation schema (for feature names and bounds),
/// agent count, and role table.
struct ProtocolContext {
    int n_agents = 0;
    int obs_width = 0;
    const DimSchema* obs_schema = nullptr;  // optional; enables name lookup
    std::vector<std::pair<std::string, std::vector<int>>> roles;

    const std::vector<int>* find_role(const std::string& name) const {
        for (const auto& [role, agents] : roles)
            if (role == name) return &agents;
        return nullptr;
    }
};

struct ParseResult {
    std::optional<ProtocolSpec> spec;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return spec.has_value(); }
};

/// Parse and validate a protocol document. Returns either a spec or the full
/// list of diagnostics (never both).
ParseResult parse_protocol(const std::string& text, const ProtocolContext& ctx);

/// Canonical JSON form; parse(serialize(spec)) yields an identical spec.
std::string serialize_protocol(const ProtocolSpec& spec);

int computed_width(const ProtocolSpec& spec, int n_agents);

/// Width-cap check (capacity-constrained mode). Returns the rejection
/// diagnostic, or nullopt when the spec fits.
std::optional<Diagnostic> constrain_width(const ProtocolSpec& spec, int cap, int n_agents);

/// Ordered protocol increments f_C^(0..K-1); per-step message segments
/// concatenate in step order.
struct ProtocolStack {
    std::vector<ProtocolSpec> steps;

    int total_width(int n_agents) const {
        int w = 0;
        for (const ProtocolSpec& s : steps) w += computed_width(s, n_agents);
        return w;
    }
};

/// Observation histories per agent, oldest first, newest = current step.
/// Lookbacks beyond the first entry read zeros (episode-start padding).
using ObservationHistories = std::vector<std::vector<std::vector<double>>>;

/// Interpret the stack: one message vector per agent, width = stack width.
/// Slots not addressed to a receiver (including the sender's own) are zero.
std::vector<std::vector<double>> apply_protocol(const ProtocolStack& stack,
                                                const ObservationHistories& histories);

}  // namespace commforge
