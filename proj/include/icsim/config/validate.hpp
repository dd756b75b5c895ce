#pragma once

#include <set>
#include <string>
#include <vector>

#include "icsim/config/model.hpp"

namespace icsim::config {

enum class ViolationKind {
    duplicate_name,
    dangling_reference,
    duplicate_endpoint,
    unit_id_collision,
    multiple_bus_masters,
    writable_area_violation,
    purdue_violation,
    unknown_logic,
    register_overlap,
    unknown_physical_value,
    duplicate_physical_value,
    bad_value,
};

const char* violation_kind_name(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::string device;    // offending device (or attacker) name; empty for global
    std::string key_path;  // config path of the offending key
    std::string message;

    std::string to_string() const;
};

// Structural checks beyond what the parser enforces: referential integrity,
// endpoint uniqueness, unit-id collisions per bus, writable-area rules and
// the layering rules (field devices never act as clients, HMIs never serve).
// When known_logic is non-null, logic identifiers must be registered in it.
std::vector<Violation> validate(const SimulationConfig& config,
                                const std::set<std::string>* known_logic = nullptr);

}  // namespace icsim::config
