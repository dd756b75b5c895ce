#include "icsim/scenarios/bottle.hpp"

#include <algorithm>

namespace icsim::scenarios {

void BottleLineHil::step(const devices::LogicContext& ctx,
                         const std::map<std::string, double>& current,
                         std::vector<std::pair<std::string, double>>& updates) {
    const double capacity = ctx.param("tank_capacity_l", 100.0);
    const double r_in = ctx.param("r_in_lps", 5.0);
    const double r_out = ctx.param("r_out_lps", 5.0);
    const double speed = ctx.param("conveyor_speed", 0.5);
    const double bottle_capacity = ctx.param("bottle_capacity_l", 2.0);
    const double dt = ctx.dt_s;

    double level = current.at("tank_level_l");
    double position = current.at("bottle_position");
    double fill = current.at("bottle_fill_l");
    double output_valve = current.at("output_valve");
    const bool input_open = current.at("input_valve") >= 0.5;
    const bool output_open = output_valve >= 0.5;
    const bool moving = current.at("conveyor_moving") >= 0.5;
    double conveyor = moving ? 1.0 : 0.0;

    if (input_open) level += r_in * dt;
    if (output_open && level > 0.0) {
        const double drained = std::min(r_out * dt, level);
        level -= drained;
        if (position >= 1.0) fill += drained;  // off-position flow spills
    }
    level = std::clamp(level, 0.0, capacity);

    if (moving) position = std::min(1.0, position + speed * dt);

    if (fill >= bottle_capacity) {
        // Full bottle leaves: outlet interlock shuts, fresh bottle at 0.
        fill = 0.0;
        position = 0.0;
        conveyor = 1.0;
        output_valve = 0.0;
    }

    updates.emplace_back("tank_level_l", level);
    updates.emplace_back("bottle_position", position);
    updates.emplace_back("bottle_fill_l", fill);
    updates.emplace_back("conveyor_moving", conveyor);
    updates.emplace_back("output_valve", output_valve);
}

void BottleTankPlc::scan(modbus::RegisterBank& bank, const devices::LogicContext& ctx) {
    // holding 0: tank level mirror (scaled); coil 0: in-position signal
    // written by the conveyor PLC; coil 1: input valve command; coil 2:
    // output valve command.
    const double level_scale = ctx.param("level_scale", 10.0);
    const double low = ctx.param("low_l", 30.0) * level_scale;
    const double high = ctx.param("high_l", 80.0) * level_scale;

    const double level = bank.get(modbus::Area::holding_register, 0);
    if (level < low) {
        bank.set(modbus::Area::coil, 1, 1);
    } else if (level > high) {
        bank.set(modbus::Area::coil, 1, 0);
    }

    const bool in_position = bank.get(modbus::Area::coil, 0) != 0;
    bank.set(modbus::Area::coil, 2, in_position ? 1 : 0);
}

void BottleConveyorPlc::scan(modbus::RegisterBank& bank, const devices::LogicContext&) {
    // holding 0: bottle position mirror (percent); coil 0: conveyor command;
    // coil 1: in-position signal pushed to the tank PLC.
    const bool in_position = bank.get(modbus::Area::holding_register, 0) >= 100;
    bank.set(modbus::Area::coil, 0, in_position ? 0 : 1);
    bank.set(modbus::Area::coil, 1, in_position ? 1 : 0);
}

}  // namespace icsim::scenarios
