#include "icsim/scenarios/ied.hpp"

#include <algorithm>
#include <cmath>

namespace icsim::scenarios {

void IedTransformerHil::step(const devices::LogicContext& ctx,
                             const std::map<std::string, double>& current,
                             std::vector<std::pair<std::string, double>>& updates) {
    const double tap_step_pu = ctx.param("tap_step_pu", 0.0125);
    const double min_interval = ctx.param("min_interval_s", 5.0);
    const double max_interval = ctx.param("max_interval_s", 30.0);
    const double walk_step = ctx.param("source_walk_step", 0.002);
    const double max_dev = ctx.param("source_max_dev", 0.02);

    double tap = current.at("tap_position");
    double v_source = current.at("v_source_pu");
    const double setpoint = current.at("tap_setpoint");

    if (!initialized_) {
        initialized_ = true;
        last_setpoint_ = setpoint;
        next_tap_time_s_ = ctx.sim_time_s + ctx.rng.uniform(min_interval, max_interval);
    }

    v_source += ctx.rng.coin() ? walk_step : -walk_step;
    v_source = std::clamp(v_source, 1.0 - max_dev, 1.0 + max_dev);

    if (setpoint != last_setpoint_) {
        // Commanded move wins over the autonomous schedule this tick.
        last_setpoint_ = setpoint;
        tap = std::clamp(std::round(setpoint), -8.0, 8.0);
    } else if (ctx.sim_time_s >= next_tap_time_s_) {
        tap = std::clamp(tap + (ctx.rng.coin() ? 1.0 : -1.0), -8.0, 8.0);
        next_tap_time_s_ = ctx.sim_time_s + ctx.rng.uniform(min_interval, max_interval);
    }

    const double voltage = v_source * (1.0 + tap_step_pu * tap);

    updates.emplace_back("v_source_pu", v_source);
    updates.emplace_back("tap_position", tap);
    updates.emplace_back("voltage_pu", voltage);
}

void IedBreakerPlc::scan(modbus::RegisterBank& bank, const devices::LogicContext& ctx) {
    // holding 0: voltage mirror (scaled by v_scale); holding 1: tap position
    // mirror (offset +8); holding 2: relative tap command, HMI-writable;
    // holding 3: tap setpoint pushed to the tap-changer actuator (offset +8);
    // coil 0: breaker trip command; coil 1: fault flag.
    const double v_scale = ctx.param("v_scale", 1000.0);
    const double v_min = ctx.param("v_min_pu", 0.95) * v_scale;
    const double v_max = ctx.param("v_max_pu", 1.05) * v_scale;
    const bool latch = ctx.param("latch_trip", 0.0) >= 0.5;

    const double voltage = bank.get(modbus::Area::holding_register, 0);
    const bool out_of_range = voltage < v_min || voltage > v_max;
    const bool tripped = bank.get(modbus::Area::coil, 0) != 0;
    bank.set(modbus::Area::coil, 0, (out_of_range || (latch && tripped)) ? 1 : 0);

    const std::uint16_t raw_command = bank.get(modbus::Area::holding_register, 2);
    if (raw_command != 0) {
        const int command = static_cast<std::int16_t>(raw_command);  // two's complement
        const int tap = static_cast<int>(bank.get(modbus::Area::holding_register, 1)) - 8;
        int target = tap + command;
        if (target < -8 || target > 8) {
            bank.set(modbus::Area::coil, 1, 1);  // clamped: raise the fault flag
            target = std::clamp(target, -8, 8);
        } else {
            bank.set(modbus::Area::coil, 1, 0);
        }
        bank.set(modbus::Area::holding_register, 3, static_cast<std::uint16_t>(target + 8));
        bank.set(modbus::Area::holding_register, 2, 0);  // consume the command
    }
}

}  // namespace icsim::scenarios
