#pragma once

#include "icsim/devices/logic.hpp"

namespace icsim::scenarios {

// Transformer with an on-load tap changer:
//   voltage_pu = v_source_pu * (1 + tap_step_pu * tap_position)
// The source wanders by a seeded random walk (+/-source_walk_step per tick,
// clamped to 1 +/- source_max_dev). Autonomous tap steps of +/-1 fire at
// seeded-random intervals uniform in [min_interval_s, max_interval_s]; a
// changed tap_setpoint value overrides the position (clamped to +/-8).
class IedTransformerHil : public devices::HilLogic {
  public:
    void step(const devices::LogicContext& ctx, const std::map<std::string, double>& current,
              std::vector<std::pair<std::string, double>>& updates) override;

  private:
    bool initialized_ = false;
    double next_tap_time_s_ = 0.0;
    double last_setpoint_ = 0.0;
};

// Breaker PLC: trips while the scanned voltage is outside
// [v_min_pu, v_max_pu] and recloses when it returns (latch_trip=1 keeps it
// tripped). Accepts relative tap commands from the HMI through a writable
// register; a command that would leave +/-8 clamps and raises the fault coil.
class IedBreakerPlc : public devices::PlcLogic {
  public:
    void scan(modbus::RegisterBank& bank, const devices::LogicContext& ctx) override;
};

}  // namespace icsim::scenarios
