#pragma once

#include "icsim/devices/logic.hpp"

namespace icsim::scenarios {

// Solar generation over a compressed day:
//   solar_power_w = p_max * max(0, sin(2*pi*t/day_period)) * (1 + noise),
// noise uniform in +/-noise_amp per tick. total_input_w follows the transfer
// switch: solar feed when switch_position is 1, mains_w otherwise.
class SolarPowerHil : public devices::HilLogic {
  public:
    void step(const devices::LogicContext& ctx, const std::map<std::string, double>& current,
              std::vector<std::pair<std::string, double>>& updates) override;
};

// Switches to solar at/above threshold_w and back to mains below it
// (optionally below threshold_w - hysteresis_w), edge-triggered through the
// on-change controller push.
class SolarTransferPlc : public devices::PlcLogic {
  public:
    void scan(modbus::RegisterBank& bank, const devices::LogicContext& ctx) override;
};

}  // namespace icsim::scenarios
