#pragma once

#include "icsim/devices/logic.hpp"

namespace icsim::scenarios {

// Water-bottle line physics. Tank integrates r_in_lps while the input valve
// is open and drains r_out_lps into the bottle while the output valve is
// open, clamped to [0, tank_capacity_l]. The conveyor advances the bottle by
// conveyor_speed per second up to position 1. A full bottle leaves the line:
// the outlet shuts (mechanical interlock), a fresh bottle spawns at position
// 0 and the conveyor restarts.
class BottleLineHil : public devices::HilLogic {
  public:
    void step(const devices::LogicContext& ctx, const std::map<std::string, double>& current,
              std::vector<std::pair<std::string, double>>& updates) override;
};

// Tank PLC: opens the input valve below low_l and closes it above high_l
// (band hold in between); opens the output valve only while the conveyor PLC
// asserts the in-position signal.
class BottleTankPlc : public devices::PlcLogic {
  public:
    void scan(modbus::RegisterBank& bank, const devices::LogicContext& ctx) override;
};

// Conveyor PLC: stops the belt once the bottle reaches position 1 and raises
// the in-position signal for the tank PLC.
class BottleConveyorPlc : public devices::PlcLogic {
  public:
    void scan(modbus::RegisterBank& bank, const devices::LogicContext& ctx) override;
};

}  // namespace icsim::scenarios
