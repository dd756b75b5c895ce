#pragma once

#include "icsim/devices/logic.hpp"

namespace icsim::scenarios {

// Logic shipped with the three preconfigured plants:
//   solar_power          (HIL)  sine-of-day solar generation with noise
//   solar_transfer_plc   (PLC)  threshold comparison driving the switch
//   bottle_line          (HIL)  tank, valves, conveyor, bottle fill
//   bottle_tank_plc      (PLC)  level band control + fill interlock
//   bottle_conveyor_plc  (PLC)  stop-at-position + in-position signal
//   ied_transformer      (HIL)  tap changer, source wander, voltage law
//   ied_breaker_plc      (PLC)  range trip/reclose + tap commands
const devices::LogicRegistry& builtin_registry();

}  // namespace icsim::scenarios
