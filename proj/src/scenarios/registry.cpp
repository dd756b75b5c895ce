#include "icsim/scenarios/registry.hpp"

#include "icsim/scenarios/bottle.hpp"
#include "icsim/scenarios/ied.hpp"
#include "icsim/scenarios/solar.hpp"

namespace icsim::scenarios {

const devices::LogicRegistry& builtin_registry() {
    static const devices::LogicRegistry registry = [] {
        devices::LogicRegistry r;
        r.add_hil("solar_power",
                  [](const config::DeviceConfig&) { return std::make_unique<SolarPowerHil>(); });
        r.add_plc("solar_transfer_plc", [](const config::DeviceConfig&) {
            return std::make_unique<SolarTransferPlc>();
        });
        r.add_hil("bottle_line",
                  [](const config::DeviceConfig&) { return std::make_unique<BottleLineHil>(); });
        r.add_plc("bottle_tank_plc", [](const config::DeviceConfig&) {
            return std::make_unique<BottleTankPlc>();
        });
        r.add_plc("bottle_conveyor_plc", [](const config::DeviceConfig&) {
            return std::make_unique<BottleConveyorPlc>();
        });
        r.add_hil("ied_transformer", [](const config::DeviceConfig&) {
            return std::make_unique<IedTransformerHil>();
        });
        r.add_plc("ied_breaker_plc", [](const config::DeviceConfig&) {
            return std::make_unique<IedBreakerPlc>();
        });
        return r;
    }();
    return registry;
}

}  // namespace icsim::scenarios
