#include "icsim/scenarios/solar.hpp"

#include <cmath>

namespace icsim::scenarios {

void SolarPowerHil::step(const devices::LogicContext& ctx,
                         const std::map<std::string, double>& current,
                         std::vector<std::pair<std::string, double>>& updates) {
    const double p_max = ctx.param("p_max_w", 2000.0);
    const double day_period = ctx.param("day_period_s", 120.0);
    const double noise_amp = ctx.param("noise_amp", 0.05);
    const double mains = ctx.param("mains_w", 1200.0);

    const double phase = 2.0 * M_PI * ctx.sim_time_s / day_period;
    const double clear_sky = p_max * std::max(0.0, std::sin(phase));
    const double noise = ctx.rng.uniform(-noise_amp, noise_amp);
    const double solar = clear_sky * (1.0 + noise);

    const bool on_solar = current.at("switch_position") >= 0.5;
    updates.emplace_back("solar_power_w", solar);
    updates.emplace_back("total_input_w", on_solar ? solar : mains);
}

void SolarTransferPlc::scan(modbus::RegisterBank& bank, const devices::LogicContext& ctx) {
    // holding 0: monitored solar power (W); coil 0: desired switch position
    // (1 = solar). The controller phase pushes coil 0 on change only.
    // hysteresis_w widens the fall-back edge to threshold - hysteresis;
    // at the default 0 the switch tracks the bare threshold predicate.
    const double threshold = ctx.param("threshold_w", 800.0);
    const double hysteresis = ctx.param("hysteresis_w", 0.0);
    const double power = bank.get(modbus::Area::holding_register, 0);
    const bool on_solar = bank.get(modbus::Area::coil, 0) != 0;
    bool want_solar = on_solar;
    if (power >= threshold) {
        want_solar = true;
    } else if (power < threshold - hysteresis) {
        want_solar = false;
    }
    bank.set(modbus::Area::coil, 0, want_solar ? 1 : 0);
}

}  // namespace icsim::scenarios
