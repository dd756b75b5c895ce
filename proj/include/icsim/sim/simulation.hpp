#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "icsim/config/model.hpp"
#include "icsim/devices/runtime.hpp"
#include "icsim/net/fabric.hpp"
#include "icsim/world/store.hpp"

namespace icsim::sim {

enum class RunMode { lockstep, realtime };

// Deployed plant: physical store, fabric, HIL hosts and device runtimes built
// from a validated config.
//
// Lockstep mode advances a logical clock tick by tick on one thread: physics
// steps first, then device scans in config order, then the per-tick hook
// (campaign driver). Realtime mode free-runs one thread per device plus one
// for physics on wall-clock timers; timing is then nondeterministic.
class Simulation {
  public:
    using TickHook = std::function<void(Simulation&)>;

    Simulation(config::SimulationConfig config, const devices::LogicRegistry& registry,
               RunMode mode = RunMode::lockstep);

    void boot();

    // Lockstep driving.
    void step_tick();
    void run_ticks(std::uint64_t ticks, const TickHook& per_tick = {});

    // Realtime driving; per_tick runs on the caller's thread each period.
    void run_realtime(double duration_s, const TickHook& per_tick = {});

    double now_s() const { return now_.load(); }
    std::uint64_t tick() const { return tick_; }
    double tick_s() const { return tick_s_; }
    std::uint64_t ticks_for(double duration_s) const;

    world::PhysicalStore& store() { return store_; }
    net::Fabric& fabric() { return *fabric_; }
    const config::SimulationConfig& config() const { return config_; }
    devices::DeviceRuntime* device(const std::string& name);

    void load_hmi_script_file(const std::string& path);
    void load_hmi_script(std::istream& in);

    // Plain-text register view of every device plus the store.
    std::string status_snapshot() const;

  private:
    config::SimulationConfig config_;
    const devices::LogicRegistry& registry_;
    RunMode mode_;
    double tick_s_;
    std::atomic<double> now_{0.0};
    std::uint64_t tick_ = 0;

    world::PhysicalStore store_;
    std::unique_ptr<net::Fabric> fabric_;
    std::vector<std::unique_ptr<devices::HilRuntime>> hils_;
    std::vector<std::unique_ptr<devices::DeviceRuntime>> devices_;
    bool booted_ = false;
};

}  // namespace icsim::sim
