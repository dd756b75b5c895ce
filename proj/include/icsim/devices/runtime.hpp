#pragma once

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "icsim/config/model.hpp"
#include "icsim/devices/logic.hpp"
#include "icsim/modbus/server.hpp"
#include "icsim/net/fabric.hpp"
#include "icsim/world/store.hpp"

namespace icsim::devices {

struct DeviceClock {
    double now_s = 0.0;
    std::uint64_t tick = 0;
    double tick_s = 0.1;
};

// Manual command destined for an HMI controller; scripted or CLI-injected.
struct HmiCommand {
    double due_s = 0.0;
    std::string controller;  // controller name on the HMI
    std::uint16_t value = 0;
};

// One simulated component: owns its register bank, serves its inbound
// connections, and runs its scan cycle. Inbound serving and the scan cycle
// serialize over the device's state mutex; cross-device interaction is
// message-passing through the fabric only.
class DeviceRuntime {
  public:
    DeviceRuntime(const config::DeviceConfig& config, world::PhysicalStore& store,
                  net::Fabric& fabric, world::Rng rng, double restart_delay_s);

    // Configure bank and bind inbound endpoints.
    void boot();
    // Establish outbound sessions; run after every device has booted.
    void connect_outbound(const LogicRegistry& registry);

    // One scan cycle: read monitors -> run logic -> write controllers.
    // Serving happens synchronously on the fabric, so no phase-4 backlog.
    void scan(const DeviceClock& clock);

    void enqueue_command(const HmiCommand& command);

    const config::DeviceConfig& config() const { return config_; }
    modbus::ServerMode mode() const;
    bool is_down(double now_s) const;
    std::uint64_t monitor_failures() const;
    bool degraded() const { return degraded_; }
    std::uint16_t read_register(modbus::Area area, std::uint16_t address) const;
    std::string dump_registers() const;

  private:
    std::optional<modbus::Pdu> serve(std::uint8_t request_unit, std::uint8_t bound_unit,
                                     bool broadcast, const modbus::Pdu& request);
    std::optional<modbus::Pdu> transact(const std::string& connection,
                                        const modbus::Pdu& request);
    void apply_control(modbus::DeviceControl control);
    void propagate_actuator_links();
    void refresh_sensor_links();
    void run_monitors(const DeviceClock& clock);
    void run_logic(const DeviceClock& clock);
    void run_controllers();
    void run_commands(const DeviceClock& clock);
    void reopen_servers_if_due(double now_s);

    const config::DeviceConfig& config_;
    world::PhysicalStore& store_;
    net::Fabric& fabric_;
    world::Rng rng_;
    const double restart_delay_s_;

    mutable std::mutex state_mutex_;
    modbus::RegisterBank bank_;
    modbus::ServerMode mode_ = modbus::ServerMode::normal;
    double down_until_ = -1.0;
    bool servers_open_ = true;
    bool degraded_ = false;

    std::vector<net::Fabric::ServerHandle> server_handles_;
    std::map<std::string, net::Fabric::Session> sessions_;  // by connection name
    std::unique_ptr<PlcLogic> logic_;

    struct MonitorState {
        const config::MonitorDecl* decl;
        std::uint64_t failures = 0;
    };
    struct ControllerState {
        const config::ControllerDecl* decl;
        std::optional<std::uint16_t> last_sent;
        bool force_fire = false;
    };
    struct LinkState {
        const config::RegisterDecl* decl;
        std::uint16_t last_pushed = 0;
    };

    std::vector<MonitorState> monitors_;
    std::vector<ControllerState> controllers_;
    std::vector<LinkState> actuator_links_;
    std::uint64_t total_monitor_failures_ = 0;

    std::deque<HmiCommand> commands_;
};

// HIL host: advances the physics at the global tick and commits the update
// atomically. Identical (seed, tick sequence) gives identical trajectories.
class HilRuntime {
  public:
    HilRuntime(const config::DeviceConfig& config, world::Rng rng)
        : config_(config), rng_(rng) {}

    void bind_logic(const LogicRegistry& registry) {
        logic_ = registry.make_hil(config_.logic, config_);
    }

    void step(world::PhysicalStore& store, double dt_s);

    double sim_time_s() const { return sim_time_s_; }
    const config::DeviceConfig& config() const { return config_; }

  private:
    const config::DeviceConfig& config_;
    world::Rng rng_;
    std::unique_ptr<HilLogic> logic_;
    double sim_time_s_ = 0.0;
};

}  // namespace icsim::devices
