#include "icsim/devices/runtime.hpp"

#include <algorithm>
#include <sstream>

#include "icsim/modbus/frame.hpp"

namespace icsim::devices {

using modbus::Area;
using modbus::FunctionCode;
using modbus::Pdu;

DeviceRuntime::DeviceRuntime(const config::DeviceConfig& config, world::PhysicalStore& store,
                             net::Fabric& fabric, world::Rng rng, double restart_delay_s)
    : config_(config),
      store_(store),
      fabric_(fabric),
      rng_(rng),
      restart_delay_s_(restart_delay_s) {}

void DeviceRuntime::boot() {
    for (const auto& reg : config_.registers) {
        for (std::uint32_t i = 0; i < reg.count; ++i) {
            bank_.configure(reg.area, static_cast<std::uint16_t>(reg.address + i), reg.initial);
        }
        if (!reg.physical_value.empty() && config_.kind == config::DeviceKind::actuator) {
            actuator_links_.push_back({&reg, reg.initial});
        }
    }
    if (config_.identity) bank_.set_identity(*config_.identity);

    for (const auto& inbound : config_.inbound_connections) {
        if (inbound.type == config::ConnectionType::tcp) {
            const std::uint8_t bound_unit = inbound.unit_id;
            auto handler = [this, bound_unit](std::uint8_t unit, const Pdu& request) {
                return serve(unit, bound_unit, false, request);
            };
            auto accepting = [this] {
                std::lock_guard lock(state_mutex_);
                return mode_ == modbus::ServerMode::normal;
            };
            server_handles_.push_back(
                fabric_.bind_server(config_.name, inbound.port, handler, accepting));
        } else {
            const std::uint8_t bound_unit = inbound.unit_id;
            fabric_.attach_bus_device(
                inbound.bus, config_.name, bound_unit,
                [this, bound_unit](bool broadcast, const Pdu& request) {
                    return serve(bound_unit, bound_unit, broadcast, request);
                });
        }
    }

    for (const auto& monitor : config_.monitors) monitors_.push_back({&monitor});
    for (const auto& controller : config_.controllers) {
        ControllerState state{&controller, std::nullopt, false};
        // Start synced to the configured initial: outputs push on change,
        // not at power-on.
        if (bank_.has(controller.local_area, controller.local_address)) {
            state.last_sent = bank_.get(controller.local_area, controller.local_address);
        }
        controllers_.push_back(state);
    }
}

void DeviceRuntime::connect_outbound(const LogicRegistry& registry) {
    for (const auto& outbound : config_.outbound_connections) {
        if (outbound.type == config::ConnectionType::tcp) {
            sessions_.emplace(outbound.name,
                              fabric_.connect(config_.name, outbound.target, outbound.port));
        }
    }
    if (!config_.logic.empty() && config_.kind == config::DeviceKind::plc) {
        logic_ = registry.make_plc(config_.logic, config_);
    }
}

std::optional<Pdu> DeviceRuntime::serve(std::uint8_t request_unit, std::uint8_t bound_unit,
                                        bool broadcast, const Pdu& request) {
    std::lock_guard lock(state_mutex_);
    if (down_until_ >= 0.0 && fabric_.now() < down_until_) return std::nullopt;
    // TCP: answer the bound unit and the "don't care" id 255.
    if (!broadcast && request_unit != bound_unit && request_unit != 255) return std::nullopt;

    auto result = modbus::execute_on_bank(request, bank_, mode_);
    if (result.control) apply_control(*result.control);
    if (mode_ == modbus::ServerMode::normal || result.control) {
        propagate_actuator_links();
    }
    if (broadcast) return std::nullopt;  // executed, never answered
    return result.response;
}

void DeviceRuntime::apply_control(modbus::DeviceControl control) {
    switch (control) {
        case modbus::DeviceControl::force_listen_only:
            mode_ = modbus::ServerMode::listen_only;
            break;
        case modbus::DeviceControl::restart_communications: {
            mode_ = modbus::ServerMode::normal;
            total_monitor_failures_ = 0;
            for (auto& monitor : monitors_) monitor.failures = 0;
            down_until_ = fabric_.now() + restart_delay_s_;
            servers_open_ = false;
            for (const auto& handle : server_handles_) {
                fabric_.set_server_open(handle, false);
            }
            break;
        }
    }
}

void DeviceRuntime::reopen_servers_if_due(double now_s) {
    std::lock_guard lock(state_mutex_);
    if (!servers_open_ && (down_until_ < 0.0 || now_s >= down_until_)) {
        servers_open_ = true;
        down_until_ = -1.0;
        for (const auto& handle : server_handles_) fabric_.set_server_open(handle, true);
    }
}

void DeviceRuntime::propagate_actuator_links() {
    // Edge-propagation: a Modbus write to a linked register lands in the
    // store within the same cycle; unchanged registers never re-assert, so a
    // physics-side override is not fought.
    for (auto& link : actuator_links_) {
        const std::uint16_t word = bank_.get(link.decl->area, link.decl->address);
        if (word != link.last_pushed) {
            link.last_pushed = word;
            try {
                store_.write(link.decl->physical_value,
                             config::decode_physical(word, link.decl->scale,
                                                     link.decl->offset),
                             world::WriterRole::actuator, fabric_.now());
            } catch (const world::UnknownPhysicalValue&) {
                degraded_ = true;  // bank stays authoritative, link is dead
            }
        }
    }
}

void DeviceRuntime::refresh_sensor_links() {
    std::lock_guard lock(state_mutex_);
    for (const auto& reg : config_.registers) {
        if (reg.physical_value.empty()) continue;
        try {
            const double value = store_.read(reg.physical_value);
            bank_.set(reg.area, reg.address,
                      config::encode_physical(value, reg.scale, reg.offset));
        } catch (const world::UnknownPhysicalValue&) {
            degraded_ = true;  // serve stale values
        }
    }
}

void DeviceRuntime::run_monitors(const DeviceClock& clock) {
    for (auto& monitor : monitors_) {
        const auto& decl = *monitor.decl;
        if (clock.tick % decl.period_ticks != 0) continue;

        Pdu request;
        switch (decl.remote_area) {
            case Area::coil:
                request.function_code = static_cast<std::uint8_t>(FunctionCode::read_coils);
                break;
            case Area::discrete_input:
                request.function_code =
                    static_cast<std::uint8_t>(FunctionCode::read_discrete_inputs);
                break;
            case Area::holding_register:
                request.function_code =
                    static_cast<std::uint8_t>(FunctionCode::read_holding_registers);
                break;
            case Area::input_register:
                request.function_code =
                    static_cast<std::uint8_t>(FunctionCode::read_input_registers);
                break;
        }
        modbus::put_u16(request.data, decl.remote_address);
        modbus::put_u16(request.data, decl.count);

        const auto response = transact(decl.connection, request);
        const std::size_t expected_bytes =
            1 + (modbus::is_bit_area(decl.remote_area) ? (decl.count + 7u) / 8u
                                                       : 2u * decl.count);
        if (!response || response->is_exception() || response->data.size() < expected_bytes) {
            std::lock_guard lock(state_mutex_);
            ++monitor.failures;
            ++total_monitor_failures_;
            continue;  // hold last value
        }

        std::lock_guard lock(state_mutex_);
        if (modbus::is_bit_area(decl.remote_area)) {
            for (std::uint16_t i = 0; i < decl.count; ++i) {
                const bool on = (response->data[1 + i / 8] >> (i % 8)) & 1;
                bank_.set(decl.local_area, static_cast<std::uint16_t>(decl.local_address + i),
                          on ? 1 : 0);
            }
        } else {
            for (std::uint16_t i = 0; i < decl.count; ++i) {
                bank_.set(decl.local_area, static_cast<std::uint16_t>(decl.local_address + i),
                          modbus::get_u16(response->data, 1 + 2u * i));
            }
        }
    }
}

void DeviceRuntime::run_logic(const DeviceClock& clock) {
    if (!logic_) return;
    std::lock_guard lock(state_mutex_);
    LogicContext ctx{rng_, clock.now_s, clock.tick_s, config_.params};
    logic_->scan(bank_, ctx);
}

void DeviceRuntime::run_controllers() {
    for (auto& controller : controllers_) {
        const auto& decl = *controller.decl;
        std::uint16_t current;
        {
            std::lock_guard lock(state_mutex_);
            current = bank_.get(decl.local_area, decl.local_address);
        }
        const bool due = controller.force_fire || !controller.last_sent.has_value() ||
                         *controller.last_sent != current;
        if (!due) continue;

        Pdu request;
        if (decl.remote_area == Area::coil) {
            request.function_code = static_cast<std::uint8_t>(FunctionCode::write_single_coil);
            modbus::put_u16(request.data, decl.remote_address);
            modbus::put_u16(request.data, current != 0 ? 0xFF00 : 0x0000);
        } else {
            request.function_code =
                static_cast<std::uint8_t>(FunctionCode::write_single_register);
            modbus::put_u16(request.data, decl.remote_address);
            modbus::put_u16(request.data, current);
        }

        const auto response = transact(decl.connection, request);
        if (response) {
            // Delivered (possibly rejected in-band); stop repeating.
            controller.last_sent = current;
            controller.force_fire = false;
        }
        // Timeout: retry next cycle with the then-current value.
    }
}

std::optional<Pdu> DeviceRuntime::transact(const std::string& connection, const Pdu& request) {
    const config::OutboundConnection* decl = nullptr;
    for (const auto& outbound : config_.outbound_connections) {
        if (outbound.name == connection) {
            decl = &outbound;
            break;
        }
    }
    if (!decl) return std::nullopt;

    if (decl->type == config::ConnectionType::tcp) {
        auto it = sessions_.find(connection);
        if (it == sessions_.end()) return std::nullopt;
        return it->second.transact(decl->unit_id, request);
    }

    modbus::RtuAdu adu{decl->serial_unit, request};
    const auto result = fabric_.bus_transact(decl->bus, config_.name, adu);
    if (!result.response) return std::nullopt;
    return result.response->pdu;
}

void DeviceRuntime::run_commands(const DeviceClock& clock) {
    while (!commands_.empty() && commands_.front().due_s <= clock.now_s) {
        const HmiCommand command = commands_.front();
        commands_.pop_front();
        for (auto& controller : controllers_) {
            if (controller.decl->name != command.controller) continue;
            {
                std::lock_guard lock(state_mutex_);
                bank_.set(controller.decl->local_area, controller.decl->local_address,
                          command.value);
            }
            controller.force_fire = true;
        }
    }
}

void DeviceRuntime::enqueue_command(const HmiCommand& command) {
    commands_.push_back(command);
    std::stable_sort(commands_.begin(), commands_.end(),
                     [](const HmiCommand& a, const HmiCommand& b) { return a.due_s < b.due_s; });
}

void DeviceRuntime::scan(const DeviceClock& clock) {
    reopen_servers_if_due(clock.now_s);
    {
        std::lock_guard lock(state_mutex_);
        if (down_until_ >= 0.0 && clock.now_s < down_until_) return;  // restarting
    }

    switch (config_.kind) {
        case config::DeviceKind::sensor:
            refresh_sensor_links();
            break;
        case config::DeviceKind::actuator:
            // Bank serving and store propagation both happen on the serve
            // path; nothing periodic to do.
            break;
        case config::DeviceKind::plc:
            run_monitors(clock);
            run_logic(clock);
            run_controllers();
            break;
        case config::DeviceKind::hmi:
            run_commands(clock);
            run_monitors(clock);
            run_controllers();
            break;
        case config::DeviceKind::hil:
            break;  // stepped by the scheduler, not scanned
    }
}

modbus::ServerMode DeviceRuntime::mode() const {
    std::lock_guard lock(state_mutex_);
    return mode_;
}

bool DeviceRuntime::is_down(double now_s) const {
    std::lock_guard lock(state_mutex_);
    return down_until_ >= 0.0 && now_s < down_until_;
}

std::uint64_t DeviceRuntime::monitor_failures() const {
    std::lock_guard lock(state_mutex_);
    return total_monitor_failures_;
}

std::uint16_t DeviceRuntime::read_register(modbus::Area area, std::uint16_t address) const {
    std::lock_guard lock(state_mutex_);
    return bank_.get(area, address);
}

std::string DeviceRuntime::dump_registers() const {
    std::lock_guard lock(state_mutex_);
    std::ostringstream out;
    out << config_.name << " (" << config::kind_name(config_.kind) << ")"
        << (mode_ == modbus::ServerMode::listen_only ? " [listen-only]" : "") << "\n";
    auto dump_words = [&](const char* label, const auto& map) {
        if (map.empty()) return;
        out << "  " << label << ":";
        for (const auto& [address, value] : map) {
            out << " " << address << "=" << static_cast<unsigned>(value);
        }
        out << "\n";
    };
    dump_words("coils", bank_.coils());
    dump_words("discrete_inputs", bank_.discrete_inputs());
    dump_words("holding_registers", bank_.holding_registers());
    dump_words("input_registers", bank_.input_registers());
    return out.str();
}

void HilRuntime::step(world::PhysicalStore& store, double dt_s) {
    if (dt_s <= 0.0) throw std::invalid_argument("hil step needs dt > 0");
    sim_time_s_ += dt_s;
    LogicContext ctx{rng_, sim_time_s_, dt_s, config_.params};
    const auto current = store.snapshot();
    std::vector<std::pair<std::string, double>> updates;
    logic_->step(ctx, current, updates);
    if (!updates.empty()) {
        store.apply_batch(updates, world::WriterRole::hil, sim_time_s_);
    }
}

}  // namespace icsim::devices
