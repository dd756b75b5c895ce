#include "icsim/config/validate.hpp"

#include <map>
#include <utility>

#include "icsim/modbus/server.hpp"

namespace icsim::config {

const char* violation_kind_name(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::duplicate_name: return "DuplicateName";
        case ViolationKind::dangling_reference: return "DanglingReference";
        case ViolationKind::duplicate_endpoint: return "DuplicateEndpoint";
        case ViolationKind::unit_id_collision: return "UnitIdCollision";
        case ViolationKind::multiple_bus_masters: return "MultipleBusMasters";
        case ViolationKind::writable_area_violation: return "WritableAreaViolation";
        case ViolationKind::purdue_violation: return "PurdueViolation";
        case ViolationKind::unknown_logic: return "UnknownLogic";
        case ViolationKind::register_overlap: return "RegisterOverlap";
        case ViolationKind::unknown_physical_value: return "UnknownPhysicalValue";
        case ViolationKind::duplicate_physical_value: return "DuplicatePhysicalValue";
        case ViolationKind::bad_value: return "BadValue";
    }
    return "?";
}

std::string Violation::to_string() const {
    std::string out = violation_kind_name(kind);
    out += " [";
    out += device.empty() ? "<global>" : device;
    out += " @ ";
    out += key_path;
    out += "]: ";
    out += message;
    return out;
}

namespace {

class Checker {
  public:
    Checker(const SimulationConfig& config, const std::set<std::string>* known_logic)
        : config_(config), known_logic_(known_logic) {}

    std::vector<Violation> run() {
        collect_names();
        check_globals();
        for (std::size_t i = 0; i < config_.devices.size(); ++i) {
            check_device(config_.devices[i], "devices[" + std::to_string(i) + "]");
        }
        check_attackers();
        check_buses();
        check_endpoints();
        return std::move(violations_);
    }

  private:
    void add(ViolationKind kind, const std::string& device, const std::string& path,
             const std::string& message) {
        violations_.push_back({kind, device, path, message});
    }

    void collect_names() {
        for (const auto& network : config_.networks) networks_.insert(network.name);
        for (const auto& bus : config_.serial_buses) buses_.insert(bus.name);
        for (const auto& device : config_.devices) {
            if (!device_names_.insert(device.name).second) {
                add(ViolationKind::duplicate_name, device.name, "devices[].name",
                    "device name \"" + device.name + "\" declared more than once");
            }
        }
        // Physical value declarations (HIL only; parser enforces the kind).
        for (const auto& device : config_.devices) {
            for (const auto& pv : device.physical_values) {
                auto [it, inserted] = physical_values_.emplace(pv.name, device.name);
                if (!inserted) {
                    add(ViolationKind::duplicate_physical_value, device.name,
                        "physical_values", "\"" + pv.name + "\" already declared by " +
                                              it->second);
                }
            }
        }
    }

    void check_globals() {
        if (config_.tick_ms == 0) {
            add(ViolationKind::bad_value, "", "tick_ms", "tick_ms must be positive");
        }
    }

    const OutboundConnection* find_connection(const DeviceConfig& device,
                                              const std::string& name) const {
        for (const auto& conn : device.outbound_connections) {
            if (conn.name == name) return &conn;
        }
        return nullptr;
    }

    // Resolves the device a connection points at: the TCP target, or the
    // device holding the addressed unit id on the serial bus.
    const DeviceConfig* resolve_target(const OutboundConnection& conn) const {
        if (conn.type == ConnectionType::tcp) {
            return config_.find_device(conn.target);
        }
        for (const auto& device : config_.devices) {
            for (const auto& inbound : device.inbound_connections) {
                if (inbound.type == ConnectionType::serial && inbound.bus == conn.bus &&
                    inbound.unit_id == conn.serial_unit) {
                    return &device;
                }
            }
        }
        return nullptr;
    }

    static bool declares_register(const DeviceConfig& device, modbus::Area area,
                                  std::uint16_t address, std::uint16_t count) {
        for (std::uint32_t a = address; a < std::uint32_t(address) + count; ++a) {
            bool found = false;
            for (const auto& reg : device.registers) {
                if (reg.area == area && a >= reg.address &&
                    a < std::uint32_t(reg.address) + reg.count) {
                    found = true;
                    break;
                }
            }
            if (!found) return false;
        }
        return true;
    }

    void check_device(const DeviceConfig& device, const std::string& base) {
        if (device.network && networks_.count(device.network->network) == 0) {
            add(ViolationKind::dangling_reference, device.name, base + ".network.name",
                "network \"" + device.network->network + "\" is not declared");
        }

        // Layering: field devices are pure servers, HMIs pure clients.
        if ((device.kind == DeviceKind::sensor || device.kind == DeviceKind::actuator) &&
            !device.outbound_connections.empty()) {
            add(ViolationKind::purdue_violation, device.name, base + ".outbound_connections",
                "field devices must not hold outbound client connections");
        }
        if (device.kind == DeviceKind::hmi && !device.inbound_connections.empty()) {
            add(ViolationKind::purdue_violation, device.name, base + ".inbound_connections",
                "HMIs must not expose inbound servers");
        }

        check_inbound(device, base);
        check_outbound(device, base);
        check_registers(device, base);
        check_monitors(device, base);
        check_controllers(device, base);

        if (!device.logic.empty() && known_logic_ && known_logic_->count(device.logic) == 0) {
            add(ViolationKind::unknown_logic, device.name, base + ".logic",
                "logic \"" + device.logic + "\" is not registered");
        }
        if (device.kind == DeviceKind::hil && device.logic.empty()) {
            add(ViolationKind::bad_value, device.name, base + ".logic",
                "HIL devices need a logic identifier");
        }
    }

    void check_inbound(const DeviceConfig& device, const std::string& base) {
        std::size_t index = 0;
        for (const auto& conn : device.inbound_connections) {
            const std::string path = base + ".inbound_connections[" + std::to_string(index) + "]";
            if (conn.type == ConnectionType::tcp) {
                if (!device.network) {
                    add(ViolationKind::dangling_reference, device.name, path,
                        "tcp server on a device without a network attachment");
                }
            } else {
                if (buses_.count(conn.bus) == 0) {
                    add(ViolationKind::dangling_reference, device.name, path + ".bus",
                        "serial bus \"" + conn.bus + "\" is not declared");
                }
                if (conn.unit_id < 1 || conn.unit_id > 247) {
                    add(ViolationKind::bad_value, device.name, path + ".unit_id",
                        "serial unit id must be 1-247");
                }
            }
            ++index;
        }
    }

    void check_outbound(const DeviceConfig& device, const std::string& base) {
        std::set<std::string> names;
        std::size_t index = 0;
        for (const auto& conn : device.outbound_connections) {
            const std::string path =
                base + ".outbound_connections[" + std::to_string(index) + "]";
            if (!names.insert(conn.name).second) {
                add(ViolationKind::duplicate_name, device.name, path + ".name",
                    "connection name \"" + conn.name + "\" reused");
            }
            if (conn.type == ConnectionType::tcp) {
                const DeviceConfig* target = config_.find_device(conn.target);
                if (!target) {
                    add(ViolationKind::dangling_reference, device.name, path + ".target",
                        "target device \"" + conn.target + "\" does not exist");
                } else {
                    // Reachability: client and server must share a network.
                    const bool shared = device.network && target->network &&
                                        device.network->network == target->network->network;
                    if (!shared) {
                        add(ViolationKind::dangling_reference, device.name, path + ".target",
                            "no shared network with \"" + conn.target + "\"");
                    }
                    bool has_port = false;
                    for (const auto& inbound : target->inbound_connections) {
                        if (inbound.type == ConnectionType::tcp && inbound.port == conn.port) {
                            has_port = true;
                        }
                    }
                    if (!has_port) {
                        add(ViolationKind::dangling_reference, device.name, path + ".port",
                            "\"" + conn.target + "\" has no tcp server on port " +
                                std::to_string(conn.port));
                    }
                }
            } else {
                if (buses_.count(conn.bus) == 0) {
                    add(ViolationKind::dangling_reference, device.name, path + ".bus",
                        "serial bus \"" + conn.bus + "\" is not declared");
                } else if (!resolve_target(conn)) {
                    add(ViolationKind::dangling_reference, device.name, path + ".unit_id",
                        "no device answers unit " + std::to_string(conn.serial_unit) +
                            " on bus \"" + conn.bus + "\"");
                }
            }
            ++index;
        }
    }

    void check_registers(const DeviceConfig& device, const std::string& base) {
        std::size_t index = 0;
        for (const auto& reg : device.registers) {
            const std::string path = base + ".registers[" + std::to_string(index) + "]";
            if (reg.count == 0) {
                add(ViolationKind::bad_value, device.name, path + ".count",
                    "register count must be positive");
            }
            if (std::uint32_t(reg.address) + reg.count > 0x10000) {
                add(ViolationKind::bad_value, device.name, path + ".address",
                    "register block runs past address 65535");
            }
            if (reg.scale == 0.0) {
                add(ViolationKind::bad_value, device.name, path + ".scale",
                    "scale must be non-zero");
            }
            // Overlap with earlier declarations in the same area.
            for (std::size_t j = 0; j < index; ++j) {
                const auto& other = device.registers[j];
                if (other.area != reg.area) continue;
                const bool disjoint = std::uint32_t(reg.address) + reg.count <= other.address ||
                                      std::uint32_t(other.address) + other.count <= reg.address;
                if (!disjoint) {
                    add(ViolationKind::register_overlap, device.name, path,
                        "overlaps registers[" + std::to_string(j) + "]");
                }
            }
            if (!reg.physical_value.empty()) {
                if (physical_values_.count(reg.physical_value) == 0) {
                    add(ViolationKind::unknown_physical_value, device.name,
                        path + ".physical_value",
                        "\"" + reg.physical_value + "\" is not declared by any HIL");
                }
                if (reg.count != 1) {
                    add(ViolationKind::bad_value, device.name, path + ".count",
                        "a store-linked register maps one word; count must be 1");
                }
                if (device.kind == DeviceKind::sensor && modbus::is_modbus_writable(reg.area)) {
                    add(ViolationKind::writable_area_violation, device.name, path + ".area",
                        "sensor links must use read-only areas");
                }
                if (device.kind == DeviceKind::actuator &&
                    !modbus::is_modbus_writable(reg.area)) {
                    add(ViolationKind::writable_area_violation, device.name, path + ".area",
                        "actuator links must use writable areas");
                }
            }
            ++index;
        }
    }

    void check_monitors(const DeviceConfig& device, const std::string& base) {
        std::size_t index = 0;
        for (const auto& monitor : device.monitors) {
            const std::string path = base + ".monitors[" + std::to_string(index) + "]";
            if (monitor.count == 0 ||
                monitor.count > (modbus::is_bit_area(monitor.remote_area)
                                     ? modbus::max_read_bits
                                     : modbus::max_read_words)) {
                add(ViolationKind::bad_value, device.name, path + ".count",
                    "monitor count outside protocol limits");
            }
            if (monitor.period_ticks == 0) {
                add(ViolationKind::bad_value, device.name, path + ".period_ticks",
                    "period must be at least one tick");
            }
            const OutboundConnection* conn = find_connection(device, monitor.connection);
            if (!conn) {
                add(ViolationKind::dangling_reference, device.name, path + ".connection",
                    "no outbound connection named \"" + monitor.connection + "\"");
            } else if (const DeviceConfig* target = resolve_target(*conn)) {
                if (!declares_register(*target, monitor.remote_area, monitor.remote_address,
                                       monitor.count)) {
                    add(ViolationKind::dangling_reference, device.name, path + ".remote_address",
                        "\"" + target->name + "\" does not declare " +
                            modbus::area_name(monitor.remote_area) + " " +
                            std::to_string(monitor.remote_address) + "+" +
                            std::to_string(monitor.count));
                }
            }
            if (!declares_register(device, monitor.local_area, monitor.local_address,
                                   monitor.count)) {
                add(ViolationKind::dangling_reference, device.name, path + ".local_address",
                    "local mirror registers are not declared");
            }
            ++index;
        }
    }

    void check_controllers(const DeviceConfig& device, const std::string& base) {
        std::size_t index = 0;
        for (const auto& controller : device.controllers) {
            const std::string path = base + ".controllers[" + std::to_string(index) + "]";
            if (!modbus::is_modbus_writable(controller.remote_area)) {
                add(ViolationKind::writable_area_violation, device.name, path + ".remote_area",
                    "controller target area is not writable over the wire");
            }
            const OutboundConnection* conn = find_connection(device, controller.connection);
            if (!conn) {
                add(ViolationKind::dangling_reference, device.name, path + ".connection",
                    "no outbound connection named \"" + controller.connection + "\"");
            } else if (const DeviceConfig* target = resolve_target(*conn)) {
                if (!declares_register(*target, controller.remote_area,
                                       controller.remote_address, 1)) {
                    add(ViolationKind::dangling_reference, device.name, path + ".remote_address",
                        "\"" + target->name + "\" does not declare " +
                            modbus::area_name(controller.remote_area) + " " +
                            std::to_string(controller.remote_address));
                }
            }
            if (!declares_register(device, controller.local_area, controller.local_address, 1)) {
                add(ViolationKind::dangling_reference, device.name, path + ".local_address",
                    "local source register is not declared");
            }
            ++index;
        }
    }

    void check_attackers() {
        std::size_t index = 0;
        for (const auto& attacker : config_.attackers) {
            const std::string base = "attackers[" + std::to_string(index) + "]";
            if (device_names_.count(attacker.name) != 0 ||
                !attacker_names_.insert(attacker.name).second) {
                add(ViolationKind::duplicate_name, attacker.name, base + ".name",
                    "attacker name collides with another endpoint");
            }
            for (const auto& attachment : attacker.networks) {
                if (networks_.count(attachment.network) == 0) {
                    add(ViolationKind::dangling_reference, attacker.name, base + ".networks",
                        "network \"" + attachment.network + "\" is not declared");
                }
            }
            for (const auto& bus : attacker.buses) {
                if (buses_.count(bus) == 0) {
                    add(ViolationKind::dangling_reference, attacker.name, base + ".buses",
                        "serial bus \"" + bus + "\" is not declared");
                }
            }
            ++index;
        }
    }

    void check_buses() {
        // Unit-id uniqueness and single-master per bus.
        std::map<std::string, std::map<std::uint8_t, std::string>> units;
        std::map<std::string, std::vector<std::string>> masters;
        for (const auto& device : config_.devices) {
            for (const auto& inbound : device.inbound_connections) {
                if (inbound.type != ConnectionType::serial) continue;
                auto [it, inserted] =
                    units[inbound.bus].emplace(inbound.unit_id, device.name);
                if (!inserted) {
                    add(ViolationKind::unit_id_collision, device.name, "inbound_connections",
                        "unit " + std::to_string(inbound.unit_id) + " on bus \"" + inbound.bus +
                            "\" already taken by " + it->second);
                }
            }
            for (const auto& outbound : device.outbound_connections) {
                if (outbound.type != ConnectionType::serial) continue;
                auto& list = masters[outbound.bus];
                if (list.empty() || list.back() != device.name) list.push_back(device.name);
            }
        }
        for (const auto& [bus, list] : masters) {
            if (list.size() > 1) {
                add(ViolationKind::multiple_bus_masters, list[1], "outbound_connections",
                    "bus \"" + bus + "\" already mastered by " + list[0]);
            }
        }
    }

    void check_endpoints() {
        // (network, ip) unique across devices and attackers; (device, port)
        // unique per device.
        std::map<std::pair<std::string, std::string>, std::string> addresses;
        auto claim = [&](const NetworkAttachment& attachment, const std::string& owner) {
            auto [it, inserted] =
                addresses.emplace(std::make_pair(attachment.network, attachment.ip), owner);
            if (!inserted && it->second != owner) {
                add(ViolationKind::duplicate_endpoint, owner, "network.ip",
                    attachment.ip + " on \"" + attachment.network + "\" already taken by " +
                        it->second);
            }
        };
        for (const auto& device : config_.devices) {
            if (device.network) claim(*device.network, device.name);
            std::set<std::uint16_t> ports;
            for (const auto& inbound : device.inbound_connections) {
                if (inbound.type == ConnectionType::tcp && !ports.insert(inbound.port).second) {
                    add(ViolationKind::duplicate_endpoint, device.name, "inbound_connections",
                        "port " + std::to_string(inbound.port) + " bound twice");
                }
            }
        }
        for (const auto& attacker : config_.attackers) {
            for (const auto& attachment : attacker.networks) claim(attachment, attacker.name);
        }
    }

    const SimulationConfig& config_;
    const std::set<std::string>* known_logic_;
    std::vector<Violation> violations_;
    std::set<std::string> networks_;
    std::set<std::string> buses_;
    std::set<std::string> device_names_;
    std::set<std::string> attacker_names_;
    std::map<std::string, std::string> physical_values_;  // name -> declaring HIL
};

}  // namespace

std::vector<Violation> validate(const SimulationConfig& config,
                                const std::set<std::string>* known_logic) {
    return Checker(config, known_logic).run();
}

}  // namespace icsim::config
