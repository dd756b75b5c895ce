#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "icsim/modbus/bank.hpp"

namespace icsim::config {

enum class DeviceKind {
    hmi,
    plc,
    sensor,
    actuator,
    hil,
};

const char* kind_name(DeviceKind kind);
std::optional<DeviceKind> kind_from_name(const std::string& name);

struct NetworkDef {
    std::string name;
    std::string subnet;  // descriptive label, e.g. "10.0.1.0/24"

    bool operator==(const NetworkDef&) const = default;
};

struct BusDef {
    std::string name;

    bool operator==(const BusDef&) const = default;
};

struct NetworkAttachment {
    std::string network;
    std::string ip;

    bool operator==(const NetworkAttachment&) const = default;
};

enum class ConnectionType {
    tcp,
    serial,
};

struct InboundConnection {
    ConnectionType type = ConnectionType::tcp;
    // tcp
    std::uint16_t port = 502;
    std::uint8_t unit_id = 1;  // also the unit answered on tcp (255 = don't care)
    // serial
    std::string bus;

    bool operator==(const InboundConnection&) const = default;
};

struct OutboundConnection {
    std::string name;
    ConnectionType type = ConnectionType::tcp;
    // tcp
    std::string target;  // device name
    std::uint16_t port = 502;
    std::uint8_t unit_id = 255;
    // serial
    std::string bus;
    std::uint8_t serial_unit = 0;  // unit addressed on the bus

    bool operator==(const OutboundConnection&) const = default;
};

struct RegisterDecl {
    modbus::Area area = modbus::Area::holding_register;
    std::uint16_t address = 0;
    std::uint16_t count = 1;
    std::uint16_t initial = 0;
    // Optional link into the physical store (sensors read, actuators write).
    std::string physical_value;
    // word = trunc(physical * scale + offset), clamped to [0, 65535];
    // actuators invert: physical = (word - offset) / scale.
    double scale = 1.0;
    double offset = 0.0;

    bool operator==(const RegisterDecl&) const = default;
};

struct MonitorDecl {
    std::string name;
    std::string connection;
    modbus::Area remote_area = modbus::Area::input_register;
    std::uint16_t remote_address = 0;
    std::uint16_t count = 1;
    modbus::Area local_area = modbus::Area::holding_register;
    std::uint16_t local_address = 0;
    std::uint32_t period_ticks = 1;

    bool operator==(const MonitorDecl&) const = default;
};

struct ControllerDecl {
    std::string name;
    std::string connection;
    modbus::Area remote_area = modbus::Area::coil;
    std::uint16_t remote_address = 0;
    modbus::Area local_area = modbus::Area::coil;
    std::uint16_t local_address = 0;

    bool operator==(const ControllerDecl&) const = default;
};

struct PhysicalValueDecl {
    std::string name;
    double initial = 0.0;

    bool operator==(const PhysicalValueDecl&) const = default;
};

struct DeviceConfig {
    std::string name;
    DeviceKind kind = DeviceKind::sensor;
    std::optional<NetworkAttachment> network;
    std::vector<InboundConnection> inbound_connections;
    std::vector<OutboundConnection> outbound_connections;
    std::vector<RegisterDecl> registers;
    std::vector<MonitorDecl> monitors;
    std::vector<ControllerDecl> controllers;
    std::string logic;
    std::map<std::string, double> params;
    std::vector<PhysicalValueDecl> physical_values;
    std::optional<modbus::DeviceIdentity> identity;

    bool operator==(const DeviceConfig&) const = default;
};

struct AttackerConfig {
    std::string name;
    std::vector<NetworkAttachment> networks;
    std::vector<std::string> buses;

    bool operator==(const AttackerConfig&) const = default;
};

struct SimulationConfig {
    std::string name;
    std::vector<NetworkDef> networks;
    std::vector<BusDef> serial_buses;
    std::vector<DeviceConfig> devices;
    std::vector<AttackerConfig> attackers;
    std::uint32_t tick_ms = 100;
    std::uint64_t seed = 0;

    const DeviceConfig* find_device(const std::string& device_name) const;

    bool operator==(const SimulationConfig&) const = default;
};

// Register word <-> physical value conversions used by sensors and actuators.
std::uint16_t encode_physical(double value, double scale, double offset);
double decode_physical(std::uint16_t word, double scale, double offset);

}  // namespace icsim::config
