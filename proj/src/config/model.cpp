#include "icsim/config/model.hpp"

#include <cmath>

namespace icsim::config {

const char* kind_name(DeviceKind kind) {
    switch (kind) {
        case DeviceKind::hmi: return "hmi";
        case DeviceKind::plc: return "plc";
        case DeviceKind::sensor: return "sensor";
        case DeviceKind::actuator: return "actuator";
        case DeviceKind::hil: return "hil";
    }
    return "?";
}

std::optional<DeviceKind> kind_from_name(const std::string& name) {
    if (name == "hmi") return DeviceKind::hmi;
    if (name == "plc") return DeviceKind::plc;
    if (name == "sensor") return DeviceKind::sensor;
    if (name == "actuator") return DeviceKind::actuator;
    if (name == "hil") return DeviceKind::hil;
    return std::nullopt;
}

const DeviceConfig* SimulationConfig::find_device(const std::string& device_name) const {
    for (const auto& device : devices) {
        if (device.name == device_name) return &device;
    }
    return nullptr;
}

std::uint16_t encode_physical(double value, double scale, double offset) {
    const double raw = std::trunc(value * scale + offset);
    if (raw <= 0.0) return 0;
    if (raw >= 65535.0) return 65535;
    return static_cast<std::uint16_t>(raw);
}

double decode_physical(std::uint16_t word, double scale, double offset) {
    return (static_cast<double>(word) - offset) / scale;
}

}  // namespace icsim::config
