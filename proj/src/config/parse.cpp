#include "icsim/config/parse.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace icsim::config {

namespace {

using nlohmann::json;

[[noreturn]] void fail_type(const std::string& path, const char* expected, const json& got) {
    throw TypeMismatchError(path + ": expected " + expected + ", got " + got.type_name());
}

void require_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (allowed.count(key) == 0) {
            throw UnknownKeyError(path + ": unknown key \"" + key + "\"");
        }
    }
}

const json& require_object(const json& value, const std::string& path) {
    if (!value.is_object()) fail_type(path, "object", value);
    return value;
}

std::string get_string(const json& obj, const std::string& path, const std::string& key,
                       std::optional<std::string> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw TypeMismatchError(path + ": missing required key \"" + key + "\"");
    }
    if (!obj[key].is_string()) fail_type(path + "." + key, "string", obj[key]);
    return obj[key].get<std::string>();
}

double get_number(const json& obj, const std::string& path, const std::string& key,
                  std::optional<double> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw TypeMismatchError(path + ": missing required key \"" + key + "\"");
    }
    if (!obj[key].is_number()) fail_type(path + "." + key, "number", obj[key]);
    return obj[key].get<double>();
}

std::uint64_t get_uint(const json& obj, const std::string& path, const std::string& key,
                       std::optional<std::uint64_t> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw TypeMismatchError(path + ": missing required key \"" + key + "\"");
    }
    const json& value = obj[key];
    const bool negative = value.is_number_integer() && !value.is_number_unsigned() &&
                          value.get<std::int64_t>() < 0;
    if (!value.is_number_integer() || negative) {
        fail_type(path + "." + key, "non-negative integer", value);
    }
    return value.get<std::uint64_t>();
}

modbus::Area get_area(const json& obj, const std::string& path, const std::string& key) {
    const std::string text = get_string(obj, path, key);
    const auto area = modbus::area_from_name(text);
    if (!area) {
        throw TypeMismatchError(path + "." + key + ": unknown register area \"" + text + "\"");
    }
    return *area;
}

NetworkAttachment parse_attachment(const json& value, const std::string& path) {
    require_object(value, path);
    require_keys(value, path, {"name", "ip"});
    NetworkAttachment attachment;
    attachment.network = get_string(value, path, "name");
    attachment.ip = get_string(value, path, "ip");
    return attachment;
}

InboundConnection parse_inbound(const json& value, const std::string& path) {
    require_object(value, path);
    InboundConnection conn;
    const std::string type = get_string(value, path, "type");
    if (type == "tcp") {
        require_keys(value, path, {"type", "port", "unit_id"});
        conn.type = ConnectionType::tcp;
        conn.port = static_cast<std::uint16_t>(get_uint(value, path, "port", 502));
        conn.unit_id = static_cast<std::uint8_t>(get_uint(value, path, "unit_id", 1));
    } else if (type == "serial") {
        require_keys(value, path, {"type", "bus", "unit_id"});
        conn.type = ConnectionType::serial;
        conn.bus = get_string(value, path, "bus");
        conn.unit_id = static_cast<std::uint8_t>(get_uint(value, path, "unit_id"));
    } else {
        throw TypeMismatchError(path + ".type: expected \"tcp\" or \"serial\"");
    }
    return conn;
}

OutboundConnection parse_outbound(const json& value, const std::string& path) {
    require_object(value, path);
    OutboundConnection conn;
    conn.name = get_string(value, path, "name");
    const std::string type = get_string(value, path, "type");
    if (type == "tcp") {
        require_keys(value, path, {"name", "type", "target", "port", "unit_id"});
        conn.type = ConnectionType::tcp;
        conn.target = get_string(value, path, "target");
        conn.port = static_cast<std::uint16_t>(get_uint(value, path, "port", 502));
        conn.unit_id = static_cast<std::uint8_t>(get_uint(value, path, "unit_id", 255));
    } else if (type == "serial") {
        require_keys(value, path, {"name", "type", "bus", "unit_id"});
        conn.type = ConnectionType::serial;
        conn.bus = get_string(value, path, "bus");
        conn.serial_unit = static_cast<std::uint8_t>(get_uint(value, path, "unit_id"));
    } else {
        throw TypeMismatchError(path + ".type: expected \"tcp\" or \"serial\"");
    }
    return conn;
}

RegisterDecl parse_register(const json& value, const std::string& path) {
    require_object(value, path);
    require_keys(value, path,
                 {"area", "address", "count", "initial", "physical_value", "scale", "offset"});
    RegisterDecl decl;
    decl.area = get_area(value, path, "area");
    decl.address = static_cast<std::uint16_t>(get_uint(value, path, "address"));
    decl.count = static_cast<std::uint16_t>(get_uint(value, path, "count", 1));
    decl.initial = static_cast<std::uint16_t>(get_uint(value, path, "initial", 0));
    decl.physical_value = get_string(value, path, "physical_value", std::string());
    decl.scale = get_number(value, path, "scale", 1.0);
    decl.offset = get_number(value, path, "offset", 0.0);
    return decl;
}

MonitorDecl parse_monitor(const json& value, const std::string& path) {
    require_object(value, path);
    require_keys(value, path,
                 {"name", "connection", "remote_area", "remote_address", "count", "local_area",
                  "local_address", "period_ticks"});
    MonitorDecl decl;
    decl.name = get_string(value, path, "name", std::string());
    decl.connection = get_string(value, path, "connection");
    decl.remote_area = get_area(value, path, "remote_area");
    decl.remote_address = static_cast<std::uint16_t>(get_uint(value, path, "remote_address"));
    decl.count = static_cast<std::uint16_t>(get_uint(value, path, "count", 1));
    decl.local_area = get_area(value, path, "local_area");
    decl.local_address = static_cast<std::uint16_t>(get_uint(value, path, "local_address"));
    decl.period_ticks = static_cast<std::uint32_t>(get_uint(value, path, "period_ticks", 1));
    return decl;
}

ControllerDecl parse_controller(const json& value, const std::string& path) {
    require_object(value, path);
    require_keys(value, path,
                 {"name", "connection", "remote_area", "remote_address", "local_area",
                  "local_address"});
    ControllerDecl decl;
    decl.name = get_string(value, path, "name", std::string());
    decl.connection = get_string(value, path, "connection");
    decl.remote_area = get_area(value, path, "remote_area");
    decl.remote_address = static_cast<std::uint16_t>(get_uint(value, path, "remote_address"));
    decl.local_area = get_area(value, path, "local_area");
    decl.local_address = static_cast<std::uint16_t>(get_uint(value, path, "local_address"));
    return decl;
}

// Which keys each device kind admits: servers live on the field side,
// clients on the supervisory side, physics on HIL modules.
bool key_allowed_for_kind(const std::string& key, DeviceKind kind) {
    const bool is_field_device = kind == DeviceKind::sensor || kind == DeviceKind::actuator;
    if (key == "inbound_connections") {
        return kind == DeviceKind::plc || is_field_device;
    }
    if (key == "outbound_connections") {
        return kind == DeviceKind::hmi || kind == DeviceKind::plc;
    }
    if (key == "registers" || key == "identity") {
        return kind != DeviceKind::hil;
    }
    if (key == "monitors" || key == "controllers") {
        return kind == DeviceKind::hmi || kind == DeviceKind::plc;
    }
    if (key == "logic") {
        return kind == DeviceKind::plc || kind == DeviceKind::hil;
    }
    if (key == "params") {
        return kind == DeviceKind::plc || kind == DeviceKind::hil;
    }
    if (key == "physical_values") {
        return kind == DeviceKind::hil;
    }
    return true;  // name, kind, network
}

DeviceConfig parse_device(const json& value, const std::string& path) {
    require_object(value, path);
    require_keys(value, path,
                 {"name", "kind", "network", "inbound_connections", "outbound_connections",
                  "registers", "monitors", "controllers", "logic", "params", "physical_values",
                  "identity"});

    DeviceConfig device;
    device.name = get_string(value, path, "name");
    const std::string kind_text = get_string(value, path, "kind");
    const auto kind = kind_from_name(kind_text);
    if (!kind) {
        throw TypeMismatchError(path + ".kind: unknown device kind \"" + kind_text + "\"");
    }
    device.kind = *kind;

    for (const auto& [key, sub] : value.items()) {
        (void)sub;
        if (!key_allowed_for_kind(key, device.kind)) {
            throw KindPropertyError(path + ": key \"" + key + "\" not allowed on a " +
                                    kind_name(device.kind));
        }
    }

    if (value.contains("network")) {
        device.network = parse_attachment(value["network"], path + ".network");
    }

    auto parse_list = [&](const char* key, auto parser, auto& out) {
        if (!value.contains(key)) return;
        const json& list = value[key];
        if (!list.is_array()) fail_type(path + "." + key, "array", list);
        std::size_t index = 0;
        for (const auto& item : list) {
            out.push_back(parser(item, path + "." + key + "[" + std::to_string(index) + "]"));
            ++index;
        }
    };

    parse_list("inbound_connections", parse_inbound, device.inbound_connections);
    parse_list("outbound_connections", parse_outbound, device.outbound_connections);
    parse_list("registers", parse_register, device.registers);
    parse_list("monitors", parse_monitor, device.monitors);
    parse_list("controllers", parse_controller, device.controllers);

    device.logic = get_string(value, path, "logic", std::string());

    if (value.contains("params")) {
        const json& params = require_object(value["params"], path + ".params");
        for (const auto& [key, sub] : params.items()) {
            if (!sub.is_number()) fail_type(path + ".params." + key, "number", sub);
            device.params[key] = sub.get<double>();
        }
    }

    if (value.contains("physical_values")) {
        const json& list = value["physical_values"];
        if (!list.is_array()) fail_type(path + ".physical_values", "array", list);
        std::size_t index = 0;
        for (const auto& item : list) {
            const std::string item_path =
                path + ".physical_values[" + std::to_string(index) + "]";
            require_object(item, item_path);
            require_keys(item, item_path, {"name", "initial"});
            PhysicalValueDecl decl;
            decl.name = get_string(item, item_path, "name");
            decl.initial = get_number(item, item_path, "initial", 0.0);
            device.physical_values.push_back(decl);
            ++index;
        }
    }

    if (value.contains("identity")) {
        const std::string identity_path = path + ".identity";
        const json& identity = require_object(value["identity"], identity_path);
        require_keys(identity, identity_path, {"vendor", "product", "version"});
        device.identity = modbus::DeviceIdentity{
            get_string(identity, identity_path, "vendor"),
            get_string(identity, identity_path, "product"),
            get_string(identity, identity_path, "version"),
        };
    }

    return device;
}

AttackerConfig parse_attacker(const json& value, const std::string& path) {
    require_object(value, path);
    require_keys(value, path, {"name", "networks", "buses"});
    AttackerConfig attacker;
    attacker.name = get_string(value, path, "name");
    if (value.contains("networks")) {
        const json& list = value["networks"];
        if (!list.is_array()) fail_type(path + ".networks", "array", list);
        std::size_t index = 0;
        for (const auto& item : list) {
            attacker.networks.push_back(
                parse_attachment(item, path + ".networks[" + std::to_string(index) + "]"));
            ++index;
        }
    }
    if (value.contains("buses")) {
        const json& list = value["buses"];
        if (!list.is_array()) fail_type(path + ".buses", "array", list);
        for (const auto& item : list) {
            if (!item.is_string()) fail_type(path + ".buses[]", "string", item);
            attacker.buses.push_back(item.get<std::string>());
        }
    }
    return attacker;
}

}  // namespace

SimulationConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SyntaxError(e.what());
    }

    const std::string path = "$";
    require_object(root, path);
    require_keys(root, path,
                 {"name", "networks", "serial_buses", "devices", "attackers", "tick_ms", "seed"});

    SimulationConfig config;
    config.name = get_string(root, path, "name");
    config.tick_ms = static_cast<std::uint32_t>(get_uint(root, path, "tick_ms", 100));
    config.seed = get_uint(root, path, "seed", 0);

    if (root.contains("networks")) {
        const json& list = root["networks"];
        if (!list.is_array()) fail_type("$.networks", "array", list);
        std::size_t index = 0;
        for (const auto& item : list) {
            const std::string item_path = "$.networks[" + std::to_string(index) + "]";
            require_object(item, item_path);
            require_keys(item, item_path, {"name", "subnet"});
            config.networks.push_back({get_string(item, item_path, "name"),
                                       get_string(item, item_path, "subnet", std::string())});
            ++index;
        }
    }

    if (root.contains("serial_buses")) {
        const json& list = root["serial_buses"];
        if (!list.is_array()) fail_type("$.serial_buses", "array", list);
        std::size_t index = 0;
        for (const auto& item : list) {
            const std::string item_path = "$.serial_buses[" + std::to_string(index) + "]";
            require_object(item, item_path);
            require_keys(item, item_path, {"name"});
            config.serial_buses.push_back({get_string(item, item_path, "name")});
            ++index;
        }
    }

    if (root.contains("devices")) {
        const json& list = root["devices"];
        if (!list.is_array()) fail_type("$.devices", "array", list);
        std::size_t index = 0;
        for (const auto& item : list) {
            config.devices.push_back(
                parse_device(item, "$.devices[" + std::to_string(index) + "]"));
            ++index;
        }
    }

    if (root.contains("attackers")) {
        const json& list = root["attackers"];
        if (!list.is_array()) fail_type("$.attackers", "array", list);
        std::size_t index = 0;
        for (const auto& item : list) {
            config.attackers.push_back(
                parse_attacker(item, "$.attackers[" + std::to_string(index) + "]"));
            ++index;
        }
    }

    return config;
}

SimulationConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

namespace {

json attachment_to_json(const NetworkAttachment& attachment) {
    return json{{"name", attachment.network}, {"ip", attachment.ip}};
}

}  // namespace

std::string serialize_config(const SimulationConfig& config) {
    json root;
    root["name"] = config.name;
    root["tick_ms"] = config.tick_ms;
    root["seed"] = config.seed;

    root["networks"] = json::array();
    for (const auto& network : config.networks) {
        root["networks"].push_back(json{{"name", network.name}, {"subnet", network.subnet}});
    }
    root["serial_buses"] = json::array();
    for (const auto& bus : config.serial_buses) {
        root["serial_buses"].push_back(json{{"name", bus.name}});
    }

    root["devices"] = json::array();
    for (const auto& device : config.devices) {
        json d;
        d["name"] = device.name;
        d["kind"] = kind_name(device.kind);
        if (device.network) d["network"] = attachment_to_json(*device.network);
        if (!device.inbound_connections.empty()) {
            d["inbound_connections"] = json::array();
            for (const auto& conn : device.inbound_connections) {
                if (conn.type == ConnectionType::tcp) {
                    d["inbound_connections"].push_back(
                        json{{"type", "tcp"}, {"port", conn.port}, {"unit_id", conn.unit_id}});
                } else {
                    d["inbound_connections"].push_back(
                        json{{"type", "serial"}, {"bus", conn.bus}, {"unit_id", conn.unit_id}});
                }
            }
        }
        if (!device.outbound_connections.empty()) {
            d["outbound_connections"] = json::array();
            for (const auto& conn : device.outbound_connections) {
                if (conn.type == ConnectionType::tcp) {
                    d["outbound_connections"].push_back(json{{"name", conn.name},
                                                             {"type", "tcp"},
                                                             {"target", conn.target},
                                                             {"port", conn.port},
                                                             {"unit_id", conn.unit_id}});
                } else {
                    d["outbound_connections"].push_back(json{{"name", conn.name},
                                                             {"type", "serial"},
                                                             {"bus", conn.bus},
                                                             {"unit_id", conn.serial_unit}});
                }
            }
        }
        if (!device.registers.empty()) {
            d["registers"] = json::array();
            for (const auto& reg : device.registers) {
                json r{{"area", modbus::area_name(reg.area)},
                       {"address", reg.address},
                       {"count", reg.count},
                       {"initial", reg.initial},
                       {"scale", reg.scale},
                       {"offset", reg.offset}};
                if (!reg.physical_value.empty()) r["physical_value"] = reg.physical_value;
                d["registers"].push_back(r);
            }
        }
        if (!device.monitors.empty()) {
            d["monitors"] = json::array();
            for (const auto& monitor : device.monitors) {
                json m{{"connection", monitor.connection},
                       {"remote_area", modbus::area_name(monitor.remote_area)},
                       {"remote_address", monitor.remote_address},
                       {"count", monitor.count},
                       {"local_area", modbus::area_name(monitor.local_area)},
                       {"local_address", monitor.local_address},
                       {"period_ticks", monitor.period_ticks}};
                if (!monitor.name.empty()) m["name"] = monitor.name;
                d["monitors"].push_back(m);
            }
        }
        if (!device.controllers.empty()) {
            d["controllers"] = json::array();
            for (const auto& controller : device.controllers) {
                json c{{"connection", controller.connection},
                       {"remote_area", modbus::area_name(controller.remote_area)},
                       {"remote_address", controller.remote_address},
                       {"local_area", modbus::area_name(controller.local_area)},
                       {"local_address", controller.local_address}};
                if (!controller.name.empty()) c["name"] = controller.name;
                d["controllers"].push_back(c);
            }
        }
        if (!device.logic.empty()) d["logic"] = device.logic;
        if (!device.params.empty()) {
            d["params"] = json::object();
            for (const auto& [key, value] : device.params) d["params"][key] = value;
        }
        if (!device.physical_values.empty()) {
            d["physical_values"] = json::array();
            for (const auto& pv : device.physical_values) {
                d["physical_values"].push_back(json{{"name", pv.name}, {"initial", pv.initial}});
            }
        }
        if (device.identity) {
            d["identity"] = json{{"vendor", device.identity->vendor},
                                 {"product", device.identity->product},
                                 {"version", device.identity->version}};
        }
        root["devices"].push_back(d);
    }

    root["attackers"] = json::array();
    for (const auto& attacker : config.attackers) {
        json a;
        a["name"] = attacker.name;
        a["networks"] = json::array();
        for (const auto& attachment : attacker.networks) {
            a["networks"].push_back(attachment_to_json(attachment));
        }
        a["buses"] = attacker.buses;
        root["attackers"].push_back(a);
    }

    return root.dump(2) + "\n";
}

}  // namespace icsim::config
