#include <doctest.h>

#include <memory>
#include <vector>

#include "icsim/devices/runtime.hpp"
#include "icsim/modbus/frame.hpp"
#include "icsim/modbus/server.hpp"
#include "icsim/net/fabric.hpp"

using namespace icsim;
using modbus::Area;
using modbus::FunctionCode;
using modbus::Pdu;

namespace {

Pdu read_req(FunctionCode fc, std::uint16_t address, std::uint16_t count) {
    Pdu pdu;
    pdu.function_code = static_cast<std::uint8_t>(fc);
    modbus::put_u16(pdu.data, address);
    modbus::put_u16(pdu.data, count);
    return pdu;
}

Pdu write_req(FunctionCode fc, std::uint16_t address, std::uint16_t value) {
    Pdu pdu;
    pdu.function_code = static_cast<std::uint8_t>(fc);
    modbus::put_u16(pdu.data, address);
    modbus::put_u16(pdu.data, value);
    return pdu;
}

Pdu diag_req(std::uint16_t sub) {
    Pdu pdu;
    pdu.function_code = static_cast<std::uint8_t>(FunctionCode::diagnostics);
    modbus::put_u16(pdu.data, sub);
    modbus::put_u16(pdu.data, 0);
    return pdu;
}

// PLC test logic: command coil 0 when the mirrored value reaches 100.
class ThresholdLogic : public devices::PlcLogic {
  public:
    void scan(modbus::RegisterBank& bank, const devices::LogicContext&) override {
        bank.set(Area::coil, 0,
                 bank.get(Area::holding_register, 0) >= 100 ? 1 : 0);
    }
};

struct MiniPlant {
    double clock = 0.0;
    std::uint64_t tick = 0;
    static constexpr double tick_s = 0.1;

    world::PhysicalStore store;
    net::Fabric fabric{[this] { return clock; }};
    devices::LogicRegistry registry;
    config::DeviceConfig sensor_cfg, actuator_cfg, plc_cfg, hmi_cfg;
    std::unique_ptr<devices::DeviceRuntime> sensor, actuator, plc, hmi;

    MiniPlant() {
        store.declare("temp", 20.0);
        store.declare("valve", 0.0);

        fabric.add_network("lan");
        fabric.attach("sensor", "lan", "10.9.0.11");
        fabric.attach("actuator", "lan", "10.9.0.12");
        fabric.attach("plc", "lan", "10.9.0.20");
        fabric.attach("hmi", "lan", "10.9.0.30");
        fabric.attach("probe", "lan", "10.9.0.66");

        registry.add_plc("threshold", [](const config::DeviceConfig&) {
            return std::make_unique<ThresholdLogic>();
        });

        sensor_cfg.name = "sensor";
        sensor_cfg.kind = config::DeviceKind::sensor;
        sensor_cfg.network = config::NetworkAttachment{"lan", "10.9.0.11"};
        sensor_cfg.inbound_connections.push_back({config::ConnectionType::tcp, 502, 2, ""});
        {
            config::RegisterDecl plain;  // direct copy of the value
            plain.area = Area::input_register;
            plain.address = 0;
            plain.physical_value = "temp";
            sensor_cfg.registers.push_back(plain);
            config::RegisterDecl scaled;  // x10 + 100 offset
            scaled.area = Area::input_register;
            scaled.address = 1;
            scaled.physical_value = "temp";
            scaled.scale = 10.0;
            scaled.offset = 100.0;
            sensor_cfg.registers.push_back(scaled);
        }

        actuator_cfg.name = "actuator";
        actuator_cfg.kind = config::DeviceKind::actuator;
        actuator_cfg.network = config::NetworkAttachment{"lan", "10.9.0.12"};
        actuator_cfg.inbound_connections.push_back({config::ConnectionType::tcp, 502, 3, ""});
        {
            config::RegisterDecl valve;
            valve.area = Area::coil;
            valve.address = 0;
            valve.physical_value = "valve";
            actuator_cfg.registers.push_back(valve);
            config::RegisterDecl spare;  // configured but not linked
            spare.area = Area::holding_register;
            spare.address = 5;
            actuator_cfg.registers.push_back(spare);
        }

        plc_cfg.name = "plc";
        plc_cfg.kind = config::DeviceKind::plc;
        plc_cfg.network = config::NetworkAttachment{"lan", "10.9.0.20"};
        plc_cfg.inbound_connections.push_back({config::ConnectionType::tcp, 502, 1, ""});
        {
            config::OutboundConnection to_sensor;
            to_sensor.name = "to_sensor";
            to_sensor.target = "sensor";
            to_sensor.unit_id = 2;
            plc_cfg.outbound_connections.push_back(to_sensor);
            config::OutboundConnection to_actuator;
            to_actuator.name = "to_actuator";
            to_actuator.target = "actuator";
            to_actuator.unit_id = 3;
            plc_cfg.outbound_connections.push_back(to_actuator);

            config::RegisterDecl mirror;
            mirror.area = Area::holding_register;
            mirror.address = 0;
            plc_cfg.registers.push_back(mirror);
            config::RegisterDecl setpoint;
            setpoint.area = Area::holding_register;
            setpoint.address = 1;
            plc_cfg.registers.push_back(setpoint);
            config::RegisterDecl cmd;
            cmd.area = Area::coil;
            cmd.address = 0;
            plc_cfg.registers.push_back(cmd);

            config::MonitorDecl monitor;
            monitor.name = "temp";
            monitor.connection = "to_sensor";
            monitor.remote_area = Area::input_register;
            monitor.remote_address = 0;
            monitor.local_area = Area::holding_register;
            monitor.local_address = 0;
            plc_cfg.monitors.push_back(monitor);

            config::ControllerDecl controller;
            controller.name = "valve_cmd";
            controller.connection = "to_actuator";
            controller.remote_area = Area::coil;
            controller.remote_address = 0;
            controller.local_area = Area::coil;
            controller.local_address = 0;
            plc_cfg.controllers.push_back(controller);
        }
        plc_cfg.logic = "threshold";

        hmi_cfg.name = "hmi";
        hmi_cfg.kind = config::DeviceKind::hmi;
        hmi_cfg.network = config::NetworkAttachment{"lan", "10.9.0.30"};
        {
            config::OutboundConnection to_plc;
            to_plc.name = "to_plc";
            to_plc.target = "plc";
            to_plc.unit_id = 1;
            hmi_cfg.outbound_connections.push_back(to_plc);

            config::RegisterDecl mirror;
            mirror.area = Area::holding_register;
            mirror.address = 0;
            hmi_cfg.registers.push_back(mirror);
            config::RegisterDecl cmd_source;
            cmd_source.area = Area::holding_register;
            cmd_source.address = 1;
            hmi_cfg.registers.push_back(cmd_source);

            config::MonitorDecl monitor;
            monitor.name = "temp_view";
            monitor.connection = "to_plc";
            monitor.remote_area = Area::holding_register;
            monitor.remote_address = 0;
            monitor.local_area = Area::holding_register;
            monitor.local_address = 0;
            monitor.period_ticks = 2;
            hmi_cfg.monitors.push_back(monitor);

            config::ControllerDecl setpoint_cmd;
            setpoint_cmd.name = "setpoint_cmd";
            setpoint_cmd.connection = "to_plc";
            setpoint_cmd.remote_area = Area::holding_register;
            setpoint_cmd.remote_address = 1;
            setpoint_cmd.local_area = Area::holding_register;
            setpoint_cmd.local_address = 1;
            hmi_cfg.controllers.push_back(setpoint_cmd);
        }

        const world::Rng root(1);
        const double restart_delay = 2 * tick_s;
        sensor = std::make_unique<devices::DeviceRuntime>(sensor_cfg, store, fabric,
                                                          root.split("sensor"), restart_delay);
        actuator = std::make_unique<devices::DeviceRuntime>(
            actuator_cfg, store, fabric, root.split("actuator"), restart_delay);
        plc = std::make_unique<devices::DeviceRuntime>(plc_cfg, store, fabric,
                                                       root.split("plc"), restart_delay);
        hmi = std::make_unique<devices::DeviceRuntime>(hmi_cfg, store, fabric,
                                                       root.split("hmi"), restart_delay);
        sensor->boot();
        actuator->boot();
        plc->boot();
        hmi->boot();
        sensor->connect_outbound(registry);
        actuator->connect_outbound(registry);
        plc->connect_outbound(registry);
        hmi->connect_outbound(registry);
    }

    void step(int ticks = 1) {
        for (int i = 0; i < ticks; ++i) {
            clock = (tick + 1) * tick_s;
            const devices::DeviceClock dc{clock, tick, tick_s};
            sensor->scan(dc);
            actuator->scan(dc);
            plc->scan(dc);
            hmi->scan(dc);
            ++tick;
        }
    }
};

}  // namespace

TEST_CASE("sensors copy scaled physical values into read-only registers") {
    MiniPlant plant;
    plant.store.write("temp", 1500.0, world::WriterRole::hil, 0.0);
    plant.step();
    CHECK(plant.sensor->read_register(Area::input_register, 0) == 1500);
    CHECK(plant.sensor->read_register(Area::input_register, 1) == 15100);  // x10 + 100

    SUBCASE("negative values clamp at zero on the unsigned register") {
        plant.store.write("temp", -1.0, world::WriterRole::hil, 0.0);
        plant.step();
        CHECK(plant.sensor->read_register(Area::input_register, 0) == 0);
        CHECK(plant.sensor->read_register(Area::input_register, 1) == 90);  // -1*10+100
    }

    SUBCASE("values past the register range clamp at 65535") {
        plant.store.write("temp", 1e9, world::WriterRole::hil, 0.0);
        plant.step();
        CHECK(plant.sensor->read_register(Area::input_register, 0) == 65535);
    }

    SUBCASE("a remote read returns the same word a local inspection shows") {
        auto session = plant.fabric.connect("probe", "sensor", 502);
        const auto response =
            session.transact(2, read_req(FunctionCode::read_input_registers, 0, 1));
        REQUIRE(response.has_value());
        CHECK(modbus::get_u16(response->data, 1) ==
              plant.sensor->read_register(Area::input_register, 0));
    }
}

TEST_CASE("actuator writes propagate to linked store values in the same cycle") {
    MiniPlant plant;
    auto session = plant.fabric.connect("probe", "actuator", 502);

    const auto response =
        session.transact(3, write_req(FunctionCode::write_single_coil, 0, 0xFF00));
    REQUIRE(response.has_value());
    CHECK(plant.store.read("valve") == 1.0);

    SUBCASE("writes to configured but unlinked registers leave the store alone") {
        const auto before = plant.store.snapshot();
        session.transact(3, write_req(FunctionCode::write_single_register, 5, 1234));
        CHECK(plant.actuator->read_register(Area::holding_register, 5) == 1234);
        CHECK(plant.store.snapshot() == before);
    }

    SUBCASE("listen-only devices neither answer nor touch the store") {
        session.transact(3, diag_req(modbus::diag_force_listen_only));
        CHECK(plant.actuator->mode() == modbus::ServerMode::listen_only);
        const auto answer =
            session.transact(3, write_req(FunctionCode::write_single_coil, 0, 0x0000));
        CHECK_FALSE(answer.has_value());
        CHECK(plant.store.read("valve") == 1.0);  // unchanged
    }
}

TEST_CASE("plc scan cycle: monitor, logic, controller push on change") {
    MiniPlant plant;
    plant.store.write("temp", 20.0, world::WriterRole::hil, 0.0);
    plant.step(2);
    CHECK(plant.plc->read_register(Area::holding_register, 0) == 20);
    CHECK(plant.store.read("valve") == 0.0);

    plant.store.write("temp", 150.0, world::WriterRole::hil, 0.0);
    plant.step(2);
    CHECK(plant.plc->read_register(Area::coil, 0) == 1);
    CHECK(plant.actuator->read_register(Area::coil, 0) == 1);
    CHECK(plant.store.read("valve") == 1.0);

    SUBCASE("steady state emits no controller traffic") {
        plant.fabric.tap().drain();
        plant.step(10);
        const auto capture = plant.fabric.tap().drain();
        for (const auto& packet : capture) {
            if (packet.kind != net::EventKind::modbus) continue;
            const auto adu = modbus::decode_tcp(packet.raw_adu);
            CAPTURE(static_cast<int>(adu.pdu.function_code));
            CHECK(adu.pdu.function_code != 0x05);  // no coil writes while settled
        }
    }

    SUBCASE("every controller write observed at the target equals the source") {
        plant.store.write("temp", 20.0, world::WriterRole::hil, 0.0);
        plant.step(2);
        CHECK(plant.actuator->read_register(Area::coil, 0) ==
              plant.plc->read_register(Area::coil, 0));
    }
}

TEST_CASE("a silent monitor target holds the last value and counts failures") {
    MiniPlant plant;
    plant.store.write("temp", 42.0, world::WriterRole::hil, 0.0);
    plant.step(2);
    CHECK(plant.plc->read_register(Area::holding_register, 0) == 42);
    CHECK(plant.plc->monitor_failures() == 0);

    // Silence the sensor, then change the physical value.
    auto session = plant.fabric.connect("probe", "sensor", 502);
    session.transact(2, diag_req(modbus::diag_force_listen_only));
    plant.store.write("temp", 99.0, world::WriterRole::hil, 0.0);

    plant.step(3);
    CHECK(plant.plc->monitor_failures() == 3);
    CHECK(plant.plc->read_register(Area::holding_register, 0) == 42);  // held

    // Restart brings the sensor back; the restart also clears its own mode.
    session.transact(2, diag_req(modbus::diag_restart_communications));
    plant.step(4);  // outage window is 2 ticks, then polls succeed
    CHECK(plant.plc->read_register(Area::holding_register, 0) == 99);
}

TEST_CASE("restart drops then re-binds inbound endpoints after the delay") {
    MiniPlant plant;
    plant.step();
    auto session = plant.fabric.connect("probe", "sensor", 502);

    REQUIRE(session.transact(2, read_req(FunctionCode::read_input_registers, 0, 1)).has_value());
    session.transact(2, diag_req(modbus::diag_restart_communications));
    CHECK(plant.sensor->is_down(plant.clock));

    // During the outage window reads go unanswered.
    CHECK_FALSE(
        session.transact(2, read_req(FunctionCode::read_input_registers, 0, 1)).has_value());
    plant.step(1);
    CHECK_FALSE(
        session.transact(2, read_req(FunctionCode::read_input_registers, 0, 1)).has_value());

    plant.step(2);
    CHECK_FALSE(plant.sensor->is_down(plant.clock));
    CHECK(session.transact(2, read_req(FunctionCode::read_input_registers, 0, 1)).has_value());
}

TEST_CASE("force-listen then restart restores service") {
    MiniPlant plant;
    plant.step();
    auto session = plant.fabric.connect("probe", "sensor", 502);

    session.transact(2, diag_req(modbus::diag_force_listen_only));
    CHECK_FALSE(
        session.transact(2, read_req(FunctionCode::read_input_registers, 0, 1)).has_value());

    // Restart is the one request a listening device still honors.
    const auto ack = session.transact(2, diag_req(modbus::diag_restart_communications));
    CHECK(ack.has_value());
    plant.step(3);
    CHECK(session.transact(2, read_req(FunctionCode::read_input_registers, 0, 1)).has_value());
}

TEST_CASE("listening devices put zero response bytes on the wire") {
    MiniPlant plant;
    plant.step(2);
    auto session = plant.fabric.connect("probe", "sensor", 502);
    session.transact(2, diag_req(modbus::diag_force_listen_only));
    plant.fabric.tap().drain();

    // Polls keep arriving from the PLC while the sensor listens.
    plant.step(6);
    session.transact(2, read_req(FunctionCode::read_input_registers, 0, 1));
    for (const auto& packet : plant.fabric.tap().drain()) {
        CHECK(packet.origin_device != "sensor");
    }

    // The restart acknowledgment is the one sanctioned reply.
    const auto ack = session.transact(2, diag_req(modbus::diag_restart_communications));
    CHECK(ack.has_value());
    bool saw_ack = false;
    for (const auto& packet : plant.fabric.tap().drain()) {
        if (packet.origin_device == "sensor") {
            CHECK(packet.direction == net::Direction::response);
            saw_ack = true;
        }
    }
    CHECK(saw_ack);
}

TEST_CASE("hmi mirrors track the plc within one poll period") {
    MiniPlant plant;
    plant.store.write("temp", 64.0, world::WriterRole::hil, 0.0);
    plant.step(3);  // sensor -> plc -> hmi (period 2)
    CHECK(plant.hmi->read_register(Area::holding_register, 0) == 64);
}

TEST_CASE("hmi commands become controller writes; no commands, no writes") {
    MiniPlant plant;
    plant.step(4);
    plant.fabric.tap().drain();

    SUBCASE("idle hmi emits zero write traffic") {
        plant.step(8);
        for (const auto& packet : plant.fabric.tap().drain()) {
            if (packet.origin_device != "hmi" || packet.kind != net::EventKind::modbus) {
                continue;
            }
            const auto adu = modbus::decode_tcp(packet.raw_adu);
            CHECK((adu.pdu.function_code == 0x03 || adu.pdu.function_code == 0x01));
        }
    }

    SUBCASE("an injected command writes a single register at the target") {
        plant.hmi->enqueue_command({plant.clock + 0.1, "setpoint_cmd", 555});
        plant.step(2);
        CHECK(plant.plc->read_register(Area::holding_register, 1) == 555);

        bool saw_write = false;
        for (const auto& packet : plant.fabric.tap().drain()) {
            if (packet.origin_device != "hmi" || packet.kind != net::EventKind::modbus) {
                continue;
            }
            const auto adu = modbus::decode_tcp(packet.raw_adu);
            if (adu.pdu.function_code == 0x06) saw_write = true;
        }
        CHECK(saw_write);
    }
}
