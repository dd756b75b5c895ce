#include "icsim/sim/simulation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace icsim::sim {

namespace {

// Restart outage: 2 ticks in lockstep, 200 ms in realtime.
double restart_delay_for(RunMode mode, double tick_s) {
    return mode == RunMode::lockstep ? 2.0 * tick_s : 0.2;
}

}  // namespace

Simulation::Simulation(config::SimulationConfig config, const devices::LogicRegistry& registry,
                       RunMode mode)
    : config_(std::move(config)),
      registry_(registry),
      mode_(mode),
      tick_s_(config_.tick_ms / 1000.0) {
    fabric_ = std::make_unique<net::Fabric>([this] { return now_.load(); });
}

void Simulation::boot() {
    if (booted_) throw std::logic_error("simulation already booted");
    booted_ = true;

    for (const auto& network : config_.networks) fabric_->add_network(network.name);
    for (const auto& bus : config_.serial_buses) fabric_->add_bus(bus.name);

    for (const auto& device : config_.devices) {
        if (device.network) {
            fabric_->attach(device.name, device.network->network, device.network->ip);
        }
        for (const auto& pv : device.physical_values) store_.declare(pv.name, pv.initial);
    }
    for (const auto& attacker : config_.attackers) {
        fabric_->declare_attacker(attacker.name);
        for (const auto& attachment : attacker.networks) {
            fabric_->attach(attacker.name, attachment.network, attachment.ip);
        }
    }

    const world::Rng root(config_.seed);
    const double restart_delay = restart_delay_for(mode_, tick_s_);

    for (const auto& device : config_.devices) {
        if (device.kind == config::DeviceKind::hil) {
            auto hil = std::make_unique<devices::HilRuntime>(device, root.split(device.name));
            hil->bind_logic(registry_);
            hils_.push_back(std::move(hil));
        } else {
            auto runtime = std::make_unique<devices::DeviceRuntime>(
                device, store_, *fabric_, root.split(device.name), restart_delay);
            runtime->boot();
            devices_.push_back(std::move(runtime));
        }
    }

    // Second pass: servers exist, clients may connect.
    for (auto& device : devices_) device->connect_outbound(registry_);
}

void Simulation::step_tick() {
    now_.store((tick_ + 1) * tick_s_);
    for (auto& hil : hils_) hil->step(store_, tick_s_);
    const devices::DeviceClock clock{now_.load(), tick_, tick_s_};
    for (auto& device : devices_) device->scan(clock);
    ++tick_;
}

void Simulation::run_ticks(std::uint64_t ticks, const TickHook& per_tick) {
    for (std::uint64_t i = 0; i < ticks; ++i) {
        step_tick();
        if (per_tick) per_tick(*this);
    }
}

std::uint64_t Simulation::ticks_for(double duration_s) const {
    return static_cast<std::uint64_t>(std::llround(duration_s / tick_s_));
}

void Simulation::run_realtime(double duration_s, const TickHook& per_tick) {
    using namespace std::chrono;
    const auto start = steady_clock::now();
    const auto period = duration_cast<steady_clock::duration>(duration<double>(tick_s_));
    std::atomic<bool> stop{false};

    auto wall_now = [&] {
        return duration_cast<duration<double>>(steady_clock::now() - start).count();
    };

    std::thread clock_thread([&] {
        while (!stop.load()) {
            now_.store(wall_now());
            std::this_thread::sleep_for(period / 4);
        }
    });

    std::thread physics_thread([&] {
        auto next = start + period;
        while (!stop.load()) {
            std::this_thread::sleep_until(next);
            next += period;
            if (stop.load()) break;
            for (auto& hil : hils_) hil->step(store_, tick_s_);
        }
    });

    std::vector<std::thread> device_threads;
    device_threads.reserve(devices_.size());
    for (auto& device : devices_) {
        device_threads.emplace_back([&, runtime = device.get()] {
            std::uint64_t local_tick = 0;
            auto next = start + period;
            while (!stop.load()) {
                std::this_thread::sleep_until(next);
                next += period;
                if (stop.load()) break;
                runtime->scan({wall_now(), local_tick++, tick_s_});
            }
        });
    }

    auto join_all = [&] {
        stop.store(true);
        for (auto& thread : device_threads) thread.join();
        physics_thread.join();
        clock_thread.join();
        now_.store(wall_now());
    };

    try {
        auto next = start + period;
        const auto deadline = start + duration_cast<steady_clock::duration>(
                                          duration<double>(duration_s));
        while (steady_clock::now() < deadline) {
            std::this_thread::sleep_until(next);
            next += period;
            ++tick_;
            if (per_tick) per_tick(*this);
        }
    } catch (...) {
        join_all();  // a hook abort must not leave worker threads running
        throw;
    }
    join_all();
}

devices::DeviceRuntime* Simulation::device(const std::string& name) {
    for (auto& device : devices_) {
        if (device->config().name == name) return device.get();
    }
    return nullptr;
}

void Simulation::load_hmi_script_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open hmi script: " + path);
    load_hmi_script(in);
}

void Simulation::load_hmi_script(std::istream& in) {
    // CSV rows: time_s,device,controller,value ('#' comments allowed).
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || line[0] == '#') continue;
        if (line_number == 1 && line.rfind("time_s,", 0) == 0) continue;  // header
        std::istringstream fields(line);
        std::string time_text, device_name, controller, value_text;
        if (!std::getline(fields, time_text, ',') || !std::getline(fields, device_name, ',') ||
            !std::getline(fields, controller, ',') || !std::getline(fields, value_text)) {
            throw std::runtime_error("malformed hmi script line " + std::to_string(line_number));
        }
        devices::DeviceRuntime* runtime = device(device_name);
        if (!runtime) {
            throw std::runtime_error("hmi script names unknown device: " + device_name);
        }
        runtime->enqueue_command({std::stod(time_text), controller,
                                  static_cast<std::uint16_t>(std::stoul(value_text))});
    }
}

std::string Simulation::status_snapshot() const {
    std::ostringstream out;
    char header[64];
    std::snprintf(header, sizeof(header), "=== status t=%.3fs ===", now_.load());
    out << header << "\n";
    out << "[store]";
    for (const auto& [name, value] : store_.snapshot()) {
        char buffer[64];
        std::snprintf(buffer, sizeof(buffer), " %s=%.6g", name.c_str(), value);
        out << buffer;
    }
    out << "\n";
    for (const auto& device : devices_) out << device->dump_registers();
    return out.str();
}

}  // namespace icsim::sim
