#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "icsim/config/model.hpp"
#include "icsim/modbus/bank.hpp"
#include "icsim/world/rng.hpp"
#include "icsim/world/store.hpp"

namespace icsim::devices {

class UnknownLogic : public std::runtime_error {
  public:
    explicit UnknownLogic(const std::string& name)
        : std::runtime_error("unknown logic identifier: " + name) {}
};

struct LogicContext {
    world::Rng& rng;
    double sim_time_s;
    double dt_s;
    const std::map<std::string, double>& params;

    double param(const std::string& name, double fallback) const {
        auto it = params.find(name);
        return it == params.end() ? fallback : it->second;
    }
};

// Physics update for one tick: reads the store snapshot, emits the values to
// commit. The caller applies the batch atomically.
class HilLogic {
  public:
    virtual ~HilLogic() = default;
    virtual void step(const LogicContext& ctx, const std::map<std::string, double>& current,
                      std::vector<std::pair<std::string, double>>& updates) = 0;
};

// Control logic for one scan cycle, pure over the device's own bank: inputs
// were polled into local registers by the monitor phase, outputs written to
// local registers are pushed by the controller phase.
class PlcLogic {
  public:
    virtual ~PlcLogic() = default;
    virtual void scan(modbus::RegisterBank& bank, const LogicContext& ctx) = 0;
};

class LogicRegistry {
  public:
    using HilFactory = std::function<std::unique_ptr<HilLogic>(const config::DeviceConfig&)>;
    using PlcFactory = std::function<std::unique_ptr<PlcLogic>(const config::DeviceConfig&)>;

    void add_hil(const std::string& name, HilFactory factory) {
        hil_[name] = std::move(factory);
    }
    void add_plc(const std::string& name, PlcFactory factory) {
        plc_[name] = std::move(factory);
    }

    bool has(const std::string& name) const {
        return hil_.count(name) != 0 || plc_.count(name) != 0;
    }

    std::set<std::string> names() const {
        std::set<std::string> out;
        for (const auto& [name, factory] : hil_) out.insert(name);
        for (const auto& [name, factory] : plc_) out.insert(name);
        return out;
    }

    std::unique_ptr<HilLogic> make_hil(const std::string& name,
                                       const config::DeviceConfig& device) const {
        auto it = hil_.find(name);
        if (it == hil_.end()) throw UnknownLogic(name);
        return it->second(device);
    }

    std::unique_ptr<PlcLogic> make_plc(const std::string& name,
                                       const config::DeviceConfig& device) const {
        auto it = plc_.find(name);
        if (it == plc_.end()) throw UnknownLogic(name);
        return it->second(device);
    }

  private:
    std::map<std::string, HilFactory> hil_;
    std::map<std::string, PlcFactory> plc_;
};

}  // namespace icsim::devices
