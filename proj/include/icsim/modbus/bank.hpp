#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace icsim::modbus {

enum class Area {
    coil,
    discrete_input,
    holding_register,
    input_register,
};

// Coils and holding registers are writable through Modbus; discrete inputs
// and input registers only through the owner (sensor refresh, logic).
constexpr bool is_modbus_writable(Area area) {
    return area == Area::coil || area == Area::holding_register;
}

constexpr bool is_bit_area(Area area) {
    return area == Area::coil || area == Area::discrete_input;
}

const char* area_name(Area area);
std::optional<Area> area_from_name(const std::string& name);

struct DeviceIdentity {
    std::string vendor;
    std::string product;
    std::string version;

    bool operator==(const DeviceIdentity&) const = default;
};

// Sparse register file: only configured addresses exist. Bit areas store one
// bit per address, word areas one 16-bit word.
class RegisterBank {
  public:
    void configure(Area area, std::uint16_t address, std::uint16_t initial = 0);
    bool has(Area area, std::uint16_t address) const;

    // Owner-side access; ignores Modbus writability so sensors and logic can
    // refresh read-only areas.
    std::uint16_t get(Area area, std::uint16_t address) const;
    void set(Area area, std::uint16_t address, std::uint16_t value);

    bool area_empty(Area area) const;

    const std::map<std::uint16_t, bool>& coils() const { return coils_; }
    const std::map<std::uint16_t, bool>& discrete_inputs() const { return discrete_inputs_; }
    const std::map<std::uint16_t, std::uint16_t>& holding_registers() const { return holding_; }
    const std::map<std::uint16_t, std::uint16_t>& input_registers() const { return input_; }

    void set_identity(DeviceIdentity identity) { identity_ = std::move(identity); }
    const std::optional<DeviceIdentity>& identity() const { return identity_; }

  private:
    std::map<std::uint16_t, bool> coils_;
    std::map<std::uint16_t, bool> discrete_inputs_;
    std::map<std::uint16_t, std::uint16_t> holding_;
    std::map<std::uint16_t, std::uint16_t> input_;
    std::optional<DeviceIdentity> identity_;
};

}  // namespace icsim::modbus
