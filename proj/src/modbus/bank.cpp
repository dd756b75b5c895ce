#include "icsim/modbus/bank.hpp"

#include <stdexcept>

namespace icsim::modbus {

const char* area_name(Area area) {
    switch (area) {
        case Area::coil: return "coil";
        case Area::discrete_input: return "discrete_input";
        case Area::holding_register: return "holding_register";
        case Area::input_register: return "input_register";
    }
    return "?";
}

std::optional<Area> area_from_name(const std::string& name) {
    if (name == "coil") return Area::coil;
    if (name == "discrete_input") return Area::discrete_input;
    if (name == "holding_register") return Area::holding_register;
    if (name == "input_register") return Area::input_register;
    return std::nullopt;
}

void RegisterBank::configure(Area area, std::uint16_t address, std::uint16_t initial) {
    switch (area) {
        case Area::coil: coils_[address] = initial != 0; break;
        case Area::discrete_input: discrete_inputs_[address] = initial != 0; break;
        case Area::holding_register: holding_[address] = initial; break;
        case Area::input_register: input_[address] = initial; break;
    }
}

bool RegisterBank::has(Area area, std::uint16_t address) const {
    switch (area) {
        case Area::coil: return coils_.count(address) != 0;
        case Area::discrete_input: return discrete_inputs_.count(address) != 0;
        case Area::holding_register: return holding_.count(address) != 0;
        case Area::input_register: return input_.count(address) != 0;
    }
    return false;
}

std::uint16_t RegisterBank::get(Area area, std::uint16_t address) const {
    switch (area) {
        case Area::coil: return coils_.at(address) ? 1 : 0;
        case Area::discrete_input: return discrete_inputs_.at(address) ? 1 : 0;
        case Area::holding_register: return holding_.at(address);
        case Area::input_register: return input_.at(address);
    }
    throw std::out_of_range("bad area");
}

void RegisterBank::set(Area area, std::uint16_t address, std::uint16_t value) {
    if (!has(area, address)) {
        throw std::out_of_range(std::string(area_name(area)) + " address " +
                                std::to_string(address) + " not configured");
    }
    switch (area) {
        case Area::coil: coils_[address] = value != 0; break;
        case Area::discrete_input: discrete_inputs_[address] = value != 0; break;
        case Area::holding_register: holding_[address] = value; break;
        case Area::input_register: input_[address] = value; break;
    }
}

bool RegisterBank::area_empty(Area area) const {
    switch (area) {
        case Area::coil: return coils_.empty();
        case Area::discrete_input: return discrete_inputs_.empty();
        case Area::holding_register: return holding_.empty();
        case Area::input_register: return input_.empty();
    }
    return true;
}

}  // namespace icsim::modbus
