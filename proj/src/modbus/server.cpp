#include "icsim/modbus/server.hpp"

#include "icsim/modbus/frame.hpp"

namespace icsim::modbus {

namespace {

ExecResult reject(const Pdu& request, ExceptionCode code) {
    return {make_exception(request.function_code, code), std::nullopt};
}

bool range_configured(const RegisterBank& bank, Area area, std::uint32_t start,
                      std::uint32_t count) {
    if (start + count > 0x10000) return false;
    for (std::uint32_t a = start; a < start + count; ++a) {
        if (!bank.has(area, static_cast<std::uint16_t>(a))) return false;
    }
    return true;
}

ExecResult read_bits(const Pdu& request, const RegisterBank& bank, Area area) {
    if (request.data.size() != 4) return reject(request, ExceptionCode::illegal_data_value);
    const std::uint16_t start = get_u16(request.data, 0);
    const std::uint16_t count = get_u16(request.data, 2);
    if (count < 1 || count > max_read_bits) {
        return reject(request, ExceptionCode::illegal_data_value);
    }
    if (!range_configured(bank, area, start, count)) {
        return reject(request, ExceptionCode::illegal_data_address);
    }
    Pdu response;
    response.function_code = request.function_code;
    const std::uint8_t byte_count = static_cast<std::uint8_t>((count + 7) / 8);
    response.data.push_back(byte_count);
    response.data.resize(1 + byte_count, 0);
    for (std::uint16_t i = 0; i < count; ++i) {
        if (bank.get(area, static_cast<std::uint16_t>(start + i)) != 0) {
            response.data[1 + i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
        }
    }
    return {response, std::nullopt};
}

ExecResult read_words(const Pdu& request, const RegisterBank& bank, Area area) {
    if (request.data.size() != 4) return reject(request, ExceptionCode::illegal_data_value);
    const std::uint16_t start = get_u16(request.data, 0);
    const std::uint16_t count = get_u16(request.data, 2);
    if (count < 1 || count > max_read_words) {
        return reject(request, ExceptionCode::illegal_data_value);
    }
    if (!range_configured(bank, area, start, count)) {
        return reject(request, ExceptionCode::illegal_data_address);
    }
    Pdu response;
    response.function_code = request.function_code;
    response.data.push_back(static_cast<std::uint8_t>(count * 2));
    for (std::uint16_t i = 0; i < count; ++i) {
        put_u16(response.data, bank.get(area, static_cast<std::uint16_t>(start + i)));
    }
    return {response, std::nullopt};
}

ExecResult write_single_coil(const Pdu& request, RegisterBank& bank) {
    if (request.data.size() != 4) return reject(request, ExceptionCode::illegal_data_value);
    const std::uint16_t address = get_u16(request.data, 0);
    const std::uint16_t value = get_u16(request.data, 2);
    if (value != 0x0000 && value != 0xFF00) {
        return reject(request, ExceptionCode::illegal_data_value);
    }
    if (!bank.has(Area::coil, address)) {
        return reject(request, ExceptionCode::illegal_data_address);
    }
    bank.set(Area::coil, address, value == 0xFF00 ? 1 : 0);
    Pdu response = request;  // echo
    return {response, std::nullopt};
}

ExecResult write_single_register(const Pdu& request, RegisterBank& bank) {
    if (request.data.size() != 4) return reject(request, ExceptionCode::illegal_data_value);
    const std::uint16_t address = get_u16(request.data, 0);
    const std::uint16_t value = get_u16(request.data, 2);
    if (!bank.has(Area::holding_register, address)) {
        return reject(request, ExceptionCode::illegal_data_address);
    }
    bank.set(Area::holding_register, address, value);
    Pdu response = request;  // echo
    return {response, std::nullopt};
}

ExecResult write_multiple_coils(const Pdu& request, RegisterBank& bank) {
    if (request.data.size() < 5) return reject(request, ExceptionCode::illegal_data_value);
    const std::uint16_t start = get_u16(request.data, 0);
    const std::uint16_t count = get_u16(request.data, 2);
    const std::uint8_t byte_count = request.data[4];
    if (count < 1 || count > max_write_bits || byte_count != (count + 7) / 8 ||
        request.data.size() != 5u + byte_count) {
        return reject(request, ExceptionCode::illegal_data_value);
    }
    if (!range_configured(bank, Area::coil, start, count)) {
        return reject(request, ExceptionCode::illegal_data_address);
    }
    for (std::uint16_t i = 0; i < count; ++i) {
        const bool on = (request.data[5 + i / 8] >> (i % 8)) & 1;
        bank.set(Area::coil, static_cast<std::uint16_t>(start + i), on ? 1 : 0);
    }
    Pdu response;
    response.function_code = request.function_code;
    put_u16(response.data, start);
    put_u16(response.data, count);
    return {response, std::nullopt};
}

ExecResult write_multiple_registers(const Pdu& request, RegisterBank& bank) {
    if (request.data.size() < 5) return reject(request, ExceptionCode::illegal_data_value);
    const std::uint16_t start = get_u16(request.data, 0);
    const std::uint16_t count = get_u16(request.data, 2);
    const std::uint8_t byte_count = request.data[4];
    if (count < 1 || count > max_write_words || byte_count != count * 2 ||
        request.data.size() != 5u + byte_count) {
        return reject(request, ExceptionCode::illegal_data_value);
    }
    if (!range_configured(bank, Area::holding_register, start, count)) {
        return reject(request, ExceptionCode::illegal_data_address);
    }
    for (std::uint16_t i = 0; i < count; ++i) {
        bank.set(Area::holding_register, static_cast<std::uint16_t>(start + i),
                 get_u16(request.data, 5 + 2u * i));
    }
    Pdu response;
    response.function_code = request.function_code;
    put_u16(response.data, start);
    put_u16(response.data, count);
    return {response, std::nullopt};
}

ExecResult diagnostics(const Pdu& request) {
    if (request.data.size() != 4) return reject(request, ExceptionCode::illegal_data_value);
    const std::uint16_t sub = get_u16(request.data, 0);
    switch (sub) {
        case diag_restart_communications: {
            Pdu response = request;  // echo
            return {response, DeviceControl::restart_communications};
        }
        case diag_force_listen_only:
            // The standard gives no reply to force-listen; the silence itself
            // is the acknowledgment.
            return {std::nullopt, DeviceControl::force_listen_only};
        default:
            // Unknown sub-function: answered (not 0x01) so code scans still
            // see 0x08 as supported.
            return reject(request, ExceptionCode::illegal_data_value);
    }
}

ExecResult read_device_identification(const Pdu& request, const RegisterBank& bank) {
    if (!bank.identity()) return reject(request, ExceptionCode::illegal_function);
    if (request.data.size() != 3) return reject(request, ExceptionCode::illegal_data_value);
    const std::uint8_t mei_type = request.data[0];
    const std::uint8_t dev_id_code = request.data[1];
    const std::uint8_t object_id = request.data[2];
    if (mei_type != 0x0E) return reject(request, ExceptionCode::illegal_function);
    if (dev_id_code != 0x01) return reject(request, ExceptionCode::illegal_data_value);
    if (object_id > 0x02) return reject(request, ExceptionCode::illegal_data_address);

    const DeviceIdentity& identity = *bank.identity();
    const std::string* objects[3] = {&identity.vendor, &identity.product, &identity.version};

    Pdu response;
    response.function_code = request.function_code;
    response.data = {0x0E, 0x01, 0x01, 0x00, 0x00,
                     static_cast<std::uint8_t>(3 - object_id)};
    for (std::uint8_t id = object_id; id < 3; ++id) {
        response.data.push_back(id);
        response.data.push_back(static_cast<std::uint8_t>(objects[id]->size()));
        response.data.insert(response.data.end(), objects[id]->begin(), objects[id]->end());
    }
    return {response, std::nullopt};
}

}  // namespace

ExecResult execute_on_bank(const Pdu& request, RegisterBank& bank, ServerMode mode) {
    if (mode == ServerMode::listen_only) {
        const bool is_restart = request.function_code ==
                                    static_cast<std::uint8_t>(FunctionCode::diagnostics) &&
                                request.data.size() == 4 &&
                                get_u16(request.data, 0) == diag_restart_communications;
        if (!is_restart) return {std::nullopt, std::nullopt};
        Pdu response = request;
        return {response, DeviceControl::restart_communications};
    }

    switch (static_cast<FunctionCode>(request.function_code)) {
        case FunctionCode::read_coils:
            if (bank.area_empty(Area::coil)) return reject(request, ExceptionCode::illegal_function);
            return read_bits(request, bank, Area::coil);
        case FunctionCode::read_discrete_inputs:
            if (bank.area_empty(Area::discrete_input)) {
                return reject(request, ExceptionCode::illegal_function);
            }
            return read_bits(request, bank, Area::discrete_input);
        case FunctionCode::read_holding_registers:
            if (bank.area_empty(Area::holding_register)) {
                return reject(request, ExceptionCode::illegal_function);
            }
            return read_words(request, bank, Area::holding_register);
        case FunctionCode::read_input_registers:
            if (bank.area_empty(Area::input_register)) {
                return reject(request, ExceptionCode::illegal_function);
            }
            return read_words(request, bank, Area::input_register);
        case FunctionCode::write_single_coil:
            if (bank.area_empty(Area::coil)) return reject(request, ExceptionCode::illegal_function);
            return write_single_coil(request, bank);
        case FunctionCode::write_single_register:
            if (bank.area_empty(Area::holding_register)) {
                return reject(request, ExceptionCode::illegal_function);
            }
            return write_single_register(request, bank);
        case FunctionCode::write_multiple_coils:
            if (bank.area_empty(Area::coil)) return reject(request, ExceptionCode::illegal_function);
            return write_multiple_coils(request, bank);
        case FunctionCode::write_multiple_registers:
            if (bank.area_empty(Area::holding_register)) {
                return reject(request, ExceptionCode::illegal_function);
            }
            return write_multiple_registers(request, bank);
        case FunctionCode::diagnostics:
            return diagnostics(request);
        case FunctionCode::read_device_identification:
            return read_device_identification(request, bank);
        default:
            return reject(request, ExceptionCode::illegal_function);
    }
}

}  // namespace icsim::modbus
