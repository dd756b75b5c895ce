#include "icsim/modbus/frame.hpp"

#include <string>

#include "icsim/modbus/crc16.hpp"

namespace icsim::modbus {

Pdu make_exception(std::uint8_t request_fc, ExceptionCode code) {
    Pdu pdu;
    pdu.function_code = static_cast<std::uint8_t>(request_fc | exception_flag);
    pdu.data = {static_cast<std::uint8_t>(code)};
    return pdu;
}

std::vector<std::uint8_t> encode_rtu(std::uint8_t address, const Pdu& pdu) {
    if (address > max_unit_address) {
        throw AddressOutOfRange("unit address " + std::to_string(address) + " exceeds 247");
    }
    if (pdu.data.size() > max_pdu_data_bytes) {
        throw PduTooLong("pdu data of " + std::to_string(pdu.data.size()) +
                         " bytes exceeds 252");
    }
    std::vector<std::uint8_t> frame;
    frame.reserve(2 + pdu.data.size() + 2);
    frame.push_back(address);
    frame.push_back(pdu.function_code);
    frame.insert(frame.end(), pdu.data.begin(), pdu.data.end());
    const std::uint16_t crc = crc16(frame);
    frame.push_back(static_cast<std::uint8_t>(crc & 0xFF));  // low byte first
    frame.push_back(static_cast<std::uint8_t>(crc >> 8));
    return frame;
}

RtuAdu decode_rtu(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < min_rtu_frame_bytes) {
        throw FrameTooShort("rtu frame of " + std::to_string(bytes.size()) +
                            " bytes, need at least 4");
    }
    const std::size_t body_len = bytes.size() - 2;
    const std::uint16_t wire_crc =
        static_cast<std::uint16_t>(bytes[body_len] | (bytes[body_len + 1] << 8));
    const std::uint16_t computed = crc16(bytes.subspan(0, body_len));
    if (wire_crc != computed) {
        throw CrcMismatch("rtu crc mismatch");
    }
    RtuAdu adu;
    adu.address = bytes[0];
    adu.pdu.function_code = bytes[1];
    adu.pdu.data.assign(bytes.begin() + 2, bytes.begin() + static_cast<long>(body_len));
    return adu;
}

std::vector<std::uint8_t> encode_tcp(const TcpAdu& adu) {
    if (adu.pdu.data.size() > max_pdu_data_bytes) {
        throw PduTooLong("pdu data of " + std::to_string(adu.pdu.data.size()) +
                         " bytes exceeds 252");
    }
    const std::uint16_t length = static_cast<std::uint16_t>(2 + adu.pdu.data.size());
    std::vector<std::uint8_t> frame;
    frame.reserve(mbap_header_bytes + 1 + adu.pdu.data.size());
    put_u16(frame, adu.transaction_id);
    put_u16(frame, 0);  // protocol id
    put_u16(frame, length);
    frame.push_back(adu.unit_id);
    frame.push_back(adu.pdu.function_code);
    frame.insert(frame.end(), adu.pdu.data.begin(), adu.pdu.data.end());
    return frame;
}

TcpAdu decode_tcp(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < min_tcp_frame_bytes) {
        throw FrameTooShort("tcp frame of " + std::to_string(bytes.size()) +
                            " bytes, need at least 8");
    }
    const std::uint16_t protocol_id = get_u16(bytes, 2);
    if (protocol_id != 0) {
        throw ProtocolIdNonZero("mbap protocol id " + std::to_string(protocol_id));
    }
    const std::uint16_t length = get_u16(bytes, 4);
    if (length != bytes.size() - 6) {
        throw LengthMismatch("mbap length " + std::to_string(length) + " but " +
                             std::to_string(bytes.size() - 6) + " bytes follow");
    }
    TcpAdu adu;
    adu.transaction_id = get_u16(bytes, 0);
    adu.protocol_id = 0;
    adu.unit_id = bytes[6];
    adu.pdu.function_code = bytes[7];
    adu.pdu.data.assign(bytes.begin() + 8, bytes.end());
    return adu;
}

}  // namespace icsim::modbus
