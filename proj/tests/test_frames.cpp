#include <doctest.h>

#include <cstdint>
#include <vector>

#include "icsim/modbus/crc16.hpp"
#include "icsim/modbus/frame.hpp"
#include "icsim/world/rng.hpp"

using namespace icsim::modbus;

namespace {

Pdu random_pdu(icsim::world::Rng& rng, std::size_t max_data = 64) {
    Pdu pdu;
    pdu.function_code = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    pdu.data.resize(rng.uniform_int(0, static_cast<std::int64_t>(max_data)));
    for (auto& b : pdu.data) b = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    return pdu;
}

}  // namespace

TEST_CASE("rtu frame layout: address, fc, data, crc low byte first") {
    Pdu pdu;
    pdu.function_code = 0x03;
    pdu.data = {0x00, 0x00, 0x00, 0x0A};
    const auto frame = encode_rtu(1, pdu);
    REQUIRE(frame.size() == 8);
    CHECK(frame[0] == 0x01);
    CHECK(frame[1] == 0x03);
    const std::uint16_t crc = crc16(std::span(frame).subspan(0, 6));
    CHECK(frame[6] == (crc & 0xFF));
    CHECK(frame[7] == (crc >> 8));
}

TEST_CASE("rtu broadcast frames carry address zero") {
    Pdu pdu;
    pdu.function_code = 0x05;
    pdu.data = {0x00, 0x00, 0xFF, 0x00};
    CHECK(encode_rtu(0, pdu)[0] == 0x00);
}

TEST_CASE("rtu encode rejects bad inputs") {
    Pdu pdu;
    pdu.function_code = 0x03;
    CHECK_THROWS_AS(encode_rtu(248, pdu), AddressOutOfRange);
    pdu.data.resize(253);
    CHECK_THROWS_AS(encode_rtu(1, pdu), PduTooLong);
}

TEST_CASE("rtu decode detects corruption and short frames") {
    Pdu pdu;
    pdu.function_code = 0x04;
    pdu.data = {0x00, 0x01, 0x00, 0x02};
    auto frame = encode_rtu(9, pdu);
    frame.back() ^= 0x01;
    CHECK_THROWS_AS(decode_rtu(frame), CrcMismatch);

    const std::vector<std::uint8_t> tiny{0x01, 0x03, 0xFF};
    CHECK_THROWS_AS(decode_rtu(tiny), FrameTooShort);
}

TEST_CASE("rtu round-trip identity on random frames") {
    icsim::world::Rng rng(0xB0B);
    for (int trial = 0; trial < 10000; ++trial) {
        const auto address = static_cast<std::uint8_t>(rng.uniform_int(0, 247));
        const Pdu pdu = random_pdu(rng);
        const auto decoded = decode_rtu(encode_rtu(address, pdu));
        CAPTURE(trial);
        REQUIRE(decoded.address == address);
        REQUIRE(decoded.pdu == pdu);
    }
}

TEST_CASE("single-bit corruption of an rtu frame never decodes unchanged") {
    icsim::world::Rng rng(0xC0FFEE);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto address = static_cast<std::uint8_t>(rng.uniform_int(0, 247));
        const Pdu pdu = random_pdu(rng, 32);
        auto frame = encode_rtu(address, pdu);
        const auto byte = rng.uniform_int(0, static_cast<std::int64_t>(frame.size()) - 1);
        const auto bit = rng.uniform_int(0, 7);
        frame[byte] ^= static_cast<std::uint8_t>(1u << bit);
        CAPTURE(trial);
        try {
            const auto decoded = decode_rtu(frame);
            // A flipped bit that still passes CRC must at least change the
            // decoded content.
            REQUIRE((decoded.address != address || !(decoded.pdu == pdu)));
        } catch (const CrcMismatch&) {
            // detected, as expected
        }
    }
}

TEST_CASE("tcp frame layout and validation") {
    TcpAdu adu;
    adu.transaction_id = 0x1234;
    adu.unit_id = 7;
    adu.pdu.function_code = 0x03;
    adu.pdu.data = {0x00, 0x10, 0x00, 0x02};
    auto frame = encode_tcp(adu);
    REQUIRE(frame.size() == 12);
    CHECK(frame[0] == 0x12);
    CHECK(frame[1] == 0x34);
    CHECK(frame[2] == 0x00);  // protocol id
    CHECK(frame[3] == 0x00);
    CHECK(frame[4] == 0x00);  // length = 1 + 1 + 4
    CHECK(frame[5] == 0x06);
    CHECK(frame[6] == 7);

    SUBCASE("non-zero protocol id is rejected") {
        frame[3] = 5;
        CHECK_THROWS_AS(decode_tcp(frame), ProtocolIdNonZero);
    }
    SUBCASE("inconsistent length field is rejected") {
        frame[5] = 0x07;
        CHECK_THROWS_AS(decode_tcp(frame), LengthMismatch);
    }
    SUBCASE("short frames are rejected") {
        const std::vector<std::uint8_t> tiny(frame.begin(), frame.begin() + 7);
        CHECK_THROWS_AS(decode_tcp(tiny), FrameTooShort);
    }
}

TEST_CASE("tcp round-trip identity on random frames") {
    icsim::world::Rng rng(0x7CB);
    for (int trial = 0; trial < 10000; ++trial) {
        TcpAdu adu;
        adu.transaction_id = static_cast<std::uint16_t>(rng.uniform_int(0, 0xFFFF));
        adu.unit_id = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
        adu.pdu = random_pdu(rng);
        CAPTURE(trial);
        REQUIRE(decode_tcp(encode_tcp(adu)) == adu);
    }
}
