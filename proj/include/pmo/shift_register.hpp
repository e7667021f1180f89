#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pmo {

/// Fixed-width shift register. Bits print MSB first ("1110").
/// With wrap the MSB re-enters at the LSB on every left shift; without it a
/// zero is shifted in.
class ShiftRegister {
public:
    ShiftRegister() = default;
    ShiftRegister(int width, std::uint32_t bits, bool wrap);

    /// Parses an MSB-first bit string such as "1110".
    static ShiftRegister from_string(std::string_view bits, bool wrap);

    void shift_left();

    [[nodiscard]] bool msb() const { return (bits_ >> (width_ - 1)) & 1u; }
    [[nodiscard]] bool lsb() const { return bits_ & 1u; }
    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] bool wrap() const { return wrap_; }
    [[nodiscard]] std::uint32_t bits() const { return bits_; }
    [[nodiscard]] int popcount() const;
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const ShiftRegister&, const ShiftRegister&) = default;

private:
    int width_ = 1;
    std::uint32_t bits_ = 0;
    bool wrap_ = true;
};

}  // namespace pmo
