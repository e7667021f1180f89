#include "pmo/shift_register.hpp"

#include <bit>

#include "pmo/errors.hpp"

namespace pmo {

ShiftRegister::ShiftRegister(int width, std::uint32_t bits, bool wrap)
    : width_(width), bits_(bits), wrap_(wrap) {
    if (width < 1 || width > 32) throw DomainError("shift register width must be in [1, 32]");
    if (width < 32 && (bits >> width) != 0) {
        throw DomainError("shift register contents exceed its width");
    }
}

ShiftRegister ShiftRegister::from_string(std::string_view bits, bool wrap) {
    if (bits.empty() || bits.size() > 32) throw DomainError("register bit string must be 1-32 chars");
    std::uint32_t value = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw DomainError("register bit string may only contain '0' and '1': " +
                              std::string(bits));
        }
        value = (value << 1) | static_cast<std::uint32_t>(c - '0');
    }
    return ShiftRegister(static_cast<int>(bits.size()), value, wrap);
}

void ShiftRegister::shift_left() {
    const std::uint32_t mask = width_ == 32 ? ~0u : ((1u << width_) - 1u);
    const std::uint32_t carry = wrap_ && msb() ? 1u : 0u;
    bits_ = ((bits_ << 1) | carry) & mask;
}

int ShiftRegister::popcount() const { return std::popcount(bits_); }

std::string ShiftRegister::to_string() const {
    std::string out(static_cast<std::size_t>(width_), '0');
    for (int i = 0; i < width_; ++i) {
        if ((bits_ >> (width_ - 1 - i)) & 1u) out[static_cast<std::size_t>(i)] = '1';
    }
    return out;
}

}  // namespace pmo
