#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace swaprank {

// 64-bit FNV-1a.
class Fnv1a {
public:
    void update(std::string_view bytes) {
        for (unsigned char c : bytes) {
            hash_ ^= c;
            hash_ *= 0x100000001b3ULL;
        }
    }
    void update(double x) {
        auto bits = std::bit_cast<std::uint64_t>(x);
        for (int i = 0; i < 8; ++i, bits >>= 8) {
            hash_ ^= bits & 0xffU;
            hash_ *= 0x100000001b3ULL;
        }
    }
    void update(std::span<const double> xs) {
        for (double x : xs) update(x);
    }
    std::uint64_t digest() const { return hash_; }
    std::string hex() const;

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

inline std::string Fnv1a::hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    std::uint64_t h = hash_;
    for (int i = 15; i >= 0; --i, h >>= 4) out[i] = digits[h & 0xfU];
    return out;
}

}  // namespace swaprank
