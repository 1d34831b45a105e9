#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsdist::datasets {

// Fatigue life of 6061-T6 aluminum coupons (cycles x 10^3 at 31,000 psi).
inline const std::vector<double>& fatigue() {
    static const std::vector<double> d = {
        70,  90,  96,  97,  99,  100, 103, 104, 104, 105, 107, 108, 108, 108, 109,
        109, 112, 112, 113, 114, 114, 114, 116, 119, 120, 120, 120, 121, 121, 123,
        124, 124, 124, 124, 124, 128, 128, 129, 129, 130, 130, 130, 131, 131, 131,
        131, 131, 132, 132, 132, 133, 134, 134, 134, 134, 134, 136, 136, 137, 138,
        138, 138, 139, 139, 141, 141, 142, 142, 142, 142, 142, 142, 144, 144, 145,
        146, 148, 148, 149, 151, 151, 152, 155, 156, 157, 157, 157, 157, 158, 159,
        162, 163, 163, 164, 166, 166, 168, 170, 174, 196, 212};
    return d;
}

// Aggregate third-party motor insurance payments, thousand Skr.
inline const std::vector<double>& insurance() {
    static const std::vector<double> d = {
        5014,  5855,  6486,  6540,  6656,  6656,  7212,  7541,  7558,  7797,
        8546,  9345,  11762, 12478, 13624, 14451, 14940, 14963, 15092, 16203,
        16229, 16730, 18027, 18343, 19365, 21782, 24248, 29069, 34267, 38993};
    return d;
}

// Fatigue life in hours of ten ball bearings.
inline const std::vector<double>& ball_bearings() {
    static const std::vector<double> d = {152.7, 172.0, 172.5, 173.3, 193.0,
                                          204.7, 216.5, 234.9, 262.6, 422.6};
    return d;
}

// Bone mineral density of the dominant radius, before / after one year (g/cm^2).
inline const std::vector<std::array<double, 2>>& bone_mineral() {
    static const std::vector<std::array<double, 2>> d = {
        {1.103, 1.027}, {0.842, 0.857}, {0.925, 0.875}, {0.857, 0.873}, {0.795, 0.811},
        {0.787, 0.640}, {0.933, 0.947}, {0.799, 0.886}, {0.945, 0.991}, {0.921, 0.977},
        {0.792, 0.825}, {0.815, 0.851}, {0.755, 0.770}, {0.880, 0.912}, {0.900, 0.905},
        {0.764, 0.756}, {0.733, 0.765}, {0.932, 0.932}, {0.856, 0.843}, {0.890, 0.879},
        {0.688, 0.673}, {0.940, 0.949}, {0.493, 0.463}, {0.835, 0.776}};
    return d;
}

inline std::vector<double> by_name(const std::string& name) {
    if (name == "fatigue") return fatigue();
    if (name == "insurance") return insurance();
    if (name == "ballbearings" || name == "ball-bearings") return ball_bearings();
    throw std::invalid_argument("unknown dataset: " + name);
}

// FNV-1a over the little-endian bytes of the values; stable data fingerprint.
inline std::uint64_t hash(const std::vector<double>& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (double v : data) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        __builtin_memcpy(&bits, &v, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffu;
            h *= 1099511628211ull;
        }
    }
    return h;
}

}  // namespace bsdist::datasets
