#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fedgwc {

inline constexpr std::string_view kVersion = "0.1.0";

using ClientId = std::int32_t;

// Error taxonomy; the CLI maps these onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration value or malformed config file.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Mismatched dimensions, lengths, or empty input where data is required.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Value outside its admissible range, or an invalid index combination.
class DomainError : public Error {
public:
    using Error::Error;
};

// Cohort or cluster below the minimum size needed for the operation.
class CohortError : public Error {
public:
    using Error::Error;
};

// Non-finite loss encountered during local training.
class DivergenceError : public Error {
public:
    using Error::Error;
};

// Missing or unreadable input artifacts.
class IoError : public Error {
public:
    using Error::Error;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Tags keeping independent random streams apart when folded into one seed.
enum class SeedDomain : std::uint64_t {
    ModelInit = 1,
    Sampler = 2,
    Train = 3,
    Cluster = 4,
    Datagen = 5,
    Round = 6,
};

inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (std::uint64_t p : parts) h = splitmix64(h ^ p);
    return h;
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed));
}

// FNV-1a over raw bytes; used for manifest integrity records, not security.
inline std::uint64_t fnv1a(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_hex(std::uint64_t value);

}  // namespace fedgwc
