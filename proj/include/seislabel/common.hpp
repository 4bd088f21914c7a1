#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace seislabel {

// Base class for all library errors.  Subclasses map onto distinct CLI exit
// codes, so every throw site should pick the most specific category:
//   ConfigError  -- bad parameters, malformed config files, invalid CLI usage
//   DataError    -- malformed/inconsistent input data (files, corpora, labels)
//   NumericError -- degenerate numerical situations (all-zero vectors, ...)
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

// splitmix64 step; used to derive independent child seeds from one root seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic child seed for a named RNG stream.  Every randomized stage
// (synthesis, k-means init, H init, robustness replacement, ...) draws its
// seed through this so that a single root seed fixes the whole pipeline while
// keeping the streams statistically independent.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
    std::uint64_t s = root ^ (0x510e527fade682d1ULL * (stream + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

inline std::mt19937_64 make_rng(std::uint64_t root, std::uint64_t stream) {
    return std::mt19937_64(derive_seed(root, stream));
}

}  // namespace seislabel
