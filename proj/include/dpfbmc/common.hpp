#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpfbmc {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;
using RVec = std::vector<double>;

/// Engine used for every random draw. Streams are derived per trial, see harness.hpp.
using Rng = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;

/// Bad argument value (filter order, roll-off, cyclic prefix, ...).
class ParameterError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Buffer too short or sizes that do not line up.
class LengthError : public std::length_error {
  public:
    using std::length_error::length_error;
};

/// Rejected experiment configuration.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

/// Dense time-frequency grid. Stored time-major: all subcarriers of one
/// time index are contiguous, which is what the per-symbol FFTs consume.
template <typename T>
class Grid {
  public:
    Grid() = default;
    Grid(std::size_t subcarriers, std::size_t times, T fill = T{})
        : subcarriers_(subcarriers), times_(times), data_(subcarriers * times, fill) {}

    std::size_t subcarriers() const { return subcarriers_; }
    std::size_t times() const { return times_; }

    T& at(std::size_t n, std::size_t m) { return data_[m * subcarriers_ + n]; }
    const T& at(std::size_t n, std::size_t m) const { return data_[m * subcarriers_ + n]; }

    T* column(std::size_t m) { return data_.data() + m * subcarriers_; }
    const T* column(std::size_t m) const { return data_.data() + m * subcarriers_; }

    std::vector<T>& raw() { return data_; }
    const std::vector<T>& raw() const { return data_; }

    bool operator==(const Grid&) const = default;

  private:
    std::size_t subcarriers_ = 0;
    std::size_t times_ = 0;
    std::vector<T> data_;
};

using RealGrid = Grid<double>;
using ComplexGrid = Grid<Complex>;

} // namespace dpfbmc
