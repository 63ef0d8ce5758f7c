#pragma once

#include "dpfbmc/common.hpp"

#include <cstdint>
#include <span>

namespace dpfbmc {

struct BerRecord {
    std::uint64_t bits_sent = 0;
    std::uint64_t bit_errors = 0;

    double ber() const { return bits_sent ? static_cast<double>(bit_errors) / static_cast<double>(bits_sent) : 0.0; }
    BerRecord& merge(const BerRecord& o) {
        bits_sent += o.bits_sent;
        bit_errors += o.bit_errors;
        return *this;
    }
};

BerRecord ber_count(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx);

/// 10 log10(max |x|^2 / mean |x|^2).
double papr_db(std::span<const Complex> frame);

struct PaprCcdf {
    RVec thresholds_db;
    RVec ccdf;
};

/// Empirical P(PAPR > threshold) from per-frame PAPR values.
PaprCcdf papr_ccdf(std::span<const double> papr_values_db, std::span<const double> thresholds_db);

/// P(PAPR > gamma) for N independent complex Gaussian samples: 1 - (1 - e^{-gamma})^N.
double papr_ccdf_gaussian(double threshold_db, std::size_t N);

/// Hann-windowed Welch estimate, linear power, bins ordered from -1/2 to
/// 1/2 cycles/sample (DC at nfft/2). Segments hop nfft*(1-overlap).
RVec welch_power(std::span<const Complex> signal, std::size_t nfft, double overlap = 0.5);

struct PsdSeries {
    RVec freq;   ///< cycles per sample, -0.5 .. 0.5
    RVec psd_db; ///< peak at 0 dB
};

PsdSeries psd_welch(std::span<const Complex> signal, std::size_t nfft, double overlap = 0.5);

/// Peak-normalises a linear spectrum from welch_power into a dB series.
PsdSeries to_psd_series(std::span<const double> power);

} // namespace dpfbmc
