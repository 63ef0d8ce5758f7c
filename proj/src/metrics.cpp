#include "dpfbmc/metrics.hpp"

#include "dpfbmc/fft.hpp"

#include <algorithm>
#include <cmath>

namespace dpfbmc {

BerRecord ber_count(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx) {
    if (tx.size() != rx.size())
        throw LengthError("bit streams differ in length: " + std::to_string(tx.size()) + " vs " +
                          std::to_string(rx.size()));
    BerRecord r;
    r.bits_sent = tx.size();
    for (std::size_t i = 0; i < tx.size(); ++i)
        r.bit_errors += (tx[i] != 0) != (rx[i] != 0);
    return r;
}

double papr_db(std::span<const Complex> frame) {
    if (frame.empty())
        throw LengthError("PAPR of an empty frame");
    double peak = 0.0;
    double sum = 0.0;
    for (const auto& s : frame) {
        const double p = std::norm(s);
        peak = std::max(peak, p);
        sum += p;
    }
    if (sum == 0.0)
        throw ParameterError("PAPR of a zero-power frame");
    return 10.0 * std::log10(peak * static_cast<double>(frame.size()) / sum);
}

PaprCcdf papr_ccdf(std::span<const double> papr_values_db, std::span<const double> thresholds_db) {
    RVec sorted(papr_values_db.begin(), papr_values_db.end());
    std::sort(sorted.begin(), sorted.end());
    PaprCcdf out;
    out.thresholds_db.assign(thresholds_db.begin(), thresholds_db.end());
    std::sort(out.thresholds_db.begin(), out.thresholds_db.end());
    for (double t : out.thresholds_db) {
        if (sorted.empty()) {
            out.ccdf.push_back(0.0);
            continue;
        }
        const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t);
        out.ccdf.push_back(static_cast<double>(above) / static_cast<double>(sorted.size()));
    }
    return out;
}

double papr_ccdf_gaussian(double threshold_db, std::size_t N) {
    const double g = std::pow(10.0, threshold_db / 10.0);
    return -std::expm1(static_cast<double>(N) * std::log1p(-std::exp(-g)));
}

RVec welch_power(std::span<const Complex> signal, std::size_t nfft, double overlap) {
    if (nfft < 2)
        throw ParameterError("Welch segment must have at least two samples");
    if (!(overlap >= 0.0 && overlap < 1.0))
        throw ParameterError("Welch overlap must be in [0, 1)");
    if (signal.size() < nfft)
        throw LengthError("signal of " + std::to_string(signal.size()) + " samples is shorter than nfft " +
                          std::to_string(nfft));
    const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(nfft * (1.0 - overlap))));

    RVec win(nfft);
    double wpow = 0.0;
    for (std::size_t i = 0; i < nfft; ++i) {
        win[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(nfft - 1));
        wpow += win[i] * win[i];
    }

    RVec acc(nfft);
    CVec seg(nfft);
    std::size_t count = 0;
    for (std::size_t start = 0; start + nfft <= signal.size(); start += hop) {
        for (std::size_t i = 0; i < nfft; ++i)
            seg[i] = signal[start + i] * win[i];
        fft_forward(seg);
        for (std::size_t i = 0; i < nfft; ++i)
            acc[(i + nfft / 2) % nfft] += std::norm(seg[i]);
        ++count;
    }
    for (auto& v : acc)
        v /= wpow * static_cast<double>(count);
    return acc;
}

PsdSeries to_psd_series(std::span<const double> power) {
    const std::size_t nfft = power.size();
    PsdSeries out;
    const double peak = nfft ? *std::max_element(power.begin(), power.end()) : 0.0;
    if (!(peak > 0.0))
        throw ParameterError("PSD of a zero-power signal");
    for (std::size_t i = 0; i < nfft; ++i) {
        out.freq.push_back((static_cast<double>(i) - static_cast<double>(nfft / 2)) / static_cast<double>(nfft));
        out.psd_db.push_back(10.0 * std::log10(std::max(power[i] / peak, 1e-30)));
    }
    return out;
}

PsdSeries psd_welch(std::span<const Complex> signal, std::size_t nfft, double overlap) {
    return to_psd_series(welch_power(signal, nfft, overlap));
}

} // namespace dpfbmc
