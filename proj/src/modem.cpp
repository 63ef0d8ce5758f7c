#include "dpfbmc/modem.hpp"

#include "dpfbmc/fft.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

namespace dpfbmc {
namespace {

double pam_scale(Modulation m) {
    return m == Modulation::QPSK ? 1.0 / std::sqrt(2.0) : 1.0 / std::sqrt(10.0);
}

// Per-bin part of the synthesis phase that does not depend on m:
// e^{-j2pi nu D / M} references the modulation to the filter centre.
CVec centre_twiddles(const ProtoFilter& f) {
    const std::size_t M = f.M;
    const double D = f.centre();
    CVec tw(M);
    for (std::size_t n = 0; n < M; ++n)
        tw[n] = std::polar(1.0, -2.0 * kPi * static_cast<double>(signed_frequency(n, M)) * D / static_cast<double>(M));
    return tw;
}

// j^{n+m} (-1)^{n m}: lattice phase plus the e^{j pi n m} that the M/2 shift
// of the modulation window introduces.
Complex block_phase(std::size_t n, std::size_t m) {
    Complex ph = phase(static_cast<long>(n), static_cast<long>(m));
    return ((n & 1) && (m & 1)) ? -ph : ph;
}

void check_filter_grid(std::size_t subcarriers, const ProtoFilter& f) {
    if (subcarriers != f.M)
        throw ParameterError("grid has " + std::to_string(subcarriers) + " subcarriers, filter expects " +
                             std::to_string(f.M));
}

// One synthesis block: IFFT of the rotated column, periodically extended
// over K*M samples and weighted by the taps.
void synthesis_block(const RealGrid& cells, const ProtoFilter& f, const CVec& tw, std::size_t m,
                     std::span<Complex> block, CVec& scratch) {
    const std::size_t M = f.M;
    scratch.assign(M, Complex{});
    const double* col = cells.column(m);
    for (std::size_t n = 0; n < M; ++n)
        if (col[n] != 0.0)
            scratch[n] = col[n] * block_phase(n, m) * tw[n];
    fft_inverse(scratch);
    for (std::size_t k = 0; k < block.size(); ++k)
        block[k] = f.taps[k] * scratch[k % M];
}

void analysis_block(std::span<const Complex> sig, const ProtoFilter& f, const CVec& tw, std::size_t m,
                    ComplexGrid& out, CVec& scratch) {
    const std::size_t M = f.M;
    const std::size_t L = f.length();
    const std::size_t start = m * M / 2;
    scratch.assign(M, Complex{});
    for (std::size_t k = 0; k < L; ++k)
        scratch[k % M] += sig[start + k] * f.taps[k];
    fft_forward(scratch);
    Complex* col = out.column(m);
    for (std::size_t n = 0; n < M; ++n)
        col[n] = scratch[n] * std::conj(block_phase(n, m) * tw[n]);
}

} // namespace

std::string_view to_string(Modulation m) { return m == Modulation::QPSK ? "qpsk" : "qam16"; }

Modulation modulation_from_string(std::string_view text) {
    if (text == "qpsk") return Modulation::QPSK;
    if (text == "qam16" || text == "16qam") return Modulation::QAM16;
    throw ParameterError("unknown modulation '" + std::string(text) + "'");
}

int bits_per_symbol(Modulation m) { return m == Modulation::QPSK ? 2 : 4; }

double pam_map(std::span<const std::uint8_t> bits, Modulation m) {
    // Gray labels: sign bit first (0 -> positive), then 0 -> inner level.
    const double sign = bits[0] ? -1.0 : 1.0;
    double level = 1.0;
    if (m == Modulation::QAM16)
        level = bits[1] ? 3.0 : 1.0;
    return sign * level * pam_scale(m);
}

void pam_demap(double value, Modulation m, std::span<std::uint8_t> out) {
    out[0] = value < 0.0 ? 1 : 0;
    if (m == Modulation::QAM16)
        out[1] = std::abs(value) > 2.0 * pam_scale(m) ? 1 : 0;
}

CVec qam_map(std::span<const std::uint8_t> bits, Modulation m) {
    const auto b = static_cast<std::size_t>(bits_per_symbol(m));
    if (bits.size() % b != 0)
        throw ParameterError("bit count " + std::to_string(bits.size()) + " is not a multiple of " +
                             std::to_string(b));
    const auto half = b / 2;
    CVec out(bits.size() / b);
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto label = bits.subspan(i * b, b);
        out[i] = {pam_map(label.first(half), m), pam_map(label.subspan(half), m)};
    }
    return out;
}

Bits qam_demap(std::span<const Complex> symbols, Modulation m) {
    const auto b = static_cast<std::size_t>(bits_per_symbol(m));
    const auto half = b / 2;
    Bits out(symbols.size() * b);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        std::span<std::uint8_t> label(out.data() + i * b, b);
        pam_demap(symbols[i].real(), m, label.first(half));
        pam_demap(symbols[i].imag(), m, label.subspan(half));
    }
    return out;
}

std::size_t SubcarrierLayout::bin_of(long freq) const {
    const auto n = static_cast<long>(N);
    return static_cast<std::size_t>(((freq % n) + n) % n);
}

SubcarrierLayout make_layout(std::size_t M, std::size_t guard_left, std::size_t guard_right,
                             std::size_t oversample) {
    if (!is_power_of_two(M) || M < 4)
        throw ParameterError("M must be a power of two >= 4");
    if (oversample == 0 || !is_power_of_two(oversample))
        throw ParameterError("oversampling factor must be a power of two");
    if (guard_left + guard_right + 1 >= M)
        throw ParameterError("guards leave no active subcarriers");

    SubcarrierLayout lay;
    lay.base_M = M;
    lay.N = M * oversample;
    lay.guard_left = guard_left;
    lay.guard_right = guard_right;
    lay.active.assign(lay.N, false);
    const long lo = -static_cast<long>(M / 2) + static_cast<long>(guard_left);
    const long hi = static_cast<long>(M / 2) - static_cast<long>(guard_right);
    for (long fr = lo; fr < hi; ++fr) {
        if (fr == 0)
            continue;
        const auto n = lay.bin_of(fr);
        lay.active[n] = true;
        lay.active_bins.push_back(n);
    }
    return lay;
}

RealGrid oqam_stagger(const ComplexGrid& qam) {
    RealGrid out(qam.subcarriers(), 2 * qam.times());
    for (std::size_t k = 0; k < qam.times(); ++k)
        for (std::size_t n = 0; n < qam.subcarriers(); ++n) {
            out.at(n, 2 * k) = qam.at(n, k).real();
            out.at(n, 2 * k + 1) = qam.at(n, k).imag();
        }
    return out;
}

ComplexGrid oqam_destagger(const RealGrid& cells) {
    ComplexGrid out(cells.subcarriers(), cells.times() / 2);
    for (std::size_t k = 0; k < out.times(); ++k)
        for (std::size_t n = 0; n < cells.subcarriers(); ++n)
            out.at(n, k) = {cells.at(n, 2 * k), cells.at(n, 2 * k + 1)};
    return out;
}

std::size_t fbmc_frame_length(std::size_t M, int K, std::size_t S) {
    if (S == 0)
        return 0;
    return (2 * S - 1) * M / 2 + static_cast<std::size_t>(K) * M;
}

CVec fbmc_modulate(const RealGrid& cells, const ProtoFilter& f, Exec exec) {
    check_filter_grid(cells.subcarriers(), f);
    const std::size_t M = f.M;
    const std::size_t L = f.length();
    const std::size_t halves = cells.times();
    if (halves == 0)
        return {};
    const std::size_t out_len = (halves - 1) * M / 2 + L;
    const CVec tw = centre_twiddles(f);

    CVec blocks(halves * L);
    const bool par = exec == Exec::Parallel;
#pragma omp parallel if (par)
    {
        CVec scratch;
#pragma omp for schedule(static)
        for (long m = 0; m < static_cast<long>(halves); ++m)
            synthesis_block(cells, f, tw, static_cast<std::size_t>(m),
                            std::span<Complex>(blocks.data() + m * L, L), scratch);
    }

    // Gather in ascending m so the summation order matches a serial overlap-add.
    CVec out(out_len);
    const std::size_t hop = M / 2;
#pragma omp parallel for schedule(static) if (par)
    for (long i = 0; i < static_cast<long>(out_len); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const std::size_t m_hi = std::min(halves - 1, idx / hop);
        const std::size_t m_lo = idx >= L ? (idx - L) / hop + 1 : 0;
        Complex acc{};
        for (std::size_t m = m_lo; m <= m_hi; ++m)
            acc += blocks[m * L + (idx - m * hop)];
        out[idx] = acc;
    }
    return out;
}

BasebandSignal fbmc_modulate(const SymbolGrid& grid, const ProtoFilter& f, double sample_rate, Exec exec) {
    return {fbmc_modulate(grid.cells, f, exec), {}, sample_rate};
}

CVec fbmc_modulate_direct(const RealGrid& cells, const ProtoFilter& f) {
    check_filter_grid(cells.subcarriers(), f);
    const std::size_t M = f.M;
    const std::size_t L = f.length();
    const std::size_t halves = cells.times();
    if (halves == 0)
        return {};
    const double D = f.centre();
    CVec out((halves - 1) * M / 2 + L);
    for (std::size_t k = 0; k < out.size(); ++k) {
        Complex acc{};
        for (std::size_t m = 0; m < halves; ++m) {
            const long tap = static_cast<long>(k) - static_cast<long>(m * M / 2);
            if (tap < 0 || tap >= static_cast<long>(L))
                continue;
            for (std::size_t n = 0; n < M; ++n) {
                const double a = cells.at(n, m);
                if (a == 0.0)
                    continue;
                const double nu = static_cast<double>(signed_frequency(n, M));
                const double arg = 2.0 * kPi * nu * (static_cast<double>(k) - D) / static_cast<double>(M);
                acc += a * f.taps[tap] * std::polar(1.0, arg) *
                       phase(static_cast<long>(n), static_cast<long>(m));
            }
        }
        out[k] = acc;
    }
    return out;
}

ComplexGrid fbmc_demodulate(std::span<const Complex> sig, const ProtoFilter& f, std::size_t S, Exec exec) {
    const std::size_t M = f.M;
    const std::size_t halves = 2 * S;
    if (S > 0 && sig.size() < fbmc_frame_length(M, f.K, S))
        throw LengthError("signal of " + std::to_string(sig.size()) + " samples is too short for " +
                          std::to_string(S) + " symbols");
    ComplexGrid out(M, halves);
    const CVec tw = centre_twiddles(f);
    const bool par = exec == Exec::Parallel;
#pragma omp parallel if (par)
    {
        CVec scratch;
#pragma omp for schedule(static)
        for (long m = 0; m < static_cast<long>(halves); ++m)
            analysis_block(sig, f, tw, static_cast<std::size_t>(m), out, scratch);
    }
    return out;
}

ComplexGrid fbmc_demodulate_direct(std::span<const Complex> sig, const ProtoFilter& f, std::size_t S) {
    const std::size_t M = f.M;
    const std::size_t L = f.length();
    if (S > 0 && sig.size() < fbmc_frame_length(M, f.K, S))
        throw LengthError("signal too short");
    const double D = f.centre();
    ComplexGrid out(M, 2 * S);
    for (std::size_t m = 0; m < 2 * S; ++m)
        for (std::size_t n = 0; n < M; ++n) {
            const double nu = static_cast<double>(signed_frequency(n, M));
            Complex acc{};
            for (std::size_t t = 0; t < L; ++t) {
                const std::size_t k = m * M / 2 + t;
                const double arg = -2.0 * kPi * nu * (static_cast<double>(k) - D) / static_cast<double>(M);
                acc += sig[k] * f.taps[t] * std::polar(1.0, arg);
            }
            out.at(n, m) = acc * std::conj(phase(static_cast<long>(n), static_cast<long>(m)));
        }
    return out;
}

BasebandSignal dp_modulate(const SymbolGrid& grid, StructureId s, const ProtoFilter& f, double sample_rate,
                           Exec exec) {
    if (s == StructureId::Conventional)
        throw ParameterError("dual-polarization modulation needs a TPDM, FPDM or TFPDM structure");
    check_filter_grid(grid.cells.subcarriers(), f);
    RealGrid v(grid.cells.subcarriers(), grid.cells.times());
    RealGrid h = v;
    for (std::size_t m = 0; m < v.times(); ++m)
        for (std::size_t n = 0; n < v.subcarriers(); ++n) {
            const double a = grid.cells.at(n, m);
            if (assign_polarization(s, static_cast<long>(n), static_cast<long>(m)) == Polarization::V)
                v.at(n, m) = a;
            else
                h.at(n, m) = a;
        }
    return {fbmc_modulate(v, f, exec), fbmc_modulate(h, f, exec), sample_rate};
}

DualGrids dp_demodulate_both(const BasebandSignal& sig, const ProtoFilter& f, std::size_t S, Exec exec) {
    if (!sig.dual())
        throw LengthError("dual-polarization demodulation needs both polarization streams");
    if (sig.pol_v.size() != sig.pol_h.size())
        throw LengthError("polarization streams differ in length");
    return {fbmc_demodulate(sig.pol_v, f, S, exec), fbmc_demodulate(sig.pol_h, f, S, exec)};
}

ComplexGrid dp_select(const DualGrids& both, StructureId s) {
    if (s == StructureId::Conventional)
        throw ParameterError("dual-polarization selection needs a dual structure");
    ComplexGrid out(both.v.subcarriers(), both.v.times());
    for (std::size_t m = 0; m < out.times(); ++m)
        for (std::size_t n = 0; n < out.subcarriers(); ++n)
            out.at(n, m) = assign_polarization(s, static_cast<long>(n), static_cast<long>(m)) == Polarization::V
                               ? both.v.at(n, m)
                               : both.h.at(n, m);
    return out;
}

ComplexGrid dp_demodulate(const BasebandSignal& sig, StructureId s, const ProtoFilter& f, std::size_t S) {
    return dp_select(dp_demodulate_both(sig, f, S), s);
}

CVec cpofdm_modulate(const ComplexGrid& qam, std::size_t cp_len) {
    const std::size_t M = qam.subcarriers();
    if (cp_len >= M)
        throw ParameterError("cyclic prefix must be shorter than the symbol");
    const std::size_t sym_len = M + cp_len;
    const double scale = 1.0 / std::sqrt(static_cast<double>(M));
    CVec out(qam.times() * sym_len);
    CVec scratch(M);
    for (std::size_t k = 0; k < qam.times(); ++k) {
        std::copy(qam.column(k), qam.column(k) + M, scratch.begin());
        fft_inverse(scratch);
        Complex* dst = out.data() + k * sym_len;
        for (std::size_t i = 0; i < cp_len; ++i)
            dst[i] = scratch[M - cp_len + i] * scale;
        for (std::size_t i = 0; i < M; ++i)
            dst[cp_len + i] = scratch[i] * scale;
    }
    return out;
}

ComplexGrid cpofdm_demodulate(std::span<const Complex> sig, std::size_t M, std::size_t cp_len, std::size_t S) {
    if (cp_len >= M)
        throw ParameterError("cyclic prefix must be shorter than the symbol");
    const std::size_t sym_len = M + cp_len;
    if (sig.size() < S * sym_len)
        throw LengthError("signal too short for " + std::to_string(S) + " OFDM symbols");
    const double scale = 1.0 / std::sqrt(static_cast<double>(M));
    ComplexGrid out(M, S);
    CVec scratch(M);
    for (std::size_t k = 0; k < S; ++k) {
        const Complex* src = sig.data() + k * sym_len + cp_len;
        std::copy(src, src + M, scratch.begin());
        fft_forward(scratch);
        for (std::size_t n = 0; n < M; ++n)
            out.at(n, k) = scratch[n] * scale;
    }
    return out;
}

} // namespace dpfbmc
