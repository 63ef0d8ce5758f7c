#pragma once

#include "dpfbmc/common.hpp"
#include "dpfbmc/filters.hpp"
#include "dpfbmc/lattice.hpp"

#include <cstdint>
#include <span>
#include <string_view>

namespace dpfbmc {

using Bits = std::vector<std::uint8_t>;

enum class Modulation { QPSK, QAM16 };

std::string_view to_string(Modulation m);
Modulation modulation_from_string(std::string_view text);

/// Bits carried by one complex constellation point (2 or 4).
int bits_per_symbol(Modulation m);

/// Gray-mapped, unit average energy. The first half of each label drives the
/// in-phase level and the second half the quadrature level, so every OQAM
/// half-symbol carries exactly bits_per_symbol/2 bits of its own.
CVec qam_map(std::span<const std::uint8_t> bits, Modulation m);
Bits qam_demap(std::span<const Complex> symbols, Modulation m);

/// One real (PAM) dimension of the constellation: bits_per_symbol/2 bits.
double pam_map(std::span<const std::uint8_t> bits, Modulation m);
void pam_demap(double value, Modulation m, std::span<std::uint8_t> out);

/// Signed frequency index of FFT bin n for an N-point transform.
inline long signed_frequency(std::size_t n, std::size_t N) {
    return n < N / 2 ? static_cast<long>(n) : static_cast<long>(n) - static_cast<long>(N);
}

/// Active/guard/DC split of the FFT bins. The occupied band is laid out on a
/// base of M subcarriers (guards at both band edges, DC nulled) and may be
/// embedded in an oversampled transform of size N = M * oversample.
struct SubcarrierLayout {
    std::size_t base_M = 0;
    std::size_t N = 0;
    std::size_t guard_left = 0;
    std::size_t guard_right = 0;
    std::vector<bool> active;             ///< by FFT bin
    std::vector<std::size_t> active_bins; ///< ascending signed frequency

    std::size_t oversample() const { return N / base_M; }
    std::size_t bin_of(long freq) const;
};

SubcarrierLayout make_layout(std::size_t M, std::size_t guard_left, std::size_t guard_right,
                             std::size_t oversample = 1);

/// Real OQAM lattice a_{n,m}: M subcarriers by 2S half-symbols, QAM symbol k
/// occupying half-symbols 2k (in-phase) and 2k+1 (quadrature).
struct SymbolGrid {
    RealGrid cells;
    StructureId structure = StructureId::Conventional;
    std::vector<bool> active; ///< by subcarrier; inactive rows stay zero

    Polarization pol(std::size_t n, std::size_t m) const {
        return assign_polarization(structure, static_cast<long>(n), static_cast<long>(m));
    }
};

struct BasebandSignal {
    CVec pol_v;
    CVec pol_h; ///< empty for single-polarization systems
    double sample_rate = 0.0;

    bool dual() const { return !pol_h.empty(); }
    std::size_t size() const { return pol_v.size(); }
};

/// Selects the OpenMP kernels or their single-threaded counterparts. Both
/// produce bit-identical output.
enum class Exec { Serial, Parallel };

ComplexGrid oqam_destagger(const RealGrid& cells);
RealGrid oqam_stagger(const ComplexGrid& qam);

/// Samples produced for 2S half-symbols: (2S-1) M/2 + K M.
std::size_t fbmc_frame_length(std::size_t M, int K, std::size_t S);

/// Polyphase synthesis: per half-symbol an M-point IFFT of the phase-rotated
/// real symbols, weighted by the K*M filter taps, overlap-added at M/2.
CVec fbmc_modulate(const RealGrid& cells, const ProtoFilter& f, Exec exec = Exec::Parallel);
BasebandSignal fbmc_modulate(const SymbolGrid& grid, const ProtoFilter& f, double sample_rate = 0.0,
                             Exec exec = Exec::Parallel);

/// Sample-by-sample evaluation of the synthesis sum. Reference only, O(L M S).
CVec fbmc_modulate_direct(const RealGrid& cells, const ProtoFilter& f);

/// Matched filter bank + FFT + phase de-rotation. Returns the complex
/// projections onto each translate; the real part is the OQAM decision
/// variable and the imaginary part is the intrinsic interference.
ComplexGrid fbmc_demodulate(std::span<const Complex> sig, const ProtoFilter& f, std::size_t S,
                            Exec exec = Exec::Parallel);
ComplexGrid fbmc_demodulate_direct(std::span<const Complex> sig, const ProtoFilter& f, std::size_t S);

/// Routes each cell to its polarization and synthesises both streams.
BasebandSignal dp_modulate(const SymbolGrid& grid, StructureId s, const ProtoFilter& f, double sample_rate = 0.0,
                           Exec exec = Exec::Parallel);

/// Demodulated grids of both polarizations, every cell.
struct DualGrids {
    ComplexGrid v;
    ComplexGrid h;
};
DualGrids dp_demodulate_both(const BasebandSignal& sig, const ProtoFilter& f, std::size_t S,
                             Exec exec = Exec::Parallel);

/// Picks each cell from the polarization that owns it.
ComplexGrid dp_select(const DualGrids& both, StructureId s);

ComplexGrid dp_demodulate(const BasebandSignal& sig, StructureId s, const ProtoFilter& f, std::size_t S);

/// Unitary IFFT per symbol followed by a cyclic prefix of cp_len samples.
CVec cpofdm_modulate(const ComplexGrid& qam, std::size_t cp_len);
ComplexGrid cpofdm_demodulate(std::span<const Complex> sig, std::size_t M, std::size_t cp_len, std::size_t S);

} // namespace dpfbmc
