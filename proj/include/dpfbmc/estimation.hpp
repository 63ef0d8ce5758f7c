#pragma once

#include "dpfbmc/common.hpp"
#include "dpfbmc/filters.hpp"
#include "dpfbmc/lattice.hpp"
#include "dpfbmc/modem.hpp"

#include <optional>

namespace dpfbmc {

/// One known pilot cell. For FBMC lattices value is real (imag = 0) and the
/// cell may own an auxiliary cell that cancels its intrinsic interference.
struct PilotCell {
    std::size_t n = 0;
    std::size_t m = 0;
    Polarization pol = Polarization::V;
    Complex value{1.0, 0.0};
    std::optional<std::pair<std::size_t, std::size_t>> aux;
};

/// Scattered pilots: equally spaced subcarriers, every symbol_stride symbols.
struct PilotPattern {
    std::vector<std::size_t> subcarriers; ///< FFT bins, ascending frequency
    std::size_t symbol_stride = 4;
    std::vector<PilotCell> cells;

    bool empty() const { return cells.empty(); }
};

/// count bins spread evenly (by frequency) over the active band, DC avoided.
std::vector<std::size_t> pilot_subcarriers(const SubcarrierLayout& lay, std::size_t count);

/// CP-OFDM pilots at QAM symbols 0, stride, 2*stride, ... with value (1+j)/sqrt(2).
PilotPattern make_ofdm_pilots(const SubcarrierLayout& lay, std::size_t S, std::size_t count = 30,
                              std::size_t stride = 4);

/// OQAM pilots of amplitude 1 at half-symbol 2*k for k = 0, stride, ... For
/// dual structures each polarization gets its own pilot at the nearest cell it
/// owns. Auxiliary cells are chosen by assign_aux_cells().
PilotPattern make_fbmc_pilots(const SubcarrierLayout& lay, std::size_t S, StructureId s, std::size_t count = 30,
                              std::size_t stride = 4);

/// Coefficient multiplying a_{n+p,m+q} in the imaginary part of the
/// demodulated cell (n, m): Im{(-1)^{p m} conj(A(p, q))}.
double interference_coefficient(const AmbiguityTable& table, int p, int q, std::size_t m);

/// Picks, for every pilot, the same-polarization neighbour inside the +-1
/// window with the largest coupling. Conventional lattices use (0, +1).
/// Throws ConfigError when no usable neighbour exists (|coupling| < 1e-3).
void assign_aux_cells(PilotPattern& pat, const SubcarrierLayout& lay, const AmbiguityTable& table, StructureId s);

/// Writes pilot values and sets each auxiliary cell so that the interference
/// summed over the pilot's +-1 same-polarization window vanishes.
SymbolGrid insert_auxiliary_pilots(const SymbolGrid& grid, const AmbiguityTable& table, const PilotPattern& pat);
SymbolGrid insert_auxiliary_pilots(const SymbolGrid& grid, const ProtoFilter& f, const PilotPattern& pat);

/// Per-cell rx / tx.
CVec ls_estimate(std::span<const Complex> rx_pilots, std::span<const Complex> tx_pilots);

/// Keeps delay taps 0..max_delay_taps of the pilot-domain response.
CVec dft_denoise(std::span<const Complex> h_pilots, std::size_t max_delay_taps);

struct ChannelEstimate {
    ComplexGrid H; ///< M x time, meaningful on active subcarriers
};

/// Pilot samples of one polarization: rows of equal-time pilots.
struct PilotRow {
    std::size_t m = 0;
    std::vector<std::size_t> bins;
    CVec values;
};

/// Cubic spline across frequency on each pilot row, linear across time
/// between rows, ends held constant. Needs >= 4 pilots per row and >= 1 row.
ChannelEstimate interpolate_grid(std::span<const PilotRow> rows, const SubcarrierLayout& lay, std::size_t times);

/// Natural cubic spline through (x, y), evaluated at xs; constant beyond the ends.
CVec cubic_spline(std::span<const double> x, std::span<const Complex> y, std::span<const double> xs);

struct Equalized {
    ComplexGrid symbols;
    Grid<std::uint8_t> erased; ///< |H| < 1e-9
};

enum class Decision { Complex, RealPart };

Equalized zf_equalize(const ComplexGrid& rx, const ChannelEstimate& est, Decision d = Decision::Complex);

/// Per-bin co-polar and leakage responses of a dual-polarization link.
struct MixingResponse {
    CVec vv;
    CVec hh;
    CVec vh; ///< V transmitted, seen on H
    CVec hv; ///< H transmitted, seen on V
};

struct XpiCancelled {
    ComplexGrid v;
    ComplexGrid h;
    Grid<std::uint8_t> erased;
};

/// Removes cross-polar interference with known mixing: solves the per-cell
/// 2x2 system and restores the co-polar gain, so the outputs still go through
/// zf_equalize. Infinite XPD (empty leakage) leaves the grids unchanged.
XpiCancelled xpi_cancel(const ComplexGrid& rx_v, const ComplexGrid& rx_h, const MixingResponse& mix);

} // namespace dpfbmc
