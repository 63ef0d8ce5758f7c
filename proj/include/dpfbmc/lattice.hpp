#pragma once

#include "dpfbmc/common.hpp"

#include <string_view>

namespace dpfbmc {

/// How lattice cells are split between the two polarizations.
///   Conventional  single polarization (plain OFDM-OQAM)
///   TPDM          Structure I, alternate half-symbols
///   FPDM          Structure II, alternate subcarriers
///   TFPDM         Structure III, checkerboard
enum class StructureId { Conventional, TPDM, FPDM, TFPDM };

enum class Polarization { V, H };

std::string_view to_string(StructureId s);
StructureId structure_from_string(std::string_view text);

/// j^{n+m}; period 4 in n+m.
Complex phase(long n, long m);

/// Even parity maps to V for every dual structure.
Polarization assign_polarization(StructureId s, long n, long m);

/// Row-major (2*dp+1) x (2*dq+1) mask, true where the offset (p, q) lands on
/// the same polarization as the reference cell.
class PolarizationMask {
  public:
    PolarizationMask(int dp, int dq);

    int dp() const { return dp_; }
    int dq() const { return dq_; }
    bool operator()(int p, int q) const { return cells_[index(p, q)]; }
    void set(int p, int q, bool v) { cells_[index(p, q)] = v; }

  private:
    std::size_t index(int p, int q) const;

    int dp_;
    int dq_;
    std::vector<bool> cells_;
};

/// The assignments depend only on parities, so the mask is the same for every
/// reference cell; it is evaluated at (0, 0).
PolarizationMask same_pol_mask(StructureId s, int dp, int dq);

} // namespace dpfbmc
