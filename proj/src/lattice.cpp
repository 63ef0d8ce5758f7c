#include "dpfbmc/lattice.hpp"

#include <cstdlib>

namespace dpfbmc {

std::string_view to_string(StructureId s) {
    switch (s) {
    case StructureId::Conventional: return "conventional";
    case StructureId::TPDM: return "tpdm";
    case StructureId::FPDM: return "fpdm";
    case StructureId::TFPDM: return "tfpdm";
    }
    return "?";
}

StructureId structure_from_string(std::string_view text) {
    if (text == "conventional" || text == "0") return StructureId::Conventional;
    if (text == "tpdm" || text == "1" || text == "I") return StructureId::TPDM;
    if (text == "fpdm" || text == "2" || text == "II") return StructureId::FPDM;
    if (text == "tfpdm" || text == "3" || text == "III") return StructureId::TFPDM;
    throw ParameterError("unknown structure '" + std::string(text) + "'");
}

Complex phase(long n, long m) {
    static constexpr Complex table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    long r = (n + m) % 4;
    if (r < 0)
        r += 4;
    return table[r];
}

Polarization assign_polarization(StructureId s, long n, long m) {
    auto even = [](long v) { return v % 2 == 0; };
    switch (s) {
    case StructureId::Conventional: return Polarization::V;
    case StructureId::TPDM: return even(m) ? Polarization::V : Polarization::H;
    case StructureId::FPDM: return even(n) ? Polarization::V : Polarization::H;
    case StructureId::TFPDM: return even(n + m) ? Polarization::V : Polarization::H;
    }
    return Polarization::V;
}

PolarizationMask::PolarizationMask(int dp, int dq)
    : dp_(dp), dq_(dq), cells_(static_cast<std::size_t>((2 * dp + 1) * (2 * dq + 1)), false) {
    if (dp < 0 || dq < 0)
        throw ParameterError("mask window must be non-negative");
}

std::size_t PolarizationMask::index(int p, int q) const {
    if (std::abs(p) > dp_ || std::abs(q) > dq_)
        throw ParameterError("mask offset outside window");
    return static_cast<std::size_t>((p + dp_) * (2 * dq_ + 1) + (q + dq_));
}

PolarizationMask same_pol_mask(StructureId s, int dp, int dq) {
    PolarizationMask mask(dp, dq);
    const auto ref = assign_polarization(s, 0, 0);
    for (int p = -dp; p <= dp; ++p)
        for (int q = -dq; q <= dq; ++q)
            mask.set(p, q, assign_polarization(s, p, q) == ref);
    return mask;
}

} // namespace dpfbmc
