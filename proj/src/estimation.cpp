#include "dpfbmc/estimation.hpp"

#include "dpfbmc/fft.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace dpfbmc {
namespace {

constexpr double kMinAuxCoupling = 1e-3;

// Candidate offsets tried in order when a pilot or its auxiliary cell has to
// move off the nominal position. Frequency neighbours come first so that both
// polarizations of a TFPDM/FPDM pilot pair stay on the same half-symbol.
constexpr std::pair<int, int> kPilotSearch[] = {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1},
                                                {1, 1}, {-1, 1}, {1, -1}, {-1, -1}};
constexpr std::pair<int, int> kAuxSearch[] = {{0, 1}, {0, -1}, {1, 0}, {-1, 0},
                                              {1, 1}, {-1, 1}, {1, -1}, {-1, -1}};

std::size_t wrap_bin(std::size_t n, int p, std::size_t N) {
    const auto Nl = static_cast<long>(N);
    return static_cast<std::size_t>(((static_cast<long>(n) + p) % Nl + Nl) % Nl);
}

bool in_time(std::size_t m, int q, std::size_t times) {
    const long t = static_cast<long>(m) + q;
    return t >= 0 && t < static_cast<long>(times);
}

Polarization owner(StructureId s, std::size_t n, std::size_t m) {
    return s == StructureId::Conventional ? Polarization::V
                                          : assign_polarization(s, static_cast<long>(n), static_cast<long>(m));
}

} // namespace

std::vector<std::size_t> pilot_subcarriers(const SubcarrierLayout& lay, std::size_t count) {
    if (count < 2)
        throw ParameterError("need at least two pilot subcarriers");
    if (lay.active_bins.size() < count)
        throw ParameterError("more pilots than active subcarriers");
    const long lo = signed_frequency(lay.active_bins.front(), lay.N);
    const long hi = signed_frequency(lay.active_bins.back(), lay.N);
    std::vector<std::size_t> bins;
    bins.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        long fr = lo + std::lround(static_cast<double>(j) * static_cast<double>(hi - lo) / static_cast<double>(count - 1));
        // Step off the nulled DC bin towards the band centre of its side.
        while (!lay.active[lay.bin_of(fr)])
            fr += fr <= 0 ? -1 : 1;
        const std::size_t n = lay.bin_of(fr);
        if (!bins.empty() && bins.back() == n)
            throw ParameterError("pilot subcarriers collide; reduce the pilot count");
        bins.push_back(n);
    }
    return bins;
}

PilotPattern make_ofdm_pilots(const SubcarrierLayout& lay, std::size_t S, std::size_t count, std::size_t stride) {
    if (stride == 0)
        throw ParameterError("pilot symbol stride must be positive");
    PilotPattern pat;
    pat.subcarriers = pilot_subcarriers(lay, count);
    pat.symbol_stride = stride;
    const Complex value = Complex{1.0, 1.0} / std::sqrt(2.0);
    for (std::size_t k = 0; k < S; k += stride)
        for (std::size_t n : pat.subcarriers)
            pat.cells.push_back({n, k, Polarization::V, value, std::nullopt});
    return pat;
}

PilotPattern make_fbmc_pilots(const SubcarrierLayout& lay, std::size_t S, StructureId s, std::size_t count,
                              std::size_t stride) {
    if (stride == 0)
        throw ParameterError("pilot symbol stride must be positive");
    PilotPattern pat;
    pat.subcarriers = pilot_subcarriers(lay, count);
    pat.symbol_stride = stride;
    const std::size_t halves = 2 * S;
    const bool dual = s != StructureId::Conventional;
    std::set<std::pair<std::size_t, std::size_t>> used;

    for (std::size_t k = 0; k < S; k += stride) {
        const std::size_t m0 = 2 * k;
        for (std::size_t n0 : pat.subcarriers) {
            for (Polarization pol : {Polarization::V, Polarization::H}) {
                if (pol == Polarization::H && !dual)
                    break;
                bool placed = false;
                for (auto [p, q] : kPilotSearch) {
                    if (!in_time(m0, q, halves))
                        continue;
                    const std::size_t n = wrap_bin(n0, p, lay.N);
                    const std::size_t m = m0 + q;
                    if (!lay.active[n] || owner(s, n, m) != pol || used.contains({n, m}))
                        continue;
                    pat.cells.push_back({n, m, pol, Complex{1.0, 0.0}, std::nullopt});
                    used.insert({n, m});
                    placed = true;
                    break;
                }
                if (!placed)
                    throw ConfigError("no free pilot cell near subcarrier " + std::to_string(n0));
            }
        }
    }
    return pat;
}

double interference_coefficient(const AmbiguityTable& table, int p, int q, std::size_t m) {
    const Complex a = std::conj(table(p, q));
    const bool flip = (p & 1) && (m & 1);
    return flip ? -a.imag() : a.imag();
}

void assign_aux_cells(PilotPattern& pat, const SubcarrierLayout& lay, const AmbiguityTable& table, StructureId s) {
    if (table.dp() < 1 || table.dq() < 1)
        throw ParameterError("auxiliary pilots need a table covering the +-1 window");
    // Pilot cells of both polarizations plus aux cells already taken.
    std::set<std::pair<std::size_t, std::size_t>> taken;
    for (const auto& c : pat.cells)
        taken.insert({c.n, c.m});
    for (auto& c : pat.cells) {
        double best = 0.0;
        std::optional<std::pair<std::size_t, std::size_t>> pick;
        for (auto [p, q] : kAuxSearch) {
            if (static_cast<long>(c.m) + q < 0)
                continue;
            const std::size_t n = wrap_bin(c.n, p, lay.N);
            const std::size_t m = c.m + q;
            if (!lay.active[n] || owner(s, n, m) != c.pol || taken.contains({n, m}))
                continue;
            const double v = std::abs(interference_coefficient(table, p, q, c.m));
            if (v > best + 1e-12) {
                best = v;
                pick = std::pair{n, m};
            }
        }
        if (!pick || best < kMinAuxCoupling)
            throw ConfigError("pilot at (" + std::to_string(c.n) + ", " + std::to_string(c.m) +
                              ") has no auxiliary cell with usable coupling");
        c.aux = pick;
        taken.insert(*pick);
    }
}

SymbolGrid insert_auxiliary_pilots(const SymbolGrid& grid, const AmbiguityTable& table, const PilotPattern& pat) {
    SymbolGrid out = grid;
    const std::size_t N = grid.cells.subcarriers();
    const std::size_t T = grid.cells.times();
    for (const auto& c : pat.cells) {
        if (c.n >= N || c.m >= T)
            throw ParameterError("pilot cell outside the grid");
        out.cells.at(c.n, c.m) = c.value.real();
    }
    const bool dual = grid.structure != StructureId::Conventional;
    for (const auto& c : pat.cells) {
        if (!c.aux)
            continue;
        const auto [an, am] = *c.aux;
        if (am >= T)
            throw ParameterError("auxiliary cell outside the grid");
        double interference = 0.0;
        double coupling = 0.0;
        for (int p = -1; p <= 1; ++p)
            for (int q = -1; q <= 1; ++q) {
                if ((p == 0 && q == 0) || !in_time(c.m, q, T))
                    continue;
                const std::size_t n = wrap_bin(c.n, p, N);
                const std::size_t m = c.m + q;
                if (dual && grid.pol(n, m) != c.pol)
                    continue;
                const double coef = interference_coefficient(table, p, q, c.m);
                if (n == an && m == am)
                    coupling = coef;
                else
                    interference += out.cells.at(n, m) * coef;
            }
        if (std::abs(coupling) < kMinAuxCoupling)
            throw ConfigError("auxiliary cell coupling " + std::to_string(coupling) + " is too small to cancel");
        out.cells.at(an, am) = -interference / coupling;
    }
    return out;
}

SymbolGrid insert_auxiliary_pilots(const SymbolGrid& grid, const ProtoFilter& f, const PilotPattern& pat) {
    return insert_auxiliary_pilots(grid, interference_table(f, 1, 1), pat);
}

CVec ls_estimate(std::span<const Complex> rx_pilots, std::span<const Complex> tx_pilots) {
    if (rx_pilots.size() != tx_pilots.size())
        throw LengthError("pilot vectors differ in length");
    CVec h(rx_pilots.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (tx_pilots[i] == Complex{})
            throw ParameterError("zero transmitted pilot at index " + std::to_string(i));
        h[i] = rx_pilots[i] / tx_pilots[i];
    }
    return h;
}

CVec dft_denoise(std::span<const Complex> h_pilots, std::size_t max_delay_taps) {
    const std::size_t N = h_pilots.size();
    if (N == 0)
        return {};
    if (max_delay_taps >= N)
        throw ParameterError("delay window must be shorter than the pilot count");
    if (max_delay_taps + 1 == N)
        return CVec(h_pilots.begin(), h_pilots.end());
    CVec x(h_pilots.begin(), h_pilots.end());
    fft_inverse(x);
    std::fill(x.begin() + static_cast<long>(max_delay_taps) + 1, x.end(), Complex{});
    fft_forward(x);
    const double scale = 1.0 / static_cast<double>(N);
    for (auto& v : x)
        v *= scale;
    return x;
}

CVec cubic_spline(std::span<const double> x, std::span<const Complex> y, std::span<const double> xs) {
    const std::size_t n = x.size();
    if (n != y.size())
        throw LengthError("spline knots and values differ in length");
    if (n < 2)
        throw ParameterError("spline needs at least two knots");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x[i] > x[i - 1]))
            throw ParameterError("spline knots must be strictly increasing");

    // Second derivatives of the natural spline (Thomas algorithm).
    CVec d2(n);
    if (n > 2) {
        RVec diag(n - 2), upper(n - 2);
        CVec rhs(n - 2);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = x[i] - x[i - 1];
            const double h1 = x[i + 1] - x[i];
            diag[i - 1] = 2.0 * (h0 + h1);
            upper[i - 1] = h1;
            rhs[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        }
        for (std::size_t i = 1; i < n - 2; ++i) {
            const double lower = x[i + 1] - x[i];
            const double w = lower / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        d2[n - 2] = rhs[n - 3] / diag[n - 3];
        for (std::size_t i = n - 3; i-- > 0;)
            d2[i + 1] = (rhs[i] - upper[i] * d2[i + 2]) / diag[i];
    }

    CVec out(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double t = xs[k];
        if (t <= x.front()) {
            out[k] = y.front();
            continue;
        }
        if (t >= x.back()) {
            out[k] = y.back();
            continue;
        }
        const std::size_t i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) - 1;
        const double h = x[i + 1] - x[i];
        const double a = (x[i + 1] - t) / h;
        const double b = (t - x[i]) / h;
        out[k] = a * y[i] + b * y[i + 1] + ((a * a * a - a) * d2[i] + (b * b * b - b) * d2[i + 1]) * (h * h) / 6.0;
    }
    return out;
}

ChannelEstimate interpolate_grid(std::span<const PilotRow> rows, const SubcarrierLayout& lay, std::size_t times) {
    if (rows.empty())
        throw ParameterError("channel interpolation needs at least one pilot symbol");
    RVec xs;
    xs.reserve(lay.active_bins.size());
    for (std::size_t n : lay.active_bins)
        xs.push_back(static_cast<double>(signed_frequency(n, lay.N)));

    std::vector<const PilotRow*> order;
    for (const auto& r : rows) {
        if (r.bins.size() != r.values.size())
            throw LengthError("pilot row bins and values differ in length");
        if (r.bins.size() < 4)
            throw ParameterError("channel interpolation needs at least four pilot subcarriers");
        order.push_back(&r);
    }
    std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->m < b->m; });

    // Frequency pass per pilot row.
    std::vector<CVec> freq(order.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        const PilotRow& row = *order[r];
        std::vector<std::size_t> idx(row.bins.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            idx[i] = i;
        auto fr = [&](std::size_t i) { return signed_frequency(row.bins[i], lay.N); };
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fr(a) < fr(b); });
        RVec kx;
        CVec ky;
        for (std::size_t i : idx) {
            kx.push_back(static_cast<double>(fr(i)));
            ky.push_back(row.values[i]);
        }
        freq[r] = cubic_spline(kx, ky, xs);
    }

    ChannelEstimate est{ComplexGrid(lay.N, times)};
    for (std::size_t m = 0; m < times; ++m) {
        std::size_t r1 = 0;
        while (r1 < order.size() && order[r1]->m < m)
            ++r1;
        const CVec* lo = nullptr;
        const CVec* hi = nullptr;
        double w = 0.0;
        if (r1 == 0) {
            lo = hi = &freq.front();
        } else if (r1 == order.size()) {
            lo = hi = &freq.back();
        } else {
            lo = &freq[r1 - 1];
            hi = &freq[r1];
            const double m0 = static_cast<double>(order[r1 - 1]->m);
            const double m1 = static_cast<double>(order[r1]->m);
            w = (static_cast<double>(m) - m0) / (m1 - m0);
        }
        for (std::size_t i = 0; i < lay.active_bins.size(); ++i)
            est.H.at(lay.active_bins[i], m) = (1.0 - w) * (*lo)[i] + w * (*hi)[i];
    }
    return est;
}

Equalized zf_equalize(const ComplexGrid& rx, const ChannelEstimate& est, Decision d) {
    if (rx.subcarriers() != est.H.subcarriers() || rx.times() != est.H.times())
        throw LengthError("received grid and channel estimate differ in shape");
    Equalized out{ComplexGrid(rx.subcarriers(), rx.times()), Grid<std::uint8_t>(rx.subcarriers(), rx.times())};
    for (std::size_t m = 0; m < rx.times(); ++m)
        for (std::size_t n = 0; n < rx.subcarriers(); ++n) {
            const Complex h = est.H.at(n, m);
            if (std::abs(h) < 1e-9) {
                out.erased.at(n, m) = 1;
                continue;
            }
            const Complex z = rx.at(n, m) / h;
            out.symbols.at(n, m) = d == Decision::RealPart ? Complex{z.real(), 0.0} : z;
        }
    return out;
}

XpiCancelled xpi_cancel(const ComplexGrid& rx_v, const ComplexGrid& rx_h, const MixingResponse& mix) {
    if (rx_v.subcarriers() != rx_h.subcarriers() || rx_v.times() != rx_h.times())
        throw LengthError("polarization grids differ in shape");
    const std::size_t N = rx_v.subcarriers();
    XpiCancelled out{rx_v, rx_h, Grid<std::uint8_t>(N, rx_v.times())};
    if (mix.vh.empty() && mix.hv.empty())
        return out;
    if (mix.vv.size() != N || mix.hh.size() != N || mix.vh.size() != N || mix.hv.size() != N)
        throw LengthError("mixing responses must cover every subcarrier");
    for (std::size_t n = 0; n < N; ++n) {
        const Complex a = mix.vv[n], b = mix.hv[n], c = mix.vh[n], d = mix.hh[n];
        const Complex det = a * d - b * c;
        const double scale = std::abs(a) * std::abs(d) + std::abs(b) * std::abs(c);
        const bool singular = scale == 0.0 || std::abs(det) < 1e-12 * scale;
        for (std::size_t m = 0; m < rx_v.times(); ++m) {
            if (singular) {
                out.v.at(n, m) = out.h.at(n, m) = Complex{};
                out.erased.at(n, m) = 1;
                continue;
            }
            const Complex rv = rx_v.at(n, m), rh = rx_h.at(n, m);
            const Complex xv = (d * rv - b * rh) / det;
            const Complex xh = (a * rh - c * rv) / det;
            // Keep the co-polar gain so the usual per-polarization ZF follows.
            out.v.at(n, m) = a * xv;
            out.h.at(n, m) = d * xh;
        }
    }
    return out;
}

} // namespace dpfbmc
