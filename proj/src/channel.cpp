#include "dpfbmc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dpfbmc {
namespace {

struct TapTable {
    RVec delays_ns;
    RVec powers_db;
};

// ITU-R M.1225 channel A tables.
const TapTable kPedA{{0.0, 110.0, 190.0, 410.0}, {0.0, -9.7, -19.2, -22.8}};
const TapTable kVehA{{0.0, 310.0, 710.0, 1090.0, 1730.0, 2510.0}, {0.0, -1.0, -9.0, -10.0, -15.0, -20.0}};

Complex complex_gaussian(Rng& rng, double variance) {
    std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
    const double re = nd(rng);
    const double im = nd(rng);
    return {re, im};
}

CVec convolve(std::span<const Complex> x, std::span<const Complex> h, std::size_t out_len) {
    CVec y(out_len);
    for (std::size_t l = 0; l < h.size(); ++l) {
        const Complex g = h[l];
        if (g == Complex{})
            continue;
        const std::size_t end = std::min(x.size(), out_len - std::min(out_len, l));
        for (std::size_t i = 0; i < end; ++i)
            y[i + l] += g * x[i];
    }
    return y;
}

} // namespace

std::string_view to_string(ChannelName c) {
    switch (c) {
    case ChannelName::AWGN: return "awgn";
    case ChannelName::PedA: return "peda";
    case ChannelName::VehA: return "veha";
    }
    return "?";
}

ChannelName channel_from_string(std::string_view text) {
    if (text == "awgn") return ChannelName::AWGN;
    if (text == "peda") return ChannelName::PedA;
    if (text == "veha") return ChannelName::VehA;
    throw ParameterError("unknown channel '" + std::string(text) + "'");
}

RVec ChannelProfile::normalised_powers() const {
    RVec lin(tap_powers_db.size());
    std::transform(tap_powers_db.begin(), tap_powers_db.end(), lin.begin(),
                   [](double db) { return std::pow(10.0, db / 10.0); });
    const double total = std::accumulate(lin.begin(), lin.end(), 0.0);
    for (auto& v : lin)
        v /= total;
    return lin;
}

ChannelProfile make_itu_profile(ChannelName name, double sample_rate) {
    if (!(sample_rate > 0.0))
        throw ParameterError("sample rate must be positive");
    ChannelProfile p;
    p.name = name;
    p.sample_rate = sample_rate;
    const TapTable* table = nullptr;
    switch (name) {
    case ChannelName::AWGN:
        p.tap_delays = {0.0};
        p.tap_powers_db = {0.0};
        p.fading = {FadingKind::None, 0.0};
        break;
    case ChannelName::PedA:
        table = &kPedA;
        p.fading = {FadingKind::Rician, 10.0};
        break;
    case ChannelName::VehA:
        table = &kVehA;
        p.fading = {FadingKind::Rayleigh, 0.0};
        break;
    }
    if (table) {
        p.tap_powers_db = table->powers_db;
        for (double d : table->delays_ns)
            p.tap_delays.push_back(d * 1e-9);
    }
    for (double d : p.tap_delays)
        p.tap_samples.push_back(static_cast<std::size_t>(std::llround(d * sample_rate)));
    return p;
}

double rms_delay_spread(const ChannelProfile& p) {
    const RVec w = p.normalised_powers();
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        m1 += w[i] * p.tap_delays[i];
        m2 += w[i] * p.tap_delays[i] * p.tap_delays[i];
    }
    return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

void write_profile_csv(std::ostream& os, const ChannelProfile& p) {
    os << "delay_ns,power_db\n";
    for (std::size_t i = 0; i < p.tap_delays.size(); ++i)
        os << p.tap_delays[i] * 1e9 << ',' << p.tap_powers_db[i] << '\n';
}

XpdMixer make_xpd_mixer(double xpd_db) {
    if (std::isinf(xpd_db) && xpd_db > 0)
        return {kInfiniteXpd, 0.0};
    if (!(xpd_db > 0.0))
        throw ParameterError("XPD must be positive or infinite, got " + std::to_string(xpd_db) + " dB");
    return {xpd_db, std::pow(10.0, -xpd_db / 20.0)};
}

CVec draw_impulse_response(const ChannelProfile& p, Rng& rng) {
    const RVec power = p.normalised_powers();
    CVec ir(p.ir_length());
    std::uniform_real_distribution<double> uphase(0.0, 2.0 * kPi);
    for (std::size_t i = 0; i < power.size(); ++i) {
        Complex g;
        switch (p.fading.kind) {
        case FadingKind::None:
            g = std::sqrt(power[i]);
            break;
        case FadingKind::Rayleigh:
            g = complex_gaussian(rng, power[i]);
            break;
        case FadingKind::Rician:
            if (i == 0) {
                const double k = std::pow(10.0, p.fading.rice_k_db / 10.0);
                const double los = std::sqrt(power[i] * k / (k + 1.0));
                g = std::polar(los, uphase(rng)) + complex_gaussian(rng, power[i] / (k + 1.0));
            } else {
                g = complex_gaussian(rng, power[i]);
            }
            break;
        }
        // Taps that round onto the same sample add with independent phases.
        ir[p.tap_samples[i]] += g;
    }
    return ir;
}

ChannelRealization draw_channel(const ChannelProfile& p, Rng& rng) {
    ChannelRealization ch;
    ch.ir_vv = draw_impulse_response(p, rng);
    ch.ir_hh = draw_impulse_response(p, rng);
    return ch;
}

ChannelRealization draw_channel(const ChannelProfile& p, const XpdMixer& xpd, Rng& rng) {
    ChannelRealization ch = draw_channel(p, rng);
    ch.xpd_db = xpd.xpd_db;
    if (xpd.amplitude == 0.0)
        return ch;
    ch.leak_vh = draw_impulse_response(p, rng);
    ch.leak_hv = draw_impulse_response(p, rng);
    for (auto& g : ch.leak_vh)
        g *= xpd.amplitude;
    for (auto& g : ch.leak_hv)
        g *= xpd.amplitude;
    return ch;
}

CVec frequency_response(std::span<const Complex> ir, std::size_t N) {
    CVec H(N);
    for (std::size_t n = 0; n < N; ++n) {
        Complex acc{};
        for (std::size_t l = 0; l < ir.size(); ++l)
            if (ir[l] != Complex{})
                acc += ir[l] * std::polar(1.0, -2.0 * kPi * static_cast<double>((n * l) % N) / static_cast<double>(N));
        H[n] = acc;
    }
    return H;
}

BasebandSignal apply_channel(const BasebandSignal& sig, const ChannelRealization& ch) {
    if (sig.pol_v.empty())
        throw LengthError("cannot apply a channel to an empty signal");
    std::size_t ir_len = std::max({ch.ir_vv.size(), ch.ir_hh.size(), ch.leak_vh.size(), ch.leak_hv.size(),
                                   std::size_t{1}});
    const std::size_t out_len = sig.size() + ir_len - 1;

    BasebandSignal out;
    out.sample_rate = sig.sample_rate;
    out.pol_v = convolve(sig.pol_v, ch.ir_vv, out_len);
    if (!sig.dual())
        return out;
    out.pol_h = convolve(sig.pol_h, ch.ir_hh, out_len);
    if (!ch.leak_hv.empty()) {
        const CVec x = convolve(sig.pol_h, ch.leak_hv, out_len);
        for (std::size_t i = 0; i < out_len; ++i)
            out.pol_v[i] += x[i];
    }
    if (!ch.leak_vh.empty()) {
        const CVec x = convolve(sig.pol_v, ch.leak_vh, out_len);
        for (std::size_t i = 0; i < out_len; ++i)
            out.pol_h[i] += x[i];
    }
    return out;
}

double noise_variance(const BasebandSignal& sig, double ebn0_db, int bits_per_qam, double overhead) {
    if (!std::isfinite(ebn0_db))
        throw ParameterError("Eb/N0 must be finite");
    double energy = 0.0;
    for (const auto& s : sig.pol_v)
        energy += std::norm(s);
    for (const auto& s : sig.pol_h)
        energy += std::norm(s);
    const double mean_power = sig.size() ? energy / static_cast<double>(sig.size()) : 0.0;
    const double eb = mean_power * overhead / bits_per_qam;
    return eb / std::pow(10.0, ebn0_db / 10.0);
}

BasebandSignal add_noise(const BasebandSignal& sig, double variance, Rng& rng) {
    std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
    BasebandSignal out = sig;
    for (auto& s : out.pol_v) {
        const double re = nd(rng);
        const double im = nd(rng);
        s += Complex{re, im};
    }
    for (auto& s : out.pol_h) {
        const double re = nd(rng);
        const double im = nd(rng);
        s += Complex{re, im};
    }
    return out;
}

BasebandSignal apply_awgn(const BasebandSignal& sig, double ebn0_db, int bits_per_qam, double overhead, Rng& rng) {
    return add_noise(sig, noise_variance(sig, ebn0_db, bits_per_qam, overhead), rng);
}

BasebandSignal apply_cfo(const BasebandSignal& sig, double eps, std::size_t M) {
    BasebandSignal out = sig;
    if (eps == 0.0)
        return out;
    const double w = 2.0 * kPi * eps / static_cast<double>(M);
    auto rotate = [w](CVec& x) {
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] *= std::polar(1.0, w * static_cast<double>(i));
    };
    rotate(out.pol_v);
    rotate(out.pol_h);
    return out;
}

BasebandSignal apply_timing_offset(const BasebandSignal& sig, long n_r) {
    const auto len = static_cast<long>(sig.size());
    if (std::abs(n_r) >= len)
        throw ParameterError("timing offset " + std::to_string(n_r) + " exceeds the signal length");
    auto shift = [n_r, len](const CVec& x) {
        CVec y(x.size());
        for (long i = 0; i < len; ++i) {
            const long src = i - n_r;
            if (src >= 0 && src < len)
                y[i] = x[src];
        }
        return y;
    };
    BasebandSignal out;
    out.sample_rate = sig.sample_rate;
    out.pol_v = shift(sig.pol_v);
    if (sig.dual())
        out.pol_h = shift(sig.pol_h);
    return out;
}

} // namespace dpfbmc
