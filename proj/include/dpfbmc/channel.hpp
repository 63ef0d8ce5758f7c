#pragma once

#include "dpfbmc/common.hpp"
#include "dpfbmc/modem.hpp"

#include <limits>
#include <ostream>
#include <string_view>

namespace dpfbmc {

enum class ChannelName { AWGN, PedA, VehA };

std::string_view to_string(ChannelName c);
ChannelName channel_from_string(std::string_view text);

enum class FadingKind { None, Rayleigh, Rician };

struct Fading {
    FadingKind kind = FadingKind::None;
    double rice_k_db = 0.0; ///< first tap only
};

/// Tapped-delay-line profile. Delays and powers are the nominal table values;
/// tap_samples is the nearest-sample placement at sample_rate.
struct ChannelProfile {
    ChannelName name = ChannelName::AWGN;
    RVec tap_delays;    ///< seconds, ascending, first is 0
    RVec tap_powers_db; ///< relative, <= 0 dB
    Fading fading;
    double sample_rate = 0.0;
    std::vector<std::size_t> tap_samples;

    /// Linear tap powers scaled to sum to one.
    RVec normalised_powers() const;
    std::size_t ir_length() const { return tap_samples.empty() ? 0 : tap_samples.back() + 1; }
};

ChannelProfile make_itu_profile(ChannelName name, double sample_rate);

/// Power-weighted RMS spread of the nominal delays, seconds.
double rms_delay_spread(const ChannelProfile& p);

/// delay_ns,power_db rows with a header.
void write_profile_csv(std::ostream& os, const ChannelProfile& p);

inline constexpr double kInfiniteXpd = std::numeric_limits<double>::infinity();

/// Leakage gain between the polarizations for a given XPD.
struct XpdMixer {
    double xpd_db = kInfiniteXpd;
    double amplitude = 0.0; ///< 10^(-xpd/20), zero for infinite XPD
};

XpdMixer make_xpd_mixer(double xpd_db);

/// Block-fading realization held constant over one frame. leak_vh carries
/// what transmitted V leaks into received H; leak_hv the reverse.
struct ChannelRealization {
    CVec ir_vv;
    CVec ir_hh;
    CVec leak_vh;
    CVec leak_hv;
    double xpd_db = kInfiniteXpd;
};

/// Independent V and H paths, no leakage.
ChannelRealization draw_channel(const ChannelProfile& p, Rng& rng);

/// Adds leakage paths: each an independent fading draw of the same profile
/// scaled by the mixer amplitude. Infinite XPD leaves them empty.
ChannelRealization draw_channel(const ChannelProfile& p, const XpdMixer& xpd, Rng& rng);

/// One fading draw of the profile's impulse response.
CVec draw_impulse_response(const ChannelProfile& p, Rng& rng);

/// H at every bin of an N-point transform.
CVec frequency_response(std::span<const Complex> ir, std::size_t N);

/// Discrete linear convolution; output grows by the impulse response length - 1.
BasebandSignal apply_channel(const BasebandSignal& sig, const ChannelRealization& ch);

/// Complex noise variance per sample so that Eb/N0 holds for the information
/// bits. overhead is the number of signal samples per information-carrying QAM
/// symbol, so Eb = mean_power * overhead / bits_per_qam.
double noise_variance(const BasebandSignal& sig, double ebn0_db, int bits_per_qam, double overhead);

/// Independent complex noise of the given per-sample variance on each
/// polarization present.
BasebandSignal add_noise(const BasebandSignal& sig, double variance, Rng& rng);

/// add_noise() with the variance from noise_variance() of the input itself.
BasebandSignal apply_awgn(const BasebandSignal& sig, double ebn0_db, int bits_per_qam, double overhead, Rng& rng);

/// Sample i multiplied by e^{j2pi eps i / M}; eps in subcarrier spacings.
BasebandSignal apply_cfo(const BasebandSignal& sig, double eps, std::size_t M);

/// Positive n_r delays the stream (receiver window starts early); the
/// length is kept and vacated samples are zero.
BasebandSignal apply_timing_offset(const BasebandSignal& sig, long n_r);

} // namespace dpfbmc
