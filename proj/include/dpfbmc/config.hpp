#pragma once

#include "dpfbmc/channel.hpp"
#include "dpfbmc/common.hpp"
#include "dpfbmc/filters.hpp"
#include "dpfbmc/lattice.hpp"
#include "dpfbmc/modem.hpp"

#include <istream>
#include <optional>
#include <string>
#include <string_view>

namespace dpfbmc {

enum class Experiment { Ber, Papr, Psd, Cfo, To, Xpd };
enum class System { CpOfdm, Fbmc, DpFbmc };
enum class Equalizer { Estimated, Perfect };

std::string_view to_string(Experiment e);
std::string_view to_string(System s);
std::string_view to_string(Equalizer e);

/// Everything one seeded run needs. Defaults are the 10 MHz, 512-subcarrier,
/// 16-symbol setup with a 1/16 cyclic prefix and 17/16 guard subcarriers.
struct ExperimentConfig {
    Experiment experiment = Experiment::Ber;
    System system = System::Fbmc;
    std::optional<StructureId> structure;
    FilterKind filter = FilterKind::PHYDYAS;
    int K = 4;
    std::optional<double> alpha;
    Modulation modulation = Modulation::QPSK;
    ChannelName channel = ChannelName::AWGN;

    std::size_t M = 512;
    std::size_t symbols_per_frame = 16;
    double bandwidth_hz = 1e7;
    double cp_fraction = 1.0 / 16.0;
    std::size_t guard_left = 17;
    std::size_t guard_right = 16;

    RVec ebn0_db{0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    std::optional<double> snr_db; ///< operating point of cfo/to/xpd sweeps, overrides ebn0_db
    RVec cfo;
    std::vector<long> to;
    RVec xpd_db;

    std::size_t frames = 100;
    std::uint64_t seed = 1;
    std::optional<Equalizer> equalizer; ///< unset: perfect for cfo/to/xpd, estimated otherwise
    std::string out_path;

    std::size_t pilot_count = 30;
    std::size_t pilot_stride = 4;
    bool aux_pilots = true;
    bool xpi_cancel = false;
    bool early_stop = false;
    std::size_t early_stop_errors = 200;

    std::size_t psd_nfft = 2048;
    double psd_overlap = 0.5;
    std::size_t psd_oversample = 4;
    RVec papr_thresholds_db;

    int threads = 0; ///< 0 leaves the OpenMP default

    Equalizer effective_equalizer() const;
    std::size_t cp_len() const;
    double effective_alpha() const { return alpha.value_or(0.0); }
};

/// Sets one key from its text value. Throws ConfigError naming the key.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// `key = value` lines, `#` starts a comment. Lists are "a,b,c" or
/// "start:step:stop" (stop included).
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_text(std::string_view text);

/// Rejects invalid combinations before any trial runs; the message names the
/// offending keys.
void validate(const ExperimentConfig& cfg);

RVec parse_real_list(std::string_view text);

} // namespace dpfbmc
