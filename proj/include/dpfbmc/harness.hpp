#pragma once

#include "dpfbmc/channel.hpp"
#include "dpfbmc/config.hpp"
#include "dpfbmc/estimation.hpp"
#include "dpfbmc/metrics.hpp"

#include <ostream>
#include <string>

namespace dpfbmc {

/// One step of the splitmix64 generator; advances state.
std::uint64_t splitmix64(std::uint64_t& state);

/// Stream for (seed, trial, point): the three indices are folded through
/// splitmix64 one after another and the result seeds the engine. Independent
/// of execution order and worker count.
Rng derive_stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t point);

/// Impairments and operating point of one frame.
struct FrameParams {
    double ebn0_db = 10.0;
    double cfo = 0.0;
    long to = 0;
    double xpd_db = kInfiniteXpd;
};

/// Precomputed link (layout, filter, pilots, data cells) for one
/// configuration; run_frame is const and safe to call concurrently.
class LinkSimulator {
  public:
    explicit LinkSimulator(const ExperimentConfig& cfg);

    BerRecord run_frame(const FrameParams& fp, Rng& rng) const;

    const SubcarrierLayout& layout() const { return layout_; }
    const PilotPattern& pilots() const { return pilots_; }
    std::size_t data_cells() const { return data_.size(); }
    std::size_t info_bits() const { return data_.size() * bits_per_cell_; }
    /// Pilot-domain delay taps kept by the DFT denoiser.
    std::size_t denoise_taps() const { return denoise_taps_; }

  private:
    using Cell = std::pair<std::size_t, std::size_t>;

    BerRecord run_ofdm(const FrameParams& fp, Rng& rng) const;
    BerRecord run_fbmc(const FrameParams& fp, Rng& rng) const;
    CVec impairment_free_response(const CVec& ir) const;

    ExperimentConfig cfg_;
    StructureId structure_ = StructureId::Conventional;
    SubcarrierLayout layout_;
    ProtoFilter filter_;
    AmbiguityTable table_;
    ChannelProfile profile_;
    PilotPattern pilots_;
    std::vector<Cell> data_;
    std::size_t bits_per_cell_ = 0;
    std::size_t cp_len_ = 0;
    std::size_t denoise_taps_ = 0;
    Equalizer equalizer_ = Equalizer::Estimated;
};

struct BerPoint {
    double axis_value = 0.0;
    std::size_t frames = 0;
    BerRecord record;
};

struct ExperimentResult {
    std::string axis_name;
    std::vector<BerPoint> ber;
    PaprCcdf papr;
    PsdSeries psd; ///< freq in subcarrier spacings
};

/// Axis of the BER-like sweeps: ebn0_db, cfo, to, xpd_db or xpd_db_xpic.
std::string axis_name(const ExperimentConfig& cfg);

/// Eb/N0 used by cfo/to/xpd sweeps: snr_db - 10 log10(bits per QAM symbol)
/// when snr_db is set, otherwise the single ebn0_db value.
double operating_ebn0(const ExperimentConfig& cfg);

/// Validates, then runs every frame of every sweep point.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

void write_csv(std::ostream& os, const ExperimentConfig& cfg, const ExperimentResult& res);

/// Writes to a temporary file next to path and renames it into place.
void write_csv_atomic(const std::string& path, const ExperimentConfig& cfg, const ExperimentResult& res);

} // namespace dpfbmc
