#include "dpfbmc/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>

namespace dpfbmc {
namespace {

constexpr std::size_t kEarlyStopChunk = 16;

class BitSource {
  public:
    explicit BitSource(Rng& rng) : rng_(rng) {}

    std::uint8_t next() {
        if (left_ == 0) {
            word_ = rng_();
            left_ = 64;
        }
        const auto b = static_cast<std::uint8_t>(word_ & 1u);
        word_ >>= 1;
        --left_;
        return b;
    }

  private:
    Rng& rng_;
    std::uint64_t word_ = 0;
    int left_ = 0;
};

std::string fmt_real(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

StructureId structure_of(const ExperimentConfig& cfg) {
    return cfg.system == System::DpFbmc ? *cfg.structure : StructureId::Conventional;
}

// Runs body(i) for i in [0, n) across OpenMP workers and rethrows the first
// exception (by index) afterwards.
template <typename F>
void parallel_for(std::size_t n, F&& body) {
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(n); ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Rng derive_stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t point) {
    std::uint64_t s = seed;
    std::uint64_t k = splitmix64(s);
    s = k ^ trial;
    k = splitmix64(s);
    s = k ^ point;
    k = splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    return Rng(seq);
}

// ---------------------------------------------------------------------------
// Link simulator

LinkSimulator::LinkSimulator(const ExperimentConfig& cfg) : cfg_(cfg) {
    validate(cfg_);
    structure_ = structure_of(cfg_);
    layout_ = make_layout(cfg_.M, cfg_.guard_left, cfg_.guard_right, 1);
    cp_len_ = cfg_.system == System::CpOfdm ? cfg_.cp_len() : 0;
    profile_ = make_itu_profile(cfg_.channel, cfg_.bandwidth_hz);
    equalizer_ = cfg_.effective_equalizer();
    const bool ofdm = cfg_.system == System::CpOfdm;
    const std::size_t S = cfg_.symbols_per_frame;

    if (!ofdm) {
        filter_ = make_filter(cfg_.filter, cfg_.K, cfg_.M, cfg_.effective_alpha());
        table_ = interference_table(filter_, 1, 1);
    }
    bits_per_cell_ = static_cast<std::size_t>(bits_per_symbol(cfg_.modulation)) / (ofdm ? 1 : 2);

    if (equalizer_ == Equalizer::Estimated) {
        if (ofdm) {
            pilots_ = make_ofdm_pilots(layout_, S, cfg_.pilot_count, cfg_.pilot_stride);
        } else {
            pilots_ = make_fbmc_pilots(layout_, S, structure_, cfg_.pilot_count, cfg_.pilot_stride);
            if (cfg_.aux_pilots)
                assign_aux_cells(pilots_, layout_, table_, structure_);
        }
        // Delay window of cp_len samples expressed in pilot-domain taps.
        const auto& sc = pilots_.subcarriers;
        const double span = static_cast<double>(signed_frequency(sc.back(), layout_.N) -
                                                signed_frequency(sc.front(), layout_.N));
        const double spacing = span / static_cast<double>(sc.size() - 1);
        const double window = static_cast<double>(cfg_.cp_len()) * static_cast<double>(sc.size()) * spacing /
                              static_cast<double>(cfg_.M);
        denoise_taps_ = std::min(sc.size() - 1, static_cast<std::size_t>(std::ceil(window)));
    }

    std::vector<std::uint8_t> reserved(layout_.N * (ofdm ? S : 2 * S), 0);
    for (const auto& c : pilots_.cells) {
        reserved[c.m * layout_.N + c.n] = 1;
        if (c.aux)
            reserved[c.aux->second * layout_.N + c.aux->first] = 1;
    }
    const std::size_t times = ofdm ? S : 2 * S;
    for (std::size_t m = 0; m < times; ++m)
        for (std::size_t n : layout_.active_bins)
            if (!reserved[m * layout_.N + n])
                data_.push_back({n, m});
}

CVec LinkSimulator::impairment_free_response(const CVec& ir) const { return frequency_response(ir, cfg_.M); }

namespace {

// Genie channel: co-polar response times the phases a known CFO and timing
// offset put on cell (n, m) whose energy is centred at sample centre(m).
template <typename Centre>
ChannelEstimate genie_estimate(const CVec& H, std::size_t M, std::size_t times, const FrameParams& fp,
                               Centre centre) {
    ChannelEstimate est{ComplexGrid(M, times)};
    const double Md = static_cast<double>(M);
    for (std::size_t m = 0; m < times; ++m) {
        const Complex rot = std::polar(1.0, 2.0 * kPi * fp.cfo * (centre(m) + static_cast<double>(fp.to)) / Md);
        for (std::size_t n = 0; n < M; ++n) {
            const double nu = static_cast<double>(signed_frequency(n, M));
            est.H.at(n, m) = H[n] * rot * std::polar(1.0, -2.0 * kPi * nu * static_cast<double>(fp.to) / Md);
        }
    }
    return est;
}

// LS at every pilot row of one polarization, DFT-denoised, then interpolated.
ChannelEstimate pilot_estimate(const PilotPattern& pat, Polarization pol, const ComplexGrid& rx,
                               const SubcarrierLayout& lay, std::size_t taps) {
    std::map<std::size_t, std::pair<std::vector<std::size_t>, std::pair<CVec, CVec>>> by_time;
    for (const auto& c : pat.cells) {
        if (c.pol != pol)
            continue;
        auto& row = by_time[c.m];
        row.first.push_back(c.n);
        row.second.first.push_back(rx.at(c.n, c.m));
        row.second.second.push_back(c.value);
    }
    std::vector<PilotRow> rows;
    for (auto& [m, row] : by_time) {
        CVec h = ls_estimate(row.second.first, row.second.second);
        if (taps + 1 < h.size())
            h = dft_denoise(h, taps);
        rows.push_back({m, row.first, std::move(h)});
    }
    return interpolate_grid(rows, lay, rx.times());
}

} // namespace

BerRecord LinkSimulator::run_frame(const FrameParams& fp, Rng& rng) const {
    return cfg_.system == System::CpOfdm ? run_ofdm(fp, rng) : run_fbmc(fp, rng);
}

BerRecord LinkSimulator::run_ofdm(const FrameParams& fp, Rng& rng) const {
    const std::size_t M = cfg_.M;
    const std::size_t S = cfg_.symbols_per_frame;
    const Modulation mod = cfg_.modulation;
    const std::size_t half = bits_per_cell_ / 2;

    BitSource src(rng);
    Bits tx_bits(info_bits());
    for (auto& b : tx_bits)
        b = src.next();

    ComplexGrid qam(M, S);
    const std::span<const std::uint8_t> all(tx_bits);
    for (std::size_t i = 0; i < data_.size(); ++i) {
        auto label = all.subspan(i * bits_per_cell_, bits_per_cell_);
        qam.at(data_[i].first, data_[i].second) = {pam_map(label.first(half), mod), pam_map(label.subspan(half), mod)};
    }
    for (const auto& c : pilots_.cells)
        qam.at(c.n, c.m) = c.value;

    BasebandSignal tx{cpofdm_modulate(qam, cp_len_), {}, cfg_.bandwidth_hz};
    const double overhead = static_cast<double>(tx.size()) * static_cast<double>(bits_per_cell_) /
                            static_cast<double>(info_bits());
    const double var = noise_variance(tx, fp.ebn0_db, static_cast<int>(bits_per_cell_), overhead);

    const ChannelRealization ch = draw_channel(profile_, rng);
    BasebandSignal rx = apply_channel(tx, ch);
    rx = apply_cfo(rx, fp.cfo, M);
    if (fp.to != 0)
        rx = apply_timing_offset(rx, fp.to);
    rx = add_noise(rx, var, rng);
    const ComplexGrid y = cpofdm_demodulate(rx.pol_v, M, cp_len_, S);

    ChannelEstimate est;
    if (equalizer_ == Equalizer::Perfect) {
        const double sym = static_cast<double>(M + cp_len_);
        const double off = static_cast<double>(cp_len_) + (static_cast<double>(M) - 1.0) / 2.0;
        est = genie_estimate(impairment_free_response(ch.ir_vv), M, S, fp,
                             [&](std::size_t m) { return static_cast<double>(m) * sym + off; });
    } else {
        est = pilot_estimate(pilots_, Polarization::V, y, layout_, denoise_taps_);
    }
    const Equalized eq = zf_equalize(y, est, Decision::Complex);

    Bits rx_bits(tx_bits.size());
    for (std::size_t i = 0; i < data_.size(); ++i) {
        const auto [n, m] = data_[i];
        std::span<std::uint8_t> label(rx_bits.data() + i * bits_per_cell_, bits_per_cell_);
        if (eq.erased.at(n, m)) {
            for (auto& b : label)
                b = src.next();
            continue;
        }
        const Complex z = eq.symbols.at(n, m);
        pam_demap(z.real(), mod, label.first(half));
        pam_demap(z.imag(), mod, label.subspan(half));
    }
    return ber_count(tx_bits, rx_bits);
}

BerRecord LinkSimulator::run_fbmc(const FrameParams& fp, Rng& rng) const {
    const std::size_t M = cfg_.M;
    const std::size_t S = cfg_.symbols_per_frame;
    const std::size_t T = 2 * S;
    const Modulation mod = cfg_.modulation;
    const bool dual = structure_ != StructureId::Conventional;

    BitSource src(rng);
    Bits tx_bits(info_bits());
    for (auto& b : tx_bits)
        b = src.next();

    SymbolGrid g{RealGrid(M, T), structure_, layout_.active};
    const std::span<const std::uint8_t> all(tx_bits);
    for (std::size_t i = 0; i < data_.size(); ++i)
        g.cells.at(data_[i].first, data_[i].second) = pam_map(all.subspan(i * bits_per_cell_, bits_per_cell_), mod);
    if (!pilots_.empty())
        g = insert_auxiliary_pilots(g, table_, pilots_);

    const BasebandSignal tx = dual ? dp_modulate(g, structure_, filter_, cfg_.bandwidth_hz, Exec::Serial)
                                   : fbmc_modulate(g, filter_, cfg_.bandwidth_hz, Exec::Serial);
    const auto bps = bits_per_symbol(mod);
    const double overhead =
        static_cast<double>(tx.size()) * static_cast<double>(bps) / static_cast<double>(info_bits());
    const double var = noise_variance(tx, fp.ebn0_db, bps, overhead);

    const XpdMixer mixer = dual ? make_xpd_mixer(fp.xpd_db) : XpdMixer{};
    const ChannelRealization ch = draw_channel(profile_, mixer, rng);
    BasebandSignal rx = apply_channel(tx, ch);
    rx = apply_cfo(rx, fp.cfo, M);
    if (fp.to != 0)
        rx = apply_timing_offset(rx, fp.to);
    rx = add_noise(rx, var, rng);

    ComplexGrid yv, yh;
    if (dual) {
        DualGrids both = dp_demodulate_both(rx, filter_, S, Exec::Serial);
        yv = std::move(both.v);
        yh = std::move(both.h);
    } else {
        yv = fbmc_demodulate(rx.pol_v, filter_, S, Exec::Serial);
    }

    Grid<std::uint8_t> xpi_erased(M, T);
    if (dual && cfg_.xpi_cancel && !ch.leak_vh.empty()) {
        const MixingResponse mix{impairment_free_response(ch.ir_vv), impairment_free_response(ch.ir_hh),
                                 impairment_free_response(ch.leak_vh), impairment_free_response(ch.leak_hv)};
        XpiCancelled xc = xpi_cancel(yv, yh, mix);
        yv = std::move(xc.v);
        yh = std::move(xc.h);
        xpi_erased = std::move(xc.erased);
    }

    auto estimate = [&](Polarization pol, const ComplexGrid& y, const CVec& ir) {
        if (equalizer_ == Equalizer::Perfect) {
            const double D = filter_.centre();
            const double hop = static_cast<double>(M) / 2.0;
            return genie_estimate(impairment_free_response(ir), M, T, fp,
                                  [&](std::size_t m) { return static_cast<double>(m) * hop + D; });
        }
        return pilot_estimate(pilots_, pol, y, layout_, denoise_taps_);
    };

    const Equalized qv = zf_equalize(yv, estimate(Polarization::V, yv, ch.ir_vv), Decision::RealPart);
    Equalized qh;
    if (dual)
        qh = zf_equalize(yh, estimate(Polarization::H, yh, ch.ir_hh), Decision::RealPart);

    Bits rx_bits(tx_bits.size());
    for (std::size_t i = 0; i < data_.size(); ++i) {
        const auto [n, m] = data_[i];
        const Equalized& q = g.pol(n, m) == Polarization::V || !dual ? qv : qh;
        std::span<std::uint8_t> label(rx_bits.data() + i * bits_per_cell_, bits_per_cell_);
        if (q.erased.at(n, m) || xpi_erased.at(n, m)) {
            for (auto& b : label)
                b = src.next();
            continue;
        }
        pam_demap(q.symbols.at(n, m).real(), mod, label);
    }
    return ber_count(tx_bits, rx_bits);
}

// ---------------------------------------------------------------------------
// Sweeps

std::string axis_name(const ExperimentConfig& cfg) {
    switch (cfg.experiment) {
    case Experiment::Ber: return "ebn0_db";
    case Experiment::Cfo: return "cfo";
    case Experiment::To: return "to";
    case Experiment::Xpd: return cfg.xpi_cancel ? "xpd_db_xpic" : "xpd_db";
    case Experiment::Papr: return "papr0_db";
    case Experiment::Psd: return "freq_norm";
    }
    return "";
}

double operating_ebn0(const ExperimentConfig& cfg) {
    if (cfg.snr_db)
        return *cfg.snr_db - 10.0 * std::log10(static_cast<double>(bits_per_symbol(cfg.modulation)));
    return cfg.ebn0_db.empty() ? 0.0 : cfg.ebn0_db.front();
}

namespace {

std::vector<std::pair<double, FrameParams>> sweep_points(const ExperimentConfig& cfg) {
    std::vector<std::pair<double, FrameParams>> pts;
    const double op = operating_ebn0(cfg);
    switch (cfg.experiment) {
    case Experiment::Ber:
        for (double e : cfg.ebn0_db)
            pts.push_back({e, FrameParams{e, 0.0, 0, kInfiniteXpd}});
        break;
    case Experiment::Cfo:
        for (double c : cfg.cfo)
            pts.push_back({c, FrameParams{op, c, 0, kInfiniteXpd}});
        break;
    case Experiment::To:
        for (long t : cfg.to)
            pts.push_back({static_cast<double>(t), FrameParams{op, 0.0, t, kInfiniteXpd}});
        break;
    case Experiment::Xpd:
        for (double x : cfg.xpd_db)
            pts.push_back({x, FrameParams{op, 0.0, 0, x}});
        break;
    default: break;
    }
    // Sweeps that are not about XPD still see the listed leakage, if any.
    if (cfg.experiment != Experiment::Xpd && cfg.xpd_db.size() == 1)
        for (auto& p : pts)
            p.second.xpd_db = cfg.xpd_db.front();
    return pts;
}

std::vector<BerPoint> run_ber_sweep(const ExperimentConfig& cfg) {
    const LinkSimulator sim(cfg);
    std::vector<BerPoint> out;
    const auto pts = sweep_points(cfg);
    for (std::size_t pi = 0; pi < pts.size(); ++pi) {
        BerPoint bp;
        bp.axis_value = pts[pi].first;
        const FrameParams fp = pts[pi].second;
        const std::size_t chunk = cfg.early_stop ? kEarlyStopChunk : std::max<std::size_t>(cfg.frames, 1);
        for (std::size_t start = 0; start < cfg.frames; start += chunk) {
            const std::size_t count = std::min(chunk, cfg.frames - start);
            std::vector<BerRecord> recs(count);
            parallel_for(count, [&](std::size_t i) {
                Rng rng = derive_stream(cfg.seed, start + i, pi);
                recs[i] = sim.run_frame(fp, rng);
            });
            for (const auto& r : recs)
                bp.record.merge(r);
            bp.frames += count;
            if (cfg.early_stop && bp.record.bit_errors >= cfg.early_stop_errors)
                break;
        }
        out.push_back(bp);
    }
    return out;
}

// Random payload over every active cell, no pilots.
BasebandSignal random_frame(const ExperimentConfig& cfg, const SubcarrierLayout& lay, const ProtoFilter& f,
                            std::size_t cp_len, Rng& rng) {
    const std::size_t N = lay.N;
    const std::size_t S = cfg.symbols_per_frame;
    const Modulation mod = cfg.modulation;
    BitSource src(rng);
    const auto bps = static_cast<std::size_t>(bits_per_symbol(mod));
    Bits label(bps);
    if (cfg.system == System::CpOfdm) {
        ComplexGrid qam(N, S);
        for (std::size_t k = 0; k < S; ++k)
            for (std::size_t n : lay.active_bins) {
                for (auto& b : label)
                    b = src.next();
                qam.at(n, k) = qam_map(label, mod).front();
            }
        return {cpofdm_modulate(qam, cp_len), {}, cfg.bandwidth_hz * static_cast<double>(lay.oversample())};
    }
    const StructureId s = structure_of(cfg);
    SymbolGrid g{RealGrid(N, 2 * S), s, lay.active};
    const std::span<const std::uint8_t> half(label.data(), bps / 2);
    for (std::size_t m = 0; m < 2 * S; ++m)
        for (std::size_t n : lay.active_bins) {
            for (std::size_t i = 0; i < bps / 2; ++i)
                label[i] = src.next();
            g.cells.at(n, m) = pam_map(half, mod);
        }
    const double fs = cfg.bandwidth_hz * static_cast<double>(lay.oversample());
    if (s == StructureId::Conventional)
        return fbmc_modulate(g, f, fs, Exec::Serial);
    return dp_modulate(g, s, f, fs, Exec::Serial);
}

// Drops the filter ramp-up/ramp-down so S*N samples remain.
std::span<const Complex> trim_frame(const ExperimentConfig& cfg, const CVec& x, std::size_t N) {
    if (cfg.system == System::CpOfdm)
        return x;
    const std::size_t keep = cfg.symbols_per_frame * N;
    const std::size_t start = (static_cast<std::size_t>(cfg.K) * N - N / 2) / 2;
    return std::span<const Complex>(x).subspan(start, keep);
}

PaprCcdf run_papr(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto lay = make_layout(cfg.M, cfg.guard_left, cfg.guard_right, 1);
    ProtoFilter f;
    if (cfg.system != System::CpOfdm)
        f = make_filter(cfg.filter, cfg.K, cfg.M, cfg.effective_alpha());
    const std::size_t cp = cfg.system == System::CpOfdm ? cfg.cp_len() : 0;

    std::vector<RVec> per_frame(cfg.frames);
    parallel_for(cfg.frames, [&](std::size_t t) {
        Rng rng = derive_stream(cfg.seed, t, 0);
        const BasebandSignal sig = random_frame(cfg, lay, f, cp, rng);
        per_frame[t].push_back(papr_db(trim_frame(cfg, sig.pol_v, cfg.M)));
        if (sig.dual())
            per_frame[t].push_back(papr_db(trim_frame(cfg, sig.pol_h, cfg.M)));
    });
    RVec values;
    for (const auto& v : per_frame)
        values.insert(values.end(), v.begin(), v.end());
    RVec thr = cfg.papr_thresholds_db;
    if (thr.empty())
        for (int i = 0; i <= 120; ++i)
            thr.push_back(4.0 + 0.1 * i);
    return papr_ccdf(values, thr);
}

PsdSeries run_psd(const ExperimentConfig& cfg) {
    validate(cfg);
    if (cfg.frames == 0)
        return {};
    const std::size_t os = cfg.psd_oversample;
    const auto lay = make_layout(cfg.M, cfg.guard_left, cfg.guard_right, os);
    const std::size_t N = lay.N;
    ProtoFilter f;
    if (cfg.system != System::CpOfdm)
        f = make_filter(cfg.filter, cfg.K, N, cfg.effective_alpha());
    const std::size_t cp = cfg.system == System::CpOfdm ? cfg.cp_len() * os : 0;

    std::vector<RVec> per_frame(cfg.frames);
    parallel_for(cfg.frames, [&](std::size_t t) {
        Rng rng = derive_stream(cfg.seed, t, 0);
        const BasebandSignal sig = random_frame(cfg, lay, f, cp, rng);
        RVec p = welch_power(trim_frame(cfg, sig.pol_v, N), cfg.psd_nfft, cfg.psd_overlap);
        if (sig.dual()) {
            const RVec ph = welch_power(trim_frame(cfg, sig.pol_h, N), cfg.psd_nfft, cfg.psd_overlap);
            for (std::size_t i = 0; i < p.size(); ++i)
                p[i] += ph[i];
        }
        per_frame[t] = std::move(p);
    });
    RVec acc(cfg.psd_nfft);
    for (const auto& p : per_frame)
        for (std::size_t i = 0; i < acc.size(); ++i)
            acc[i] += p[i];
    PsdSeries out = to_psd_series(acc);
    for (auto& fr : out.freq)
        fr *= static_cast<double>(N);
    return out;
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    if (cfg.threads > 0)
        omp_set_num_threads(cfg.threads);
    ExperimentResult res;
    res.axis_name = axis_name(cfg);
    switch (cfg.experiment) {
    case Experiment::Papr:
        if (cfg.frames > 0)
            res.papr = run_papr(cfg);
        break;
    case Experiment::Psd:
        res.psd = run_psd(cfg);
        break;
    default:
        if (cfg.frames > 0)
            res.ber = run_ber_sweep(cfg);
        break;
    }
    return res;
}

void write_csv(std::ostream& os, const ExperimentConfig& cfg, const ExperimentResult& res) {
    if (cfg.experiment == Experiment::Papr) {
        os << "papr0_db,ccdf\n";
        for (std::size_t i = 0; i < res.papr.ccdf.size(); ++i)
            os << fmt_real(res.papr.thresholds_db[i]) << ',' << fmt_real(res.papr.ccdf[i]) << '\n';
        return;
    }
    if (cfg.experiment == Experiment::Psd) {
        os << "freq_norm,psd_db\n";
        for (std::size_t i = 0; i < res.psd.freq.size(); ++i)
            os << fmt_real(res.psd.freq[i]) << ',' << fmt_real(res.psd.psd_db[i]) << '\n';
        return;
    }
    os << "experiment,system,structure,filter,K,alpha,modulation,channel,axis_name,axis_value,frames,bits,"
          "bit_errors,ber,seed\n";
    const bool ofdm = cfg.system == System::CpOfdm;
    const std::string structure = cfg.system == System::DpFbmc ? std::string(to_string(*cfg.structure)) : "none";
    const std::string filter = ofdm ? "none" : std::string(to_string(cfg.filter));
    const std::string K = ofdm ? "" : std::to_string(cfg.K);
    const std::string alpha = cfg.alpha && !ofdm ? fmt_real(*cfg.alpha) : "";
    for (const auto& p : res.ber) {
        os << to_string(cfg.experiment) << ',' << to_string(cfg.system) << ',' << structure << ',' << filter << ','
           << K << ',' << alpha << ',' << to_string(cfg.modulation) << ',' << to_string(cfg.channel) << ','
           << res.axis_name << ',' << fmt_real(p.axis_value) << ',' << p.frames << ',' << p.record.bits_sent << ','
           << p.record.bit_errors << ',' << fmt_real(p.record.ber()) << ',' << cfg.seed << '\n';
    }
}

void write_csv_atomic(const std::string& path, const ExperimentConfig& cfg, const ExperimentResult& res) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        write_csv(os, cfg, res);
        os.flush();
        if (!os)
            throw std::runtime_error("write to " + tmp.string() + " failed");
    }
    fs::rename(tmp, target);
}

} // namespace dpfbmc
