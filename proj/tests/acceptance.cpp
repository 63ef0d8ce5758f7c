// Acceptance checks. One PASS/FAIL line per criterion; `acceptance 3 7` runs a subset.

#include "oracles.hpp"

#include "dpfbmc/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>

using namespace dpfbmc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Reference magnitudes, rows p = -2..2, columns q = -3..3; NaN marks the reference cell.
constexpr double X = std::numeric_limits<double>::quiet_NaN();
using Table = double[5][7];
const Table kIota = {{0.0194, 0, 0.0413, 0, 0.0413, 0, 0.0194},
                     {0.0116, 0.0413, 0.2327, 0.4378, 0.2327, 0.0413, 0.0116},
                     {0.0194, 0, 0.4380, X, 0.4380, 0, 0.0194},
                     {0.0116, 0.0413, 0.2327, 0.4378, 0.2327, 0.0413, 0.0116},
                     {0, 0, 0.0413, 0, 0.0413, 0, 0}};
const Table kPhydyas = {{0.0644, 0, 0, 0, 0, 0, 0.0644},
                        {0.0442, 0.1250, 0.2058, 0.2393, 0.2058, 0.1250, 0.0442},
                        {0.0644, 0, 0.5645, X, 0.5645, 0, 0.0644},
                        {0.0442, 0.1250, 0.2058, 0.2393, 0.2058, 0.1250, 0.0442},
                        {0, 0, 0, 0, 0, 0, 0}};
const Table kSrrc = {{0.1122, 0, 0, 0, 0, 0, 0.1122},
                     {0.095, 0.1263, 0.15, 0.1589, 0.15, 0.1260, 0.095},
                     {0.1122, 0, 0.6015, X, 0.6015, 0, 0.1122},
                     {0.095, 0.1263, 0.15, 0.1589, 0.15, 0.1260, 0.095},
                     {0, 0, 0, 0, 0, 0, 0}};

Outcome tables() {
    const auto t0 = Clock::now();
    struct Case {
        const char* name;
        FilterKind kind;
        const Table* ref;
        double tol;
    };
    const Case cases[] = {{"iota", FilterKind::IOTA, &kIota, 5e-3},
                          {"phydyas", FilterKind::PHYDYAS, &kPhydyas, 2e-3},
                          {"srrc", FilterKind::SRRC, &kSrrc, 2e-3}};
    std::size_t checked = 0, off = 0;
    std::string list;
    for (const auto& c : cases) {
        const auto tab = interference_table(make_filter(c.kind, 4, 512, 0.5), 2, 3);
        for (int p = -2; p <= 2; ++p)
            for (int q = -3; q <= 3; ++q) {
                const double want = (*c.ref)[p + 2][q + 3];
                if (std::isnan(want))
                    continue;
                ++checked;
                const double got = std::abs(tab(p, q));
                if (std::abs(got - want) > c.tol) {
                    ++off;
                    list += fmt(" %s(%d,%d)=%.4f/%.4f", c.name, p, q, got, want);
                }
            }
    }
    const double t = seconds_since(t0);
    return {off == 0 && t < 10.0, fmt("%zu/%zu entries within tolerance, %.2f s; off (got/reference):", checked - off,
                                      checked, t) +
                                      (list.empty() ? std::string(" none") : list)};
}

Outcome real_orthogonality() {
    std::string detail;
    bool pass = true;
    for (auto [kind, tol] : {std::pair{FilterKind::PHYDYAS, 1e-3}, std::pair{FilterKind::IOTA, 1e-3},
                             std::pair{FilterKind::SRRC, 5e-3}}) {
        const auto tab = interference_table(make_filter(kind, 4, 512, 0.5), 2, 3);
        double worst = 0.0;
        for (int p = -2; p <= 2; ++p)
            for (int q = -3; q <= 3; ++q)
                worst = std::max(worst, std::abs(tab(p, q).real() - (p == 0 && q == 0 ? 1.0 : 0.0)));
        pass = pass && worst < tol;
        detail += fmt(" %s max|Re A - delta|=%.2e (tol %.0e)", std::string(to_string(kind)).c_str(), worst, tol);
    }
    return {pass, detail.substr(1)};
}

RealGrid random_pam(const SubcarrierLayout& lay, std::size_t S, Rng& rng) {
    RealGrid g(lay.N, 2 * S);
    const double a = 1.0 / std::sqrt(2.0);
    for (std::size_t m = 0; m < 2 * S; ++m)
        for (std::size_t n : lay.active_bins)
            g.at(n, m) = (rng() & 1) ? a : -a;
    return g;
}

double real_error(const RealGrid& tx, const ComplexGrid& rx, const SubcarrierLayout& lay) {
    double worst = 0.0;
    for (std::size_t m = 0; m < tx.times(); ++m)
        for (std::size_t n : lay.active_bins)
            worst = std::max(worst, std::abs(rx.at(n, m).real() - tx.at(n, m)));
    return worst;
}

Outcome loopbacks() {
    const auto t0 = Clock::now();
    const std::size_t M = 512, S = 16, cp = 32;
    const auto lay = make_layout(M, 17, 16);
    Rng rng(2024);

    ComplexGrid q(M, S);
    std::normal_distribution<double> nd;
    for (std::size_t k = 0; k < S; ++k)
        for (std::size_t n : lay.active_bins)
            q.at(n, k) = {nd(rng), nd(rng)};
    const auto back = cpofdm_demodulate(cpofdm_modulate(q, cp), M, cp, S);
    double ofdm = 0.0;
    for (std::size_t i = 0; i < q.raw().size(); ++i)
        ofdm = std::max(ofdm, std::abs(back.raw()[i] - q.raw()[i]));
    bool pass = ofdm < 1e-10;
    std::string detail = fmt("cpofdm %.1e", ofdm);

    const ProtoFilter f = make_phydyas(4, M);
    const RealGrid g = random_pam(lay, S, rng);
    const double fb = real_error(g, fbmc_demodulate(fbmc_modulate(g, f), f, S), lay);
    pass = pass && fb < 1e-6;
    detail += fmt(", fbmc phydyas %.2e", fb);

    for (auto s : {StructureId::TPDM, StructureId::FPDM, StructureId::TFPDM}) {
        SymbolGrid sg;
        sg.cells = random_pam(lay, S, rng);
        sg.structure = s;
        const double e = real_error(sg.cells, dp_demodulate(dp_modulate(sg, s, f), s, f, S), lay);
        pass = pass && e < 1e-6;
        detail += fmt(", dp %s %.2e", std::string(to_string(s)).c_str(), e);
    }
    const double t = seconds_since(t0);
    pass = pass && t < 30.0;
    return {pass, detail + fmt(" (limits 1e-10 / 1e-6), %.1f s", t)};
}

Outcome ppn_vs_direct() {
    double worst = 0.0;
    Rng rng(7);
    std::normal_distribution<double> nd;
    for (auto kind : {FilterKind::PHYDYAS, FilterKind::IOTA, FilterKind::SRRC}) {
        const ProtoFilter f = make_filter(kind, 4, 16, 0.5);
        RealGrid g(16, 8);
        for (auto& v : g.raw())
            v = nd(rng);
        const CVec fast = fbmc_modulate(g, f), slow = fbmc_modulate_direct(g, f);
        for (std::size_t i = 0; i < fast.size(); ++i)
            worst = std::max(worst, std::abs(fast[i] - slow[i]));
        const auto a = fbmc_demodulate(fast, f, 4), b = fbmc_demodulate_direct(fast, f, 4);
        for (std::size_t i = 0; i < a.raw().size(); ++i)
            worst = std::max(worst, std::abs(a.raw()[i] - b.raw()[i]));
    }
    return {worst < 1e-10, fmt("max |ppn - direct| = %.2e over modulation and demodulation", worst)};
}

Outcome awgn_calibration() {
    bool pass = true;
    std::string detail;
    for (auto mod : {Modulation::QPSK, Modulation::QAM16}) {
        const double top = mod == Modulation::QPSK ? 8.0 : 10.0;
        for (auto sys : {System::CpOfdm, System::Fbmc}) {
            const auto t0 = Clock::now();
            double worst = 0.0;
            std::size_t min_bits = std::numeric_limits<std::size_t>::max();
            for (double eb = 0.0; eb <= top; eb += 2.0) {
                const double want = mod == Modulation::QPSK ? oracle::ber_qpsk(eb) : oracle::ber_qam16(eb);
                if (want < 1e-4)
                    continue;
                ExperimentConfig c;
                c.system = sys;
                c.modulation = mod;
                c.cp_fraction = 0.0;
                c.equalizer = Equalizer::Perfect;
                c.ebn0_db = {eb};
                c.seed = 11;
                // At least 1e6 bits and about 1000 expected errors.
                const double bits = std::max(1e6, 1000.0 / want);
                c.frames = static_cast<std::size_t>(std::ceil(bits / LinkSimulator(c).info_bits()));
                const auto rec = run_experiment(c).ber.front().record;
                worst = std::max(worst, std::abs(rec.ber() / want - 1.0));
                min_bits = std::min<std::size_t>(min_bits, rec.bits_sent);
            }
            const double t = seconds_since(t0);
            pass = pass && worst < 0.1 && min_bits >= 1000000 && t < 120.0;
            detail += fmt("; %s %s worst rel %.3f, min bits %zu, %.1f s", std::string(to_string(mod)).c_str(),
                          std::string(to_string(sys)).c_str(), worst, min_bits, t);
        }
    }
    return {pass, detail.substr(2)};
}

Outcome delay_spread() {
    const double ped = rms_delay_spread(make_itu_profile(ChannelName::PedA, 1e7)) * 1e9;
    const double veh = rms_delay_spread(make_itu_profile(ChannelName::VehA, 1e7)) * 1e9;
    const bool pass = std::abs(ped / 46.0 - 1.0) <= 0.05 && std::abs(veh / 370.0 - 1.0) <= 0.05;
    return {pass, fmt("ped-a %.1f ns (46 +-5%%), veh-a %.1f ns (370 +-5%%)", ped, veh)};
}

double mean_ber(ExperimentConfig c) { return run_experiment(c).ber.front().record.ber(); }

// Counts seeds 1..5 where the dual-polarization link beats the reference link.
struct SeedVote {
    int wins = 0;
    std::string detail;
};

SeedVote vote(ExperimentConfig dp, ExperimentConfig fb) {
    SeedVote v;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        dp.seed = fb.seed = seed;
        const double a = mean_ber(dp), b = mean_ber(fb);
        v.wins += a < b;
        v.detail += fmt(" %.4f/%.4f", a, b);
    }
    return v;
}

Outcome vehicular_ordering() {
    const auto t0 = Clock::now();
    ExperimentConfig dp;
    dp.system = System::DpFbmc;
    dp.structure = StructureId::TPDM;
    dp.filter = FilterKind::SRRC;
    dp.alpha = 0.5;
    dp.channel = ChannelName::VehA;
    dp.ebn0_db = {20.0};
    dp.frames = 500;
    ExperimentConfig fb = dp;
    fb.system = System::Fbmc;
    fb.structure.reset();
    fb.filter = FilterKind::PHYDYAS;
    fb.alpha.reset();
    const auto v = vote(dp, fb);
    return {v.wins >= 4, fmt("dp wins %d/5 seeds, ber dp/fbmc:", v.wins) + v.detail +
                             fmt(", %.1f s", seconds_since(t0))};
}

Outcome offset_ordering() {
    const auto t0 = Clock::now();
    ExperimentConfig fb;
    fb.modulation = Modulation::QAM16;
    fb.snr_db = 12.0;
    fb.frames = 500;
    ExperimentConfig dp = fb;
    dp.system = System::DpFbmc;
    dp.structure = StructureId::TPDM;

    fb.experiment = dp.experiment = Experiment::Cfo;
    fb.cfo = dp.cfo = {0.1};
    const auto cfo = vote(dp, fb);
    fb.experiment = dp.experiment = Experiment::To;
    fb.to = dp.to = {40};
    const auto to = vote(dp, fb);
    return {cfo.wins >= 4 && to.wins >= 4, fmt("cfo 0.1: dp wins %d/5", cfo.wins) + cfo.detail +
                                               fmt("; to 40: dp wins %d/5", to.wins) + to.detail +
                                               fmt(", %.1f s", seconds_since(t0))};
}

Outcome xpd_trends() {
    const auto t0 = Clock::now();
    bool pass = true;
    std::string detail;
    for (auto ch : {ChannelName::PedA, ChannelName::VehA}) {
        ExperimentConfig c;
        c.experiment = Experiment::Xpd;
        c.system = System::DpFbmc;
        c.structure = StructureId::TPDM;
        c.filter = FilterKind::SRRC;
        c.alpha = 0.5;
        c.modulation = Modulation::QAM16;
        c.channel = ch;
        c.ebn0_db = {16.0};
        c.xpd_db = {1.0, 5.0, 10.0, 20.0, kInfiniteXpd};
        c.frames = 200;
        const auto plain = run_experiment(c).ber;
        c.xpi_cancel = true;
        const auto xpic = run_experiment(c).ber;
        std::string a, b;
        for (std::size_t i = 0; i < plain.size(); ++i) {
            const double u = plain[i].record.ber(), x = xpic[i].record.ber();
            if (i > 0)
                pass = pass && u <= plain[i - 1].record.ber();
            pass = pass && x <= u;
            a += fmt(" %.4g", u);
            b += fmt(" %.4g", x);
        }
        detail += fmt("; %s ber", std::string(to_string(ch)).c_str()) + a + " | xpic" + b;
    }
    return {pass, detail.substr(2) + fmt(" (xpd 1,5,10,20,inf dB), %.1f s", seconds_since(t0))};
}

// PAPR where the CCDF falls through level, interpolated in log10(ccdf).
double ccdf_crossing(const PaprCcdf& c, double level) {
    for (std::size_t i = 1; i < c.ccdf.size(); ++i)
        if (c.ccdf[i] <= level && c.ccdf[i - 1] > level) {
            if (c.ccdf[i] <= 0.0)
                return c.thresholds_db[i];
            const double a = std::log10(c.ccdf[i - 1]), b = std::log10(c.ccdf[i]), l = std::log10(level);
            return c.thresholds_db[i - 1] + (c.thresholds_db[i] - c.thresholds_db[i - 1]) * (a - l) / (a - b);
        }
    return std::numeric_limits<double>::quiet_NaN();
}

Outcome papr() {
    const auto t0 = Clock::now();
    ExperimentConfig c;
    c.experiment = Experiment::Papr;
    c.frames = 10000;
    for (double t = 4.0; t <= 14.0 + 1e-9; t += 0.02)
        c.papr_thresholds_db.push_back(t);

    c.system = System::CpOfdm;
    const double ofdm = ccdf_crossing(run_experiment(c).papr, 1e-2);
    const std::size_t N = c.symbols_per_frame * c.M;
    double formula = 0.0;
    for (double t = 4.0; t < 16.0; t += 1e-4)
        if (papr_ccdf_gaussian(t, N) <= 1e-2) {
            formula = t;
            break;
        }

    c.system = System::Fbmc;
    c.filter = FilterKind::SRRC;
    c.alpha = 0.5;
    c.K = 8;
    const double fb = ccdf_crossing(run_experiment(c).papr, 1e-2);
    c.system = System::DpFbmc;
    c.structure = StructureId::TPDM;
    const double dp = ccdf_crossing(run_experiment(c).papr, 1e-2);

    const bool pass = std::abs(ofdm - formula) <= 0.5 && std::abs(dp - fb) <= 0.5;
    return {pass, fmt("papr at ccdf 1e-2: cpofdm %.2f dB vs formula %.2f dB; dp srrc K=8 %.2f dB vs fbmc %.2f dB, "
                      "%.1f s",
                      ofdm, formula, dp, fb, seconds_since(t0))};
}

Outcome psd() {
    const auto t0 = Clock::now();
    ExperimentConfig c;
    c.experiment = Experiment::Psd;
    c.frames = 50;

    // In band: well inside the occupied subcarriers.
    const double edge = static_cast<double>(c.M) / 2.0 - static_cast<double>(c.guard_left) - 8.0;
    double in_band = 0.0;
    for (auto kind : {FilterKind::PHYDYAS, FilterKind::SRRC}) {
        c.filter = kind;
        if (kind == FilterKind::SRRC)
            c.alpha = 0.5;
        c.system = System::Fbmc;
        c.structure.reset();
        const auto fb = run_experiment(c).psd;
        c.system = System::DpFbmc;
        c.structure = StructureId::TPDM;
        const auto dp = run_experiment(c).psd;
        for (std::size_t i = 0; i < fb.freq.size(); ++i)
            if (std::abs(fb.freq[i]) <= edge)
                in_band = std::max(in_band, std::abs(fb.psd_db[i] - dp.psd_db[i]));
    }

    // Out of band floor: mean level beyond 300 subcarrier spacings.
    auto floor_db = [&](int K) {
        ExperimentConfig s = c;
        s.system = System::Fbmc;
        s.structure.reset();
        s.filter = FilterKind::SRRC;
        s.K = K;
        const auto r = run_experiment(s).psd;
        double acc = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < r.freq.size(); ++i)
            if (std::abs(r.freq[i]) >= 300.0) {
                acc += std::pow(10.0, r.psd_db[i] / 10.0);
                ++n;
            }
        return 10.0 * std::log10(acc / static_cast<double>(n));
    };
    const double k4 = floor_db(4), k8 = floor_db(8);
    return {in_band <= 1.0 && k8 < k4,
            fmt("max in-band |dp - fbmc| %.3f dB (phydyas, srrc); srrc oob floor K=4 %.1f dB, K=8 %.1f dB, %.1f s",
                in_band, k4, k8, seconds_since(t0))};
}

Outcome determinism() {
    ExperimentConfig c;
    c.system = System::DpFbmc;
    c.structure = StructureId::TFPDM;
    c.filter = FilterKind::SRRC;
    c.alpha = 0.5;
    c.channel = ChannelName::VehA;
    c.modulation = Modulation::QAM16;
    c.ebn0_db = {6.0, 14.0};
    c.frames = 24;
    c.seed = 77;
    auto csv = [&](int threads) {
        c.threads = threads;
        std::ostringstream os;
        write_csv(os, c, run_experiment(c));
        return os.str();
    };
    const int n = std::max(4, omp_get_num_procs());
    const std::string one = csv(1), many = csv(n);
    return {one == many, fmt("csv of %zu bytes, 1 vs %d workers %s", one.size(), n,
                             one == many ? "byte-identical" : "differ")};
}

} // namespace

int main(int argc, char** argv) {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"interference tables", tables},
        {"real orthogonality", real_orthogonality},
        {"loopback reconstruction", loopbacks},
        {"polyphase vs direct", ppn_vs_direct},
        {"awgn calibration", awgn_calibration},
        {"delay spread", delay_spread},
        {"vehicular ber ordering", vehicular_ordering},
        {"cfo/to ordering", offset_ordering},
        {"xpd trends", xpd_trends},
        {"papr", papr},
        {"psd", psd},
        {"determinism", determinism},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i)
        only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (int i = 0; i < 12; ++i) {
        if (!only.empty() && !only.count(i + 1))
            continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
