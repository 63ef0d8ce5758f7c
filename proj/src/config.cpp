#include "dpfbmc/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace dpfbmc {
namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why = {}) {
    std::string msg = "invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'";
    if (!why.empty())
        msg += ": " + std::string(why);
    throw ConfigError(msg);
}

double parse_real(std::string_view text) {
    const std::string t = lower(trim(text));
    if (t == "inf" || t == "+inf" || t == "infinity")
        return std::numeric_limits<double>::infinity();
    if (t == "-inf")
        return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw ParameterError("not a number: '" + t + "'");
    }
    if (used != t.size())
        throw ParameterError("not a number: '" + t + "'");
    return v;
}

template <typename T>
T parse_integer(std::string_view text) {
    const auto t = trim(text);
    T v{};
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        throw ParameterError("not an integer: '" + std::string(t) + "'");
    return v;
}

bool parse_bool(std::string_view text) {
    const std::string t = lower(trim(text));
    if (t == "1" || t == "true" || t == "yes" || t == "on")
        return true;
    if (t == "0" || t == "false" || t == "no" || t == "off")
        return false;
    throw ParameterError("not a boolean: '" + t + "'");
}

} // namespace

std::string_view to_string(Experiment e) {
    switch (e) {
    case Experiment::Ber: return "ber";
    case Experiment::Papr: return "papr";
    case Experiment::Psd: return "psd";
    case Experiment::Cfo: return "cfo";
    case Experiment::To: return "to";
    case Experiment::Xpd: return "xpd";
    }
    return "?";
}

std::string_view to_string(System s) {
    switch (s) {
    case System::CpOfdm: return "cpofdm";
    case System::Fbmc: return "fbmc";
    case System::DpFbmc: return "dpfbmc";
    }
    return "?";
}

std::string_view to_string(Equalizer e) { return e == Equalizer::Perfect ? "perfect" : "estimated"; }

Equalizer ExperimentConfig::effective_equalizer() const {
    if (equalizer)
        return *equalizer;
    switch (experiment) {
    case Experiment::Cfo:
    case Experiment::To:
    case Experiment::Xpd: return Equalizer::Perfect;
    default: return Equalizer::Estimated;
    }
}

std::size_t ExperimentConfig::cp_len() const {
    return static_cast<std::size_t>(std::llround(cp_fraction * static_cast<double>(M)));
}

RVec parse_real_list(std::string_view text) {
    RVec out;
    const auto t = trim(text);
    if (t.empty())
        return out;
    if (t.find(':') != std::string_view::npos) {
        std::vector<double> parts;
        std::string_view rest = t;
        while (true) {
            const auto c = rest.find(':');
            parts.push_back(parse_real(rest.substr(0, c)));
            if (c == std::string_view::npos)
                break;
            rest = rest.substr(c + 1);
        }
        if (parts.size() != 3)
            throw ParameterError("range must be start:step:stop");
        const double start = parts[0], step = parts[1], stop = parts[2];
        if (!(step > 0.0) || stop < start || !std::isfinite(start) || !std::isfinite(stop))
            throw ParameterError("range needs a positive step and stop >= start");
        const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
        for (std::size_t i = 0; i <= n; ++i)
            out.push_back(start + static_cast<double>(i) * step);
        return out;
    }
    std::string_view rest = t;
    while (true) {
        const auto c = rest.find(',');
        out.push_back(parse_real(rest.substr(0, c)));
        if (c == std::string_view::npos)
            break;
        rest = rest.substr(c + 1);
    }
    return out;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key_in, std::string_view value_in) {
    const std::string key = lower(trim(key_in));
    const std::string_view value = trim(value_in);
    const std::string v = lower(value);
    try {
        if (key == "experiment") {
            if (v == "ber") cfg.experiment = Experiment::Ber;
            else if (v == "papr") cfg.experiment = Experiment::Papr;
            else if (v == "psd") cfg.experiment = Experiment::Psd;
            else if (v == "cfo") cfg.experiment = Experiment::Cfo;
            else if (v == "to") cfg.experiment = Experiment::To;
            else if (v == "xpd") cfg.experiment = Experiment::Xpd;
            else bad_value(key, value, "expected ber, papr, psd, cfo, to or xpd");
        } else if (key == "system") {
            if (v == "cpofdm" || v == "ofdm") cfg.system = System::CpOfdm;
            else if (v == "fbmc") cfg.system = System::Fbmc;
            else if (v == "dpfbmc" || v == "dp-fbmc") cfg.system = System::DpFbmc;
            else bad_value(key, value, "expected cpofdm, fbmc or dpfbmc");
        } else if (key == "structure") {
            if (v.empty() || v == "none")
                cfg.structure.reset();
            else
                cfg.structure = structure_from_string(v);
        } else if (key == "filter") {
            cfg.filter = filter_kind_from_string(v);
        } else if (key == "k") {
            cfg.K = parse_integer<int>(value);
        } else if (key == "alpha") {
            if (v.empty() || v == "none")
                cfg.alpha.reset();
            else
                cfg.alpha = parse_real(value);
        } else if (key == "modulation") {
            cfg.modulation = modulation_from_string(v);
        } else if (key == "channel") {
            cfg.channel = channel_from_string(v);
        } else if (key == "m") {
            cfg.M = parse_integer<std::size_t>(value);
        } else if (key == "symbols_per_frame" || key == "s") {
            cfg.symbols_per_frame = parse_integer<std::size_t>(value);
        } else if (key == "bandwidth_hz") {
            cfg.bandwidth_hz = parse_real(value);
        } else if (key == "cp_fraction") {
            cfg.cp_fraction = parse_real(value);
        } else if (key == "guards") {
            const RVec g = parse_real_list(value);
            if (g.size() != 2 || g[0] < 0 || g[1] < 0 || g[0] != std::floor(g[0]) || g[1] != std::floor(g[1]))
                bad_value(key, value, "expected two non-negative integers 'left,right'");
            cfg.guard_left = static_cast<std::size_t>(g[0]);
            cfg.guard_right = static_cast<std::size_t>(g[1]);
        } else if (key == "ebn0_db" || key == "ebn0") {
            cfg.ebn0_db = parse_real_list(value);
        } else if (key == "snr_db" || key == "snr") {
            if (v.empty() || v == "none")
                cfg.snr_db.reset();
            else
                cfg.snr_db = parse_real(value);
        } else if (key == "cfo") {
            cfg.cfo = parse_real_list(value);
        } else if (key == "to") {
            cfg.to.clear();
            for (double x : parse_real_list(value)) {
                if (x != std::floor(x) || !std::isfinite(x))
                    bad_value(key, value, "timing offsets are whole samples");
                cfg.to.push_back(static_cast<long>(x));
            }
        } else if (key == "xpd_db" || key == "xpd") {
            cfg.xpd_db = parse_real_list(value);
        } else if (key == "frames") {
            cfg.frames = parse_integer<std::size_t>(value);
        } else if (key == "seed") {
            cfg.seed = parse_integer<std::uint64_t>(value);
        } else if (key == "equalizer") {
            if (v == "estimated") cfg.equalizer = Equalizer::Estimated;
            else if (v == "perfect") cfg.equalizer = Equalizer::Perfect;
            else if (v == "auto" || v.empty()) cfg.equalizer.reset();
            else bad_value(key, value, "expected estimated or perfect");
        } else if (key == "out_path" || key == "out") {
            cfg.out_path = std::string(value);
        } else if (key == "pilots") {
            cfg.pilot_count = parse_integer<std::size_t>(value);
        } else if (key == "pilot_stride") {
            cfg.pilot_stride = parse_integer<std::size_t>(value);
        } else if (key == "aux_pilots") {
            cfg.aux_pilots = parse_bool(value);
        } else if (key == "xpi_cancel") {
            cfg.xpi_cancel = parse_bool(value);
        } else if (key == "early_stop") {
            cfg.early_stop = parse_bool(value);
        } else if (key == "early_stop_errors") {
            cfg.early_stop_errors = parse_integer<std::size_t>(value);
        } else if (key == "psd_nfft") {
            cfg.psd_nfft = parse_integer<std::size_t>(value);
        } else if (key == "psd_overlap") {
            cfg.psd_overlap = parse_real(value);
        } else if (key == "oversample" || key == "psd_oversample") {
            cfg.psd_oversample = parse_integer<std::size_t>(value);
        } else if (key == "papr_thresholds_db" || key == "papr_thresholds") {
            cfg.papr_thresholds_db = parse_real_list(value);
        } else if (key == "threads") {
            cfg.threads = parse_integer<int>(value);
        } else {
            throw ConfigError("unknown key '" + key + "'");
        }
    } catch (const ParameterError& e) {
        bad_value(key, value, e.what());
    }
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = line;
        if (const auto hash = sv.find('#'); hash != std::string_view::npos)
            sv = sv.substr(0, hash);
        sv = trim(sv);
        if (sv.empty())
            continue;
        const auto eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        try {
            apply_setting(cfg, sv.substr(0, eq), sv.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig parse_config_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_config(in);
}

void validate(const ExperimentConfig& c) {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    const bool dp = c.system == System::DpFbmc;
    const bool ofdm = c.system == System::CpOfdm;

    if (dp && (!c.structure || *c.structure == StructureId::Conventional))
        fail("system=dpfbmc requires structure to be 1, 2 or 3");
    if (!dp && c.structure && *c.structure != StructureId::Conventional)
        fail("structure is only valid with system=dpfbmc (got system=" + std::string(to_string(c.system)) + ")");

    if (!ofdm) {
        if (c.filter == FilterKind::SRRC && !c.alpha)
            fail("filter=srrc requires alpha");
        if (c.filter != FilterKind::SRRC && c.alpha)
            fail("alpha only applies to filter=srrc (got filter=" + std::string(to_string(c.filter)) + ")");
        if (c.alpha && !(*c.alpha > 0.0 && *c.alpha <= 1.0))
            fail("alpha must be in (0, 1]");
        if (c.K < 2)
            fail("K must be at least 2");
        if (c.filter != FilterKind::SRRC && c.K != 4)
            fail("filter=" + std::string(to_string(c.filter)) + " supports only K=4");
    }

    if (!is_power_of_two(c.M) || c.M < 16)
        fail("M must be a power of two >= 16");
    if (c.symbols_per_frame == 0)
        fail("symbols_per_frame must be positive");
    if (!(c.bandwidth_hz > 0.0))
        fail("bandwidth_hz must be positive");
    if (!(c.cp_fraction >= 0.0 && c.cp_fraction < 1.0))
        fail("cp_fraction must be in [0, 1)");
    if (c.guard_left + c.guard_right + 1 >= c.M)
        fail("guards leave no active subcarriers for M=" + std::to_string(c.M));

    const bool ber_like = c.experiment == Experiment::Ber || c.experiment == Experiment::Cfo ||
                          c.experiment == Experiment::To || c.experiment == Experiment::Xpd;
    if (c.experiment == Experiment::Ber && c.ebn0_db.empty())
        fail("experiment=ber requires a non-empty ebn0_db list");
    if (ber_like && c.experiment != Experiment::Ber && !c.snr_db && c.ebn0_db.size() != 1)
        fail("experiment=" + std::string(to_string(c.experiment)) +
             " needs one operating point: set snr_db or a single ebn0_db value");
    for (double e : c.ebn0_db)
        if (!std::isfinite(e))
            fail("ebn0_db values must be finite");
    if (c.experiment == Experiment::Cfo && c.cfo.empty())
        fail("experiment=cfo requires a non-empty cfo list");
    if (c.experiment == Experiment::To && c.to.empty())
        fail("experiment=to requires a non-empty to list");
    if (c.experiment == Experiment::Xpd) {
        if (!dp)
            fail("experiment=xpd requires system=dpfbmc");
        if (c.xpd_db.empty())
            fail("experiment=xpd requires a non-empty xpd_db list");
        for (double x : c.xpd_db)
            if (!(x > 0.0))
                fail("xpd_db values must be positive or inf");
    }
    if (c.experiment != Experiment::Xpd && !c.xpd_db.empty() && !dp)
        fail("xpd_db is only valid with system=dpfbmc");
    if (c.xpi_cancel && c.experiment != Experiment::Xpd)
        fail("xpi_cancel requires experiment=xpd");

    if (ber_like && c.effective_equalizer() == Equalizer::Estimated) {
        if (c.pilot_count < 4)
            fail("equalizer=estimated needs pilots >= 4");
        if (c.pilot_stride == 0)
            fail("pilot_stride must be positive");
    }
    if (c.experiment == Experiment::Psd) {
        if (c.psd_nfft < 16 || !is_power_of_two(c.psd_nfft))
            fail("psd_nfft must be a power of two >= 16");
        if (!(c.psd_overlap >= 0.0 && c.psd_overlap < 1.0))
            fail("psd_overlap must be in [0, 1)");
        if (c.psd_oversample == 0 || !is_power_of_two(c.psd_oversample))
            fail("oversample must be a power of two");
    }
    if (c.threads < 0)
        fail("threads must be non-negative");
    if (c.early_stop && c.early_stop_errors == 0)
        fail("early_stop_errors must be positive");
}

} // namespace dpfbmc
