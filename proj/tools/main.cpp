// dpfbmc: run seeded waveform experiments and inspect filters/channels.
//
//   dpfbmc run --config exp.cfg [--frames 200 --out ber.csv ...]
//   dpfbmc filter --kind phydyas --dump-table table.csv
//   dpfbmc profile --channel veha

#include "dpfbmc/harness.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

using namespace dpfbmc;

namespace {

constexpr int kConfigExit = 2;

struct RunArgs {
    std::string config_path;
    std::vector<std::string> sets;
    std::vector<std::pair<std::string, std::string>> flags;
    int threads = 0;
};

int do_run(const RunArgs& a) {
    try {
        ExperimentConfig cfg;
        if (!a.config_path.empty()) {
            std::ifstream in(a.config_path);
            if (!in)
                throw ConfigError("cannot read config file '" + a.config_path + "'");
            cfg = parse_config(in);
        }
        for (const auto& [k, v] : a.flags)
            apply_setting(cfg, k, v);
        for (const auto& s : a.sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError("--set expects key=value, got '" + s + "'");
            apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
        }
        if (a.threads > 0)
            cfg.threads = a.threads;
        validate(cfg);

        const ExperimentResult res = run_experiment(cfg);
        if (cfg.out_path.empty() || cfg.out_path == "-")
            write_csv(std::cout, cfg, res);
        else
            write_csv_atomic(cfg.out_path, cfg, res);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigExit;
    } catch (const ParameterError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigExit;
    }
}

// "-" writes to stdout.
void with_output(const std::string& path, const std::function<void(std::ostream&)>& body) {
    if (path == "-") {
        body(std::cout);
        return;
    }
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open " + path);
    body(os);
}

int do_filter(const std::string& kind, int K, std::size_t M, double alpha, const std::string& filter_path,
              const std::string& table_path, int dp, int dq) {
    const ProtoFilter f = make_filter(filter_kind_from_string(kind), K, M, alpha);
    char buf[128];
    if (!filter_path.empty())
        with_output(filter_path, [&](std::ostream& os) {
            os << "index,value\n";
            for (std::size_t k = 0; k < f.length(); ++k) {
                std::snprintf(buf, sizeof buf, "%zu,%.17g\n", k, f.taps[k]);
                os << buf;
            }
        });
    const std::string tp = table_path.empty() && filter_path.empty() ? "-" : table_path;
    if (!tp.empty())
        with_output(tp, [&](std::ostream& os) {
            const AmbiguityTable t = interference_table(f, dp, dq);
            os << "p,q,re,im\n";
            for (int p = -dp; p <= dp; ++p)
                for (int q = -dq; q <= dq; ++q) {
                    std::snprintf(buf, sizeof buf, "%d,%d,%.6f,%.6f\n", p, q, t(p, q).real(), t(p, q).imag());
                    os << buf;
                }
        });
    return 0;
}

int do_profile(const std::string& channel, double fs) {
    const ChannelProfile p = make_itu_profile(channel_from_string(channel), fs);
    write_profile_csv(std::cout, p);
    std::cerr << "rms delay spread: " << rms_delay_spread(p) * 1e9 << " ns\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual-polarization FBMC / OFDM waveform simulator"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "run an experiment and write CSV");
    run_cmd->add_option("-c,--config", run.config_path, "key = value config file");
    run_cmd->add_option("--set", run.sets, "extra key=value setting (repeatable)");
    run_cmd->add_option("--threads", run.threads, "OpenMP workers (0 = default)");
    // Each flag maps onto the config key of the same meaning.
    const std::vector<std::pair<std::string, std::string>> flag_keys = {
        {"--experiment", "experiment"}, {"--system", "system"},  {"--structure", "structure"},
        {"--filter", "filter"},         {"--K", "K"},            {"--alpha", "alpha"},
        {"--modulation", "modulation"}, {"--channel", "channel"}, {"--ebn0", "ebn0_db"},
        {"--snr", "snr_db"},            {"--cfo", "cfo"},        {"--to", "to"},
        {"--xpd", "xpd_db"},            {"--frames", "frames"},  {"--seed", "seed"},
        {"--equalizer", "equalizer"},   {"--out", "out_path"}};
    std::vector<std::string> flag_values(flag_keys.size());
    std::vector<CLI::Option*> flag_opts;
    for (std::size_t i = 0; i < flag_keys.size(); ++i)
        flag_opts.push_back(run_cmd->add_option(flag_keys[i].first, flag_values[i], "overrides '" +
                                                                                       flag_keys[i].second + "'"));

    std::string kind = "phydyas";
    int K = 4;
    std::size_t M = 512;
    double alpha = 0.5;
    std::string dump_filter;
    std::string dump_table;
    int dp = 2, dq = 3;
    auto* filter_cmd = app.add_subcommand("filter", "print prototype taps or the interference table");
    filter_cmd->add_option("--kind", kind, "iota, phydyas or srrc");
    filter_cmd->add_option("--K", K, "overlapping factor");
    filter_cmd->add_option("--M", M, "subcarriers");
    filter_cmd->add_option("--alpha", alpha, "SRRC roll-off");
    filter_cmd->add_option("--dump-filter", dump_filter, "write taps as index,value CSV ('-' for stdout)");
    filter_cmd->add_option("--dump-table", dump_table, "write the ambiguity table as p,q,re,im CSV ('-' for stdout)");
    filter_cmd->add_option("--dp", dp, "max subcarrier offset");
    filter_cmd->add_option("--dq", dq, "max half-symbol offset");

    std::string channel = "veha";
    double fs = 1e7;
    auto* profile_cmd = app.add_subcommand("profile", "dump an ITU channel profile");
    profile_cmd->add_option("--channel", channel, "awgn, peda or veha");
    profile_cmd->add_option("--fs", fs, "sample rate, Hz");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            for (std::size_t i = 0; i < flag_keys.size(); ++i)
                if (flag_opts[i]->count() > 0)
                    run.flags.emplace_back(flag_keys[i].second, flag_values[i]);
            return do_run(run);
        }
        if (*filter_cmd)
            return do_filter(kind, K, M, alpha, dump_filter, dump_table, dp, dq);
        if (*profile_cmd)
            return do_profile(channel, fs);
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
