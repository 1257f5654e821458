// sim: command-line front end for the beliefsim C API.
//
//   sim run      --config <path> --out <dir> [--seed <u64>] [--snapshot-every <n>]
//   sim sweep    --config <path> --out <dir> [--threads <n>]
//   sim defaults
//
// Exit codes: 0 success, 1 configuration or usage error, 2 I/O error.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "beliefsim/beliefsim.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

struct ConfigDeleter {
    void operator()(bsim_config* c) const { bsim_config_free(c); }
};
using ConfigHandle = std::unique_ptr<bsim_config, ConfigDeleter>;

int report(bsim_status status) {
    if (status == BSIM_OK) return kExitOk;
    std::cerr << "sim: " << bsim_last_error() << '\n';
    return status == BSIM_ERR_IO ? kExitIo : kExitConfig;
}

std::optional<std::uint64_t> parse_u64(const std::string& text) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(text, &used, 10);
        if (used != text.size()) return std::nullopt;
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

int load(const std::string& path, ConfigHandle& out) {
    bsim_config* raw = nullptr;
    const bsim_status st = bsim_config_load(path.c_str(), &raw);
    out.reset(raw);
    return report(st);
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::optional<std::string>& seed_flag, std::optional<std::uint32_t> snapshot_every) {
    ConfigHandle config;
    if (int rc = load(config_path, config); rc != kExitOk) return rc;

    // Precedence: config file < SIM_SEED < --seed.
    if (const char* env = std::getenv("SIM_SEED"); env != nullptr && *env != '\0') {
        const auto seed = parse_u64(env);
        if (!seed) {
            std::cerr << "sim: SIM_SEED is not an unsigned 64-bit integer: " << env << '\n';
            return kExitConfig;
        }
        bsim_config_set_seed(config.get(), *seed);
    }
    if (seed_flag) {
        const auto seed = parse_u64(*seed_flag);
        if (!seed) {
            std::cerr << "sim: --seed is not an unsigned 64-bit integer: " << *seed_flag << '\n';
            return kExitConfig;
        }
        bsim_config_set_seed(config.get(), *seed);
    }
    if (snapshot_every) {
        if (int rc = report(bsim_config_set_snapshot_every(config.get(), *snapshot_every)); rc != kExitOk) {
            return rc;
        }
    }
    return report(bsim_run_to_dir(config.get(), out_dir.c_str()));
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir, std::uint32_t threads) {
    ConfigHandle config;
    if (int rc = load(config_path, config); rc != kExitOk) return rc;
    return report(bsim_sweep_to_dir(config.get(), out_dir.c_str(), threads));
}

int cmd_defaults() {
    bsim_config* raw = nullptr;
    if (int rc = report(bsim_config_default(&raw)); rc != kExitOk) return rc;
    ConfigHandle config(raw);
    std::size_t needed = 0;
    if (int rc = report(bsim_config_render(config.get(), nullptr, 0, &needed)); rc != kExitOk) return rc;
    std::vector<char> buf(needed);
    if (int rc = report(bsim_config_render(config.get(), buf.data(), buf.size(), &needed)); rc != kExitOk) {
        return rc;
    }
    std::cout << "# beliefsim " << bsim_version() << " default configuration\n" << buf.data();
    return std::cout.good() ? kExitOk : kExitIo;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Agent-based opinion dynamics under information overload"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::string> seed;
    std::optional<std::uint32_t> snapshot_every;
    std::uint32_t threads = 1;

    auto* run = app.add_subcommand("run", "Run one simulation and write trajectory, positions and histogram CSVs");
    run->add_option("--config", config_path, "Config file (key = value lines)")->required();
    run->add_option("--out", out_dir, "Output directory")->required();
    run->add_option("--seed", seed, "Seed override (unsigned 64-bit)");
    run->add_option("--snapshot-every", snapshot_every, "Position snapshot interval in steps");

    auto* sweep = app.add_subcommand("sweep", "Run the (n_values x r_values x replicates) grid");
    sweep->add_option("--config", config_path, "Config file (key = value lines)")->required();
    sweep->add_option("--out", out_dir, "Output directory")->required();
    sweep->add_option("--threads", threads, "Concurrent runs")->check(CLI::PositiveNumber);

    auto* defaults = app.add_subcommand("defaults", "Print a complete config file with default values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (run->parsed()) return cmd_run(config_path, out_dir, seed, snapshot_every);
    if (sweep->parsed()) return cmd_sweep(config_path, out_dir, threads);
    if (defaults->parsed()) return cmd_defaults();
    return kExitConfig;
}
