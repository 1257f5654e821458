#include "beliefsim/artifacts.hpp"

#include <fstream>
#include <system_error>

#include "beliefsim/config_file.hpp"
#include "beliefsim/metrics.hpp"
#include "beliefsim/population.hpp"

namespace beliefsim {

namespace fs = std::filesystem;

namespace {

std::string temp_name(const std::string& name) { return "." + name + ".tmp"; }

std::vector<BeliefVector> free_positions_of(const Snapshot& snap, const SimState& state) {
    std::vector<BeliefVector> out;
    for (std::size_t i = 0; i < snap.positions.size(); ++i) {
        if (!state.agents[i].committed) out.push_back(snap.positions[i]);
    }
    return out;
}

}  // namespace

std::string trajectory_csv(const std::vector<StepTrace>& traces) {
    std::string out = "t,Q,mean_extremity,mean_coverage,max_delta\n";
    for (const auto& tr : traces) {
        out += std::to_string(tr.t) + ',' + format_double(tr.q) + ',' +
               format_double(tr.mean_extremity) + ',' + format_double(tr.mean_coverage) + ',' +
               format_double(tr.max_delta) + '\n';
    }
    return out;
}

std::string positions_csv(const RunResult& result) {
    const auto& agents = result.final_state.agents;
    const std::size_t dims = agents.empty() ? 0 : agents.front().position.dims();
    std::string out = "t,agent_id,committed";
    for (std::size_t d = 0; d < dims; ++d) out += ",dim" + std::to_string(d);
    out += '\n';
    for (const auto& snap : result.snapshots) {
        for (std::size_t i = 0; i < snap.positions.size(); ++i) {
            out += std::to_string(snap.t) + ',' + std::to_string(agents[i].id) + ',' +
                   (agents[i].committed ? '1' : '0');
            for (std::size_t d = 0; d < dims; ++d) out += ',' + format_double(snap.positions[i][d]);
            out += '\n';
        }
    }
    return out;
}

std::string histogram_csv(const RunResult& result, std::uint32_t bins) {
    std::string out = "t,bin_lo,bin_hi,count\n";
    for (const auto& snap : result.snapshots) {
        const auto free = free_positions_of(snap, result.final_state);
        if (free.empty()) continue;
        const auto counts = belief_histogram(free, principal_axis(free), bins);
        for (std::uint32_t b = 0; b < bins; ++b) {
            const double lo = -1.0 + 2.0 * b / bins;
            const double hi = -1.0 + 2.0 * (b + 1) / bins;
            out += std::to_string(snap.t) + ',' + format_double(lo) + ',' + format_double(hi) +
                   ',' + std::to_string(counts[b]) + '\n';
        }
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "N,r,replicate,seed,Q_final,mean_extremity_final,steps_run,converged\n";
    for (const auto& row : rows) {
        out += std::to_string(row.n_docs) + ',' + format_double(row.r) + ',' +
               std::to_string(row.replicate) + ',' + std::to_string(row.seed) + ',' +
               format_double(row.q_final) + ',' + format_double(row.mean_extremity_final) + ',' +
               std::to_string(row.steps_run) + ',' + (row.converged ? '1' : '0') + '\n';
    }
    return out;
}

std::string sweep_agg_csv(const std::vector<CellAggregate>& cells) {
    std::string out = "N,r,mean_Q,stddev_Q,mean_extremity,n_replicates\n";
    for (const auto& c : cells) {
        out += std::to_string(c.n_docs) + ',' + format_double(c.r) + ',' + format_double(c.mean_q) +
               ',' + format_double(c.stddev_q) + ',' + format_double(c.mean_extremity) + ',' +
               std::to_string(c.n_replicates) + '\n';
    }
    return out;
}

std::string run_meta(const SweepSpec& spec) {
    std::string out = "# beliefsim " BELIEFSIM_VERSION "\n";
    out += "# rng bsim-rng/" + std::to_string(Rng::kRngVersion) + " (mt19937_64)\n";
    out += render_config(spec);
    return out;
}

OutputSet::OutputSet(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
        throw IoError("cannot create output directory '" + dir_.string() + "'" +
                      (ec ? ": " + ec.message() : std::string()));
    }
}

OutputSet::~OutputSet() {
    if (!committed_) discard();
}

void OutputSet::stage(const std::string& name, const std::string& content) {
    const fs::path tmp = dir_ / temp_name(name);
    names_.push_back(name);
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + tmp.string() + "' for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.close();
    if (!f) throw IoError("failed writing '" + tmp.string() + "'");
}

void OutputSet::commit() {
    for (const auto& name : names_) {
        std::error_code ec;
        const fs::path target = dir_ / name;
        fs::rename(dir_ / temp_name(name), target, ec);
        if (ec) throw IoError("cannot publish '" + target.string() + "': " + ec.message());
        published_.push_back(target);
    }
    committed_ = true;
}

void OutputSet::discard() noexcept {
    std::error_code ec;
    for (const auto& name : names_) fs::remove(dir_ / temp_name(name), ec);
    for (const auto& p : published_) fs::remove(p, ec);
}

void write_run_outputs(const SweepSpec& spec, const fs::path& dir) {
    validate(spec.base);
    const RunResult result = run(init_population(spec.base), spec.base);
    OutputSet out(dir);
    out.stage("trajectory.csv", trajectory_csv(result.traces));
    out.stage("positions.csv", positions_csv(result));
    out.stage("histogram.csv", histogram_csv(result));
    out.stage("run_meta.txt", run_meta(spec));
    out.commit();
}

void write_sweep_outputs(const SweepSpec& spec, const fs::path& dir, unsigned threads) {
    const auto rows = run_sweep(spec, threads);
    OutputSet out(dir);
    out.stage("sweep.csv", sweep_csv(rows));
    out.stage("sweep_agg.csv", sweep_agg_csv(aggregate(rows)));
    out.commit();
}

}  // namespace beliefsim
