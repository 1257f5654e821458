#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "beliefsim/dynamics.hpp"
#include "beliefsim/sweep.hpp"

namespace beliefsim {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bins used for histogram.csv.
inline constexpr std::uint32_t kHistogramBins = 20;

// CSV bodies. Numbers use format_double; booleans are 0/1; lines end in '\n'.
std::string trajectory_csv(const std::vector<StepTrace>& traces);
std::string positions_csv(const RunResult& result);
std::string histogram_csv(const RunResult& result, std::uint32_t bins = kHistogramBins);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_agg_csv(const std::vector<CellAggregate>& cells);

// Resolved configuration (parseable by parse_config) preceded by comment
// lines naming the library and RNG versions.
std::string run_meta(const SweepSpec& spec);

// Files staged in a directory and published together. Staged content goes
// to hidden temporaries; commit() renames them into place. If commit() is
// never reached, or fails part way, every staged and already-published file
// is removed.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir);
    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;
    ~OutputSet();

    void stage(const std::string& name, const std::string& content);
    void commit();

private:
    void discard() noexcept;

    std::filesystem::path dir_;
    std::vector<std::string> names_;
    std::vector<std::filesystem::path> published_;
    bool committed_ = false;
};

// Runs one simulation and writes trajectory.csv, positions.csv,
// histogram.csv and run_meta.txt into `dir` (created if needed). Throws
// ConfigError for invalid configs and IoError for filesystem failures.
void write_run_outputs(const SweepSpec& spec, const std::filesystem::path& dir);

// Runs the sweep and writes sweep.csv and sweep_agg.csv.
void write_sweep_outputs(const SweepSpec& spec, const std::filesystem::path& dir,
                         unsigned threads);

}  // namespace beliefsim
