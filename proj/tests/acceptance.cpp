// Acceptance checks. Prints one PASS/FAIL line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run only criterion N (1-8)
//
// Exit status is 0 only if every selected criterion passes.

#include <sys/wait.h>

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "beliefsim/dynamics.hpp"
#include "beliefsim/metrics.hpp"
#include "beliefsim/population.hpp"
#include "beliefsim/sweep.hpp"

using namespace beliefsim;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Collects failures; the first few messages are kept for the report.
struct Checker {
    long checks = 0;
    long failures = 0;
    std::string first;

    void operator()(bool ok, const std::string& what) {
        ++checks;
        if (ok) return;
        if (failures++ == 0) first = what;
    }
    Outcome outcome(std::string summary) const {
        if (failures == 0) return {true, summary + ", " + std::to_string(checks) + " checks"};
        return {false, std::to_string(failures) + "/" + std::to_string(checks) +
                           " checks failed; first: " + first};
    }
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    return buf;
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---------------------------------------------------------------------------
// 1. Invariants

Outcome invariants() {
    Checker check;
    struct Case {
        ConsumerPolicy kind;
        ProductionMode mode;
        std::uint32_t dims;
        double r;
    };
    const std::vector<Case> cases = {
        {ConsumerPolicy::Biased, ProductionMode::Sampled, 1, 0.05},
        {ConsumerPolicy::Biased, ProductionMode::Sampled, 2, 0.2},
        {ConsumerPolicy::Uniform, ProductionMode::Sampled, 1, 0.1},
        {ConsumerPolicy::Mixed, ProductionMode::Sampled, 3, 0.1},
        {ConsumerPolicy::Biased, ProductionMode::Mirror, 1, 0.0},
        {ConsumerPolicy::Uniform, ProductionMode::Mirror, 2, 0.1},
    };
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
        const auto& cs = cases[ci];
        SimConfig c;
        c.consumer_kind = cs.kind;
        c.production_mode = cs.mode;
        c.dims = cs.dims;
        c.misinfo_ratio = cs.r;
        c.n_docs = cs.mode == ProductionMode::Mirror ? c.n_free() : 400;
        c.seed = 1000 + ci;
        SimState s = init_population(c);
        for (int t = 0; t < 100; ++t) {
            const std::string where = "case " + std::to_string(ci) + " t=" + std::to_string(t);
            Rng prod = substream(s.seed, StreamPurpose::Production, s.time);
            const DocumentPool pool = produce_documents(s, c, prod);

            if (cs.mode == ProductionMode::Mirror) {
                // Genuine documents are the free positions, as a multiset.
                std::vector<std::vector<double>> docs, agents;
                for (std::size_t j = 0; j < pool.size(); ++j) {
                    if (!pool.is_misinformation(j)) {
                        auto p = pool.position(j);
                        docs.emplace_back(p.begin(), p.end());
                    }
                }
                for (const auto& a : s.agents) {
                    if (!a.committed) agents.push_back(a.position.components());
                }
                std::sort(docs.begin(), docs.end());
                std::sort(agents.begin(), agents.end());
                check(docs == agents, where + ": mirror pool differs from free positions");
            }

            Rng cons(c.seed ^ static_cast<std::uint64_t>(t));
            for (const auto& a : s.agents) {
                if (a.committed) continue;
                const auto curated = curate_for_agent(a, pool);
                for (std::uint32_t j = 0; j < pool.size(); ++j) {
                    const bool inside = distance(a.position, pool.position(j)) <= a.visibility_radius;
                    const bool listed = std::binary_search(curated.begin(), curated.end(), j);
                    check(inside == listed, where + ": curation radius");
                }
                const auto rec = a.consumer_kind == ConsumerKind::Biased
                                     ? consume_biased(a, curated, pool)
                                     : consume_uniform(a, curated, pool, cons);
                check(rec.consumed_ids.size() == std::min<std::size_t>(a.capacity, curated.size()),
                      where + ": consumption cardinality");
            }

            const StepResult next = step(s, c);
            for (std::size_t i = 0; i < s.agents.size(); ++i) {
                const auto& after = next.state.agents[i];
                check(is_valid_belief(after.position), where + ": left the unit ball");
                if (after.committed) {
                    check(after.position == s.agents[i].position, where + ": committed agent moved");
                }
            }
            check(next.trace.q >= 0.0 && next.trace.q <= 1.0, where + ": Q outside [0, 1]");
            s = next.state;
        }
    }

    const std::vector<BeliefVector> consensus(50, BeliefVector{0.3, -0.2});
    check(polarization_q(consensus).q == 0.0, "Q(consensus) != 0");
    std::vector<BeliefVector> split;
    for (int i = 0; i < 25; ++i) split.push_back(BeliefVector{1.0});
    for (int i = 0; i < 25; ++i) split.push_back(BeliefVector{-1.0});
    check(polarization_q(split).q == 1.0, "Q(antipodal half split) != 1");
    return check.outcome(std::to_string(cases.size()) + " configurations x 100 steps");
}

// ---------------------------------------------------------------------------
// 2. Oracles

Outcome oracles() {
    Checker check;
    Rng rng(2);

    for (int trial = 0; trial < 1000; ++trial) {
        const std::uint32_t dims = 1 + trial % 3;
        const std::size_t n = 1 + rng.index(1000);
        DocumentPool pool(dims, 0);
        for (std::size_t j = 0; j < n; ++j) {
            BeliefVector y = sample_in_ball(dims, 1.0, rng);
            if (j > 0 && rng.uniform01() < 0.3) y = BeliefVector(pool.position(rng.index(j)));
            pool.add(y, 0, false);
        }
        Agent a;
        a.position = sample_in_ball(dims, 1.0, rng);
        a.visibility_radius = 2.0 * rng.uniform01();
        a.capacity = 1 + static_cast<std::uint32_t>(rng.index(20));

        std::vector<std::pair<double, std::uint32_t>> all;
        for (std::uint32_t j = 0; j < n; ++j) {
            const double d = distance(a.position, pool.position(j));
            if (d <= a.visibility_radius) all.emplace_back(d, j);
        }
        std::sort(all.begin(), all.end());
        std::vector<std::uint32_t> expected;
        for (std::size_t i = 0; i < std::min<std::size_t>(a.capacity, all.size()); ++i) {
            expected.push_back(all[i].second);
        }
        const std::string where = "pool " + std::to_string(trial);
        check(consume_biased(a, curate_for_agent(a, pool), pool).consumed_ids == expected,
              where + ": biased consumption");
        check(consume_nearest_in_radius(a, pool).consumed_ids == expected, where + ": fused scan");
        if (dims == 1) {
            check(LinePoolIndex(pool).consume_nearest_in_radius(a).consumed_ids == expected,
                  where + ": sorted index");
        }
    }

    int agree = 0;
    const int instances = 1000;
    for (int trial = 0; trial < instances; ++trial) {
        const std::size_t n = 2 + rng.index(11);
        std::vector<double> xs(n);
        std::vector<BeliefVector> pts;
        for (auto& x : xs) {
            x = 2.0 * rng.uniform01() - 1.0;
            pts.push_back(BeliefVector{x});
        }
        double best_sse = INFINITY, best_q = 0.0;
        for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
            double s[2] = {0, 0};
            int cnt[2] = {0, 0};
            for (std::size_t i = 0; i < n; ++i) s[(mask >> i) & 1] += xs[i], ++cnt[(mask >> i) & 1];
            const double m[2] = {s[0] / cnt[0], s[1] / cnt[1]};
            double sse = 0;
            for (std::size_t i = 0; i < n; ++i) sse += std::pow(xs[i] - m[(mask >> i) & 1], 2);
            if (sse < best_sse - 1e-12) best_sse = sse, best_q = std::abs(m[0] - m[1]) / 2;
        }
        if (std::abs(polarization_q(pts).q - best_q) < 1e-9) ++agree;
    }
    check(agree * 100 >= instances * 95,
          "Q agrees with exhaustive partition on only " + std::to_string(agree) + "/" +
              std::to_string(instances));

    for (int trial = 0; trial < 200; ++trial) {
        std::vector<SweepRow> rows;
        std::map<std::pair<std::uint32_t, double>, std::vector<double>> q, e;
        for (std::uint32_t n : {100u, 400u, 1600u}) {
            for (double r : {0.0, 0.1}) {
                const std::size_t reps = 1 + rng.index(15);
                for (std::uint32_t k = 0; k < reps; ++k) {
                    SweepRow row;
                    row.n_docs = n;
                    row.r = r;
                    row.replicate = k;
                    row.q_final = rng.uniform01();
                    row.mean_extremity_final = rng.uniform01();
                    rows.push_back(row);
                    q[{n, r}].push_back(row.q_final);
                    e[{n, r}].push_back(row.mean_extremity_final);
                }
            }
        }
        for (const auto& cell : aggregate(rows)) {
            const auto& qs = q[{cell.n_docs, cell.r}];
            const auto& es = e[{cell.n_docs, cell.r}];
            const double mq = std::accumulate(qs.begin(), qs.end(), 0.0) / qs.size();
            const double me = std::accumulate(es.begin(), es.end(), 0.0) / es.size();
            double ss = 0;
            for (double v : qs) ss += (v - mq) * (v - mq);
            const double sd = qs.size() > 1 ? std::sqrt(ss / (qs.size() - 1)) : 0.0;
            check(cell.n_replicates == qs.size() && std::abs(cell.mean_q - mq) < 1e-12 &&
                      std::abs(cell.stddev_q - sd) < 1e-12 && std::abs(cell.mean_extremity - me) < 1e-12,
                  "aggregate differs from two-pass statistics");
        }
    }
    return check.outcome("1000 pools, Q agreement " + std::to_string(agree) + "/" +
                         std::to_string(instances) + ", 200 aggregate sets");
}

// ---------------------------------------------------------------------------
// 3. Determinism (through the CLI)

int sim(const std::string& args) {
    const std::string cmd = "'" SIM_EXE "' " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Outcome determinism() {
    Checker check;
    const fs::path root = fs::temp_directory_path() / "bsim_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path cfg = root / "config.txt";
    std::ofstream(cfg) << "t_max = 300\n"
                          "consumer_kind = mixed(0.5)\n"
                          "n_values = 100, 400, 1600\n"
                          "r_values = 0, 0.1\n"
                          "replicates = 3\n"
                          "t_max = 200\n";
    // The duplicated key above is deliberate: it must be rejected.
    check(sim("run --config '" + cfg.string() + "' --out '" + (root / "rejected").string() + "'") == 1,
          "duplicate key accepted");
    std::ofstream(cfg) << "t_max = 300\n"
                          "consumer_kind = mixed(0.5)\n"
                          "n_values = 100, 400, 1600\n"
                          "r_values = 0, 0.1\n"
                          "replicates = 3\n";

    const auto run_dir = [&](const std::string& n) { return (root / n).string(); };
    check(sim("run --config '" + cfg.string() + "' --out '" + run_dir("run_a") + "'") == 0, "run a failed");
    check(sim("run --config '" + cfg.string() + "' --out '" + run_dir("run_b") + "'") == 0, "run b failed");
    check(!slurp(root / "run_a" / "trajectory.csv").empty() &&
              slurp(root / "run_a" / "trajectory.csv") == slurp(root / "run_b" / "trajectory.csv"),
          "trajectory.csv differs between identical runs");

    std::string reference;
    for (int threads : {1, 4, 8}) {
        const std::string dir = run_dir("sweep_" + std::to_string(threads));
        check(sim("sweep --config '" + cfg.string() + "' --out '" + dir + "' --threads " +
                  std::to_string(threads)) == 0,
              "sweep with " + std::to_string(threads) + " threads failed");
        const std::string csv = slurp(fs::path(dir) / "sweep.csv");
        if (reference.empty()) {
            reference = csv;
            check(!csv.empty(), "sweep.csv empty");
        } else {
            check(csv == reference, "sweep.csv differs at --threads " + std::to_string(threads));
        }
    }
    const std::string repeat = run_dir("sweep_repeat");
    check(sim("sweep --config '" + cfg.string() + "' --out '" + repeat + "' --threads 4") == 0,
          "repeat sweep failed");
    check(slurp(fs::path(repeat) / "sweep.csv") == reference, "sweep.csv differs on repeat");
    fs::remove_all(root);
    return check.outcome("repeat run, sweep at --threads 1/4/8");
}

// ---------------------------------------------------------------------------
// Statistics helpers

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = (i + j) / 2.0 + 1;
        i = j + 1;
    }
    return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson(average_ranks(x), average_ranks(y));
}

std::vector<CellAggregate> sweep_cells(const SweepSpec& spec) {
    return aggregate(run_sweep(spec, workers()));
}

// ---------------------------------------------------------------------------
// 4. Overload trend

Outcome overload_trend() {
    SweepSpec spec;
    spec.n_values = {100, 400, 1600, 6400};
    spec.r_values = {0.05};
    spec.replicates = 10;
    const auto t0 = Clock::now();
    const auto cells = sweep_cells(spec);
    std::vector<double> n, q;
    std::string table;
    for (const auto& c : cells) {
        n.push_back(c.n_docs);
        q.push_back(c.mean_q);
        table += " N=" + std::to_string(c.n_docs) + ":" + fmt(c.mean_q);
    }
    const double rho = spearman(n, q);
    const double secs = seconds_since(t0);
    return {rho >= 0.8 && secs < 300,
            "spearman " + fmt(rho) + " (need >= 0.8);" + table + "; " + fmt(secs, 3) + " s"};
}

// ---------------------------------------------------------------------------
// 5. Misinformation trend

Outcome misinformation_trend() {
    SweepSpec spec;
    spec.n_values = {1600};
    spec.r_values = {0.0, 0.05, 0.1, 0.2};
    spec.replicates = 10;
    const auto t0 = Clock::now();
    const auto cells = sweep_cells(spec);
    std::string table;
    for (const auto& c : cells) table += " r=" + fmt(c.r) + ":" + fmt(c.mean_q);
    const CellAggregate& lo = cells.front();
    const CellAggregate& hi = cells.back();
    const double pooled = std::sqrt((lo.stddev_q * lo.stddev_q + hi.stddev_q * hi.stddev_q) / 2);
    const double diff = hi.mean_q - lo.mean_q;
    const double secs = seconds_since(t0);
    return {diff > 0 && diff >= pooled && secs < 300,
            "mean_Q(0.2) - mean_Q(0) = " + fmt(diff) + ", pooled sd " + fmt(pooled) + ";" + table +
                "; " + fmt(secs, 3) + " s"};
}

// ---------------------------------------------------------------------------
// 6. Consumer-bias contrast

Outcome bias_contrast() {
    SweepSpec spec;
    spec.n_values = {1600};
    spec.r_values = {0.1};
    spec.replicates = 10;
    spec.base.consumer_kind = ConsumerPolicy::Biased;
    const auto biased = run_sweep(spec, workers());
    spec.base.consumer_kind = ConsumerPolicy::Uniform;
    const auto uniform = run_sweep(spec, workers());

    auto stats = [](const std::vector<SweepRow>& rows) {
        const auto c = aggregate(rows).front();
        return std::pair{c.mean_q, c.stddev_q * c.stddev_q};
    };
    const auto [mb, vb] = stats(biased);
    const auto [mu, vu] = stats(uniform);
    const double n = 10;
    const double se2 = vb / n + vu / n;
    double p = 1.0;
    double t = 0.0;
    if (se2 > 0) {
        t = (mb - mu) / std::sqrt(se2);
        const double dof = se2 * se2 / ((vb / n) * (vb / n) / (n - 1) + (vu / n) * (vu / n) / (n - 1));
        p = boost::math::cdf(boost::math::complement(boost::math::students_t(dof), t));
    } else if (mb > mu) {
        p = 0.0;
    }
    return {mb > mu && p < 0.05, "mean_Q biased " + fmt(mb) + " vs uniform " + fmt(mu) + ", Welch t " +
                                     fmt(t) + ", one-sided p " + fmt(p, 3) + " (need < 0.05)"};
}

// ---------------------------------------------------------------------------
// 7. Coverage law

Outcome coverage_law() {
    Checker check;
    for (std::uint32_t n_docs : {100u, 400u, 1600u, 6400u}) {
        for (double radius : {2.0, 3.0}) {
            SimConfig c;
            c.n_docs = n_docs;
            c.visibility_radius = radius;
            c.t_max = 100;
            c.conv_tol = kNoConvergence;
            const double expected = static_cast<double>(c.capacity_k) / n_docs;
            const auto result = run(init_population(c), c);
            for (const auto& tr : result.traces) {
                check(tr.mean_coverage == expected,
                      "N=" + std::to_string(n_docs) + " t=" + std::to_string(tr.t) + ": coverage " +
                          fmt(tr.mean_coverage, 17) + " != k/N " + fmt(expected, 17));
            }
        }
    }
    return check.outcome("N in {100, 400, 1600, 6400}, radius in {2, 3}, every step exact");
}

// ---------------------------------------------------------------------------
// 8. Performance

Outcome performance() {
    SimConfig c;
    c.n_agents = 200;
    c.n_docs = 6400;
    c.dims = 2;
    c.t_max = 1000;
    c.conv_tol = kNoConvergence;
    const auto t0 = Clock::now();
    const auto result = run(init_population(c), c);
    const double secs = seconds_since(t0);
    return {result.steps_run == 1000 && secs < 10.0,
            fmt(secs, 3) + " s for " + std::to_string(result.steps_run) + " steps (need < 10 s)"};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> fn;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {1, "invariant suite", invariants},
        {2, "oracle suite", oracles},
        {3, "determinism", determinism},
        {4, "overload trend", overload_trend},
        {5, "misinformation trend", misinformation_trend},
        {6, "consumer-bias contrast", bias_contrast},
        {7, "coverage law", coverage_law},
        {8, "single-run performance", performance},
    };

    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 2;
        }
    }
    if (only < 0 || only > static_cast<int>(all.size())) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 2;
    }

    bool ok = true;
    for (const auto& c : all) {
        if (only != 0 && c.id != only) continue;
        const auto t0 = Clock::now();
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %d %-24s %s  %s [%.1f s]\n", c.id, c.name, out.pass ? "PASS" : "FAIL",
                    out.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
        ok = ok && out.pass;
    }
    return ok ? 0 : 1;
}
