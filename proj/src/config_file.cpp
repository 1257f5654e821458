#include "beliefsim/config_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace beliefsim {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_unsigned(std::string_view text, const std::string& key) {
    static_assert(std::is_unsigned_v<T>);
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty()) throw ConfigError("missing value", key);
    if (ec == std::errc::result_out_of_range) {
        throw ConfigError("'" + std::string(text) + "' exceeds " +
                              std::to_string(std::numeric_limits<T>::max()),
                          key);
    }
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("'" + std::string(text) + "' is not a non-negative integer", key);
    }
    return value;
}

double parse_real(std::string_view text, const std::string& key) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty()) throw ConfigError("missing value", key);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw ConfigError("'" + std::string(text) + "' is not a finite real number", key);
    }
    return value;
}

std::vector<std::string_view> split_list(std::string_view text) {
    std::vector<std::string_view> items;
    if (trim(text).empty()) return items;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        items.push_back(trim(text.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return items;
}

using Setter = std::function<void(SweepSpec&, std::string_view, const std::string&)>;
using Getter = std::function<std::string(const SweepSpec&)>;

struct KeyDef {
    std::string name;
    Setter set;
    Getter get;
};

template <typename T>
KeyDef unsigned_key(std::string name, T SimConfig::*field) {
    return {name,
            [field](SweepSpec& s, std::string_view v, const std::string& k) {
                s.base.*field = parse_unsigned<T>(v, k);
            },
            [field](const SweepSpec& s) { return std::to_string(s.base.*field); }};
}

KeyDef real_key(std::string name, double SimConfig::*field) {
    return {name,
            [field](SweepSpec& s, std::string_view v, const std::string& k) {
                s.base.*field = parse_real(v, k);
            },
            [field](const SweepSpec& s) { return format_double(s.base.*field); }};
}

const std::vector<KeyDef>& key_table() {
    static const std::vector<KeyDef> table = [] {
        std::vector<KeyDef> t;
        t.push_back(unsigned_key("n_agents", &SimConfig::n_agents));
        t.push_back(unsigned_key("n_committed", &SimConfig::n_committed));
        t.push_back(unsigned_key("dims", &SimConfig::dims));
        t.push_back(unsigned_key("n_docs", &SimConfig::n_docs));
        t.push_back(real_key("misinfo_ratio", &SimConfig::misinfo_ratio));
        t.push_back(real_key("alpha", &SimConfig::alpha));
        t.push_back(unsigned_key("capacity_k", &SimConfig::capacity_k));
        t.push_back(real_key("visibility_radius", &SimConfig::visibility_radius));
        t.push_back(
            {"consumer_kind",
             [](SweepSpec& s, std::string_view v, const std::string& k) {
                 if (v == "biased") {
                     s.base.consumer_kind = ConsumerPolicy::Biased;
                     s.base.p_biased = SimConfig{}.p_biased;
                 } else if (v == "uniform") {
                     s.base.consumer_kind = ConsumerPolicy::Uniform;
                     s.base.p_biased = SimConfig{}.p_biased;
                 } else if (v.starts_with("mixed(") && v.ends_with(")")) {
                     s.base.consumer_kind = ConsumerPolicy::Mixed;
                     s.base.p_biased = parse_real(trim(v.substr(6, v.size() - 7)), k);
                 } else {
                     throw ConfigError("'" + std::string(v) +
                                           "' is not one of biased, uniform, mixed(<p_biased>)",
                                       k);
                 }
             },
             [](const SweepSpec& s) -> std::string {
                 switch (s.base.consumer_kind) {
                     case ConsumerPolicy::Biased: return "biased";
                     case ConsumerPolicy::Uniform: return "uniform";
                     case ConsumerPolicy::Mixed: return "mixed(" + format_double(s.base.p_biased) + ")";
                 }
                 return {};
             }});
        t.push_back({"production_mode",
                     [](SweepSpec& s, std::string_view v, const std::string& k) {
                         if (v == "sampled") {
                             s.base.production_mode = ProductionMode::Sampled;
                         } else if (v == "mirror") {
                             s.base.production_mode = ProductionMode::Mirror;
                         } else {
                             throw ConfigError("'" + std::string(v) + "' is not one of sampled, mirror", k);
                         }
                     },
                     [](const SweepSpec& s) -> std::string {
                         return s.base.production_mode == ProductionMode::Mirror ? "mirror" : "sampled";
                     }});
        t.push_back(real_key("committed_magnitude", &SimConfig::committed_magnitude));
        t.push_back(real_key("epsilon_influence", &SimConfig::epsilon_influence));
        t.push_back(real_key("init_spread", &SimConfig::init_spread));
        t.push_back(unsigned_key("t_max", &SimConfig::t_max));
        t.push_back({"conv_tol",
                     [](SweepSpec& s, std::string_view v, const std::string& k) {
                         s.base.conv_tol = v == "none" ? kNoConvergence : parse_real(v, k);
                     },
                     [](const SweepSpec& s) {
                         return std::isinf(s.base.conv_tol) ? std::string("none")
                                                            : format_double(s.base.conv_tol);
                     }});
        t.push_back(unsigned_key("conv_window", &SimConfig::conv_window));
        t.push_back(unsigned_key("snapshot_every", &SimConfig::snapshot_every));
        t.push_back(unsigned_key("seed", &SimConfig::seed));
        t.push_back({"n_values",
                     [](SweepSpec& s, std::string_view v, const std::string& k) {
                         s.n_values.clear();
                         for (auto item : split_list(v)) s.n_values.push_back(parse_unsigned<std::uint32_t>(item, k));
                     },
                     [](const SweepSpec& s) {
                         std::string out;
                         for (std::size_t i = 0; i < s.n_values.size(); ++i) {
                             out += (i ? ", " : "") + std::to_string(s.n_values[i]);
                         }
                         return out;
                     }});
        t.push_back({"r_values",
                     [](SweepSpec& s, std::string_view v, const std::string& k) {
                         s.r_values.clear();
                         for (auto item : split_list(v)) s.r_values.push_back(parse_real(item, k));
                     },
                     [](const SweepSpec& s) {
                         std::string out;
                         for (std::size_t i = 0; i < s.r_values.size(); ++i) {
                             out += (i ? ", " : "") + format_double(s.r_values[i]);
                         }
                         return out;
                     }});
        t.push_back({"replicates",
                     [](SweepSpec& s, std::string_view v, const std::string& k) {
                         s.replicates = parse_unsigned<std::uint32_t>(v, k);
                     },
                     [](const SweepSpec& s) { return std::to_string(s.replicates); }});
        t.push_back({"base_seed",
                     [](SweepSpec& s, std::string_view v, const std::string& k) {
                         s.base_seed = parse_unsigned<std::uint64_t>(v, k);
                     },
                     [](const SweepSpec& s) { return std::to_string(s.base_seed); }});
        return t;
    }();
    return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& k : key_table()) n.push_back(k.name);
        return n;
    }();
    return names;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

SweepSpec parse_config(std::string_view text) {
    SweepSpec spec;
    std::map<std::string, int, std::less<>> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", {}, line_no);
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));

        const auto& table = key_table();
        const auto def = std::find_if(table.begin(), table.end(), [&](const KeyDef& d) { return d.name == key; });
        if (def == table.end()) throw ConfigError("unknown key '" + key + "'", key, line_no);
        if (const auto prev = seen.find(key); prev != seen.end()) {
            throw ConfigError("duplicate key '" + key + "' (first set on line " +
                                  std::to_string(prev->second) + ")",
                              key, line_no);
        }
        seen.emplace(key, line_no);
        try {
            def->set(spec, value, key);
        } catch (const ConfigError& e) {
            throw e.at_line(line_no);
        }
    }

    try {
        validate(spec.base);
        validate_grid(spec);
    } catch (const ConfigError& e) {
        const auto where = seen.find(e.key());
        throw e.at_line(where == seen.end() ? 0 : where->second);
    }
    return spec;
}

SweepSpec load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw ConfigError("error while reading config file '" + path.string() + "'");
    return parse_config(buf.str());
}

std::string render_config(const SweepSpec& spec) {
    std::string out;
    for (const auto& def : key_table()) {
        out += def.name;
        out += " = ";
        out += def.get(spec);
        out += '\n';
    }
    return out;
}

}  // namespace beliefsim
