#include "t2fnn/config.hpp"

#include "t2fnn/csv.hpp"
#include "t2fnn/errors.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace t2fnn {
namespace {

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

double to_real(const std::string& v, const std::string& key, std::size_t line) {
    try {
        return parse_double(v);
    } catch (const std::invalid_argument&) {
        throw ParseError("expected a number, got '" + v + "'", line, key);
    }
}

std::uint64_t to_uint(const std::string& v, const std::string& key, std::size_t line) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || v.empty())
        throw ParseError("expected a nonnegative integer, got '" + v + "'", line, key);
    return out;
}

bool to_bool(const std::string& v, const std::string& key, std::size_t line) {
    if (v == "true" || v == "1")
        return true;
    if (v == "false" || v == "0")
        return false;
    throw ParseError("expected true or false, got '" + v + "'", line, key);
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

struct Field {
    const char* key;
    std::function<void(ExperimentConfig&, const std::string&, std::size_t)> set;
    // Empty result: key omitted on output.
    std::function<std::string(const ExperimentConfig&)> get;
};

#define T2FNN_REAL(KEY, MEMBER)                                                                                   \
    Field {                                                                                                       \
        KEY, [](ExperimentConfig& c, const std::string& v, std::size_t l) { c.MEMBER = to_real(v, KEY, l); },    \
            [](const ExperimentConfig& c) { return format_double(c.MEMBER); }                                     \
    }
#define T2FNN_COUNT(KEY, MEMBER, TYPE)                                                                            \
    Field {                                                                                                       \
        KEY,                                                                                                      \
            [](ExperimentConfig& c, const std::string& v, std::size_t l) {                                        \
                c.MEMBER = static_cast<TYPE>(to_uint(v, KEY, l));                                                 \
            },                                                                                                    \
            [](const ExperimentConfig& c) { return std::to_string(c.MEMBER); }                                    \
    }
#define T2FNN_BOOL(KEY, MEMBER)                                                                                   \
    Field {                                                                                                       \
        KEY, [](ExperimentConfig& c, const std::string& v, std::size_t l) { c.MEMBER = to_bool(v, KEY, l); },    \
            [](const ExperimentConfig& c) { return bool_text(c.MEMBER); }                                         \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> table{
        Field{"plant",
              [](ExperimentConfig& c, const std::string& v, std::size_t l) {
                  try {
                      c.plant = parse_plant_kind(v);
                  } catch (const ValidationError& e) {
                      throw ParseError(e.what(), l, "plant");
                  }
              },
              [](const ExperimentConfig& c) { return std::string(plant_name(c.plant)); }},
        Field{"learner",
              [](ExperimentConfig& c, const std::string& v, std::size_t l) {
                  try {
                      c.learner = parse_learner_kind(v);
                  } catch (const ValidationError& e) {
                      throw ParseError(e.what(), l, "learner");
                  }
              },
              [](const ExperimentConfig& c) { return std::string(learner_name(c.learner)); }},
        T2FNN_COUNT("epochs", epochs, std::size_t),
        Field{"samples_per_epoch",
              [](ExperimentConfig& c, const std::string& v, std::size_t l) {
                  c.samples_per_epoch = static_cast<std::size_t>(to_uint(v, "samples_per_epoch", l));
              },
              [](const ExperimentConfig& c) {
                  return c.samples_per_epoch ? std::to_string(*c.samples_per_epoch) : std::string{};
              }},
        T2FNN_COUNT("runs", runs, std::size_t),
        T2FNN_COUNT("seed", seed, std::uint64_t),
        T2FNN_REAL("train_fraction", train_fraction),
        T2FNN_REAL("noise_std", noise_std),
        T2FNN_COUNT("mfs_per_input", mfs_per_input, std::size_t),
        T2FNN_REAL("sample_period", sample_period),
        T2FNN_COUNT("period", period, std::int64_t),
        T2FNN_REAL("input_period", input_period),
        T2FNN_REAL("test_phase", test_phase),
        Field{"constant_input",
              [](ExperimentConfig& c, const std::string& v, std::size_t l) {
                  c.constant_input = to_real(v, "constant_input", l);
              },
              [](const ExperimentConfig& c) {
                  return c.constant_input ? format_double(*c.constant_input) : std::string{};
              }},
        T2FNN_BOOL("allow_failed_runs", allow_failed_runs),
        T2FNN_COUNT("threads", threads, std::size_t),
        T2FNN_BOOL("trace_all_epochs", trace_all_epochs),
        T2FNN_REAL("init.center_jitter", init.center_jitter),
        T2FNN_REAL("init.sigma_scale_min", init.sigma_scale_min),
        T2FNN_REAL("init.sigma_scale_max", init.sigma_scale_max),
        T2FNN_REAL("init.sigma_ratio_min", init.sigma_ratio_min),
        T2FNN_REAL("init.sigma_ratio_max", init.sigma_ratio_max),
        T2FNN_REAL("init.consequent", init.consequent),
        T2FNN_REAL("init.q", init.q),
        T2FNN_REAL("smc.gamma", smc.gamma),
        T2FNN_REAL("smc.nu", smc.nu),
        T2FNN_REAL("smc.delta_s", smc.delta_s),
        T2FNN_REAL("smc.rho_ant", smc.rho_ant),
        T2FNN_REAL("smc.denom_guard", smc.denom_guard),
        T2FNN_REAL("smc.dt", smc.dt),
        T2FNN_REAL("smc.sigma_floor", smc.sigma_floor),
        T2FNN_REAL("smc.alpha_init", smc.alpha_init),
        T2FNN_REAL("gd.eta", gd.eta),
        T2FNN_REAL("gd.eta_ant", gd.eta_ant),
        T2FNN_REAL("gd.sigma_floor", gd.sigma_floor),
    };
    return table;
}

#undef T2FNN_REAL
#undef T2FNN_COUNT
#undef T2FNN_BOOL

} // namespace

KeyValueDocument parse_key_values(std::string_view text) {
    KeyValueDocument doc;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("expected 'key = value'", line_no, std::string(line));
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty())
            throw ParseError("missing key", line_no, "");
        if (value.empty())
            throw ParseError("missing value", line_no, key);
        if (!doc.entries.emplace(key, KeyValueDocument::Entry{value, line_no}).second)
            throw ParseError("duplicate key", line_no, key);
    }
    return doc;
}

void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& value,
                        std::size_t line) {
    for (const auto& f : fields())
        if (key == f.key) {
            f.set(config, value, line);
            return;
        }
    throw ParseError("unknown key", line, key);
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig config;
    const auto doc = parse_key_values(text);
    for (const auto& [key, entry] : doc.entries)
        apply_config_value(config, key, entry.value, entry.line);
    config.validate();
    return config;
}

std::string serialize_config(const ExperimentConfig& config) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    for (const auto& f : fields()) {
        const std::string v = f.get(config);
        if (!v.empty())
            out << f.key << " = " << v << '\n';
    }
    return out.str();
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

// Checkpoint layout:
//   network.mfs_per_input = 3,3,3
//   mf.<i>.<k> = center sigma_lower sigma_upper
//   rule.<r> = a_0 ... a_{I-1} b
//   q, alpha, alpha_ant
std::string serialize_network(const NetworkState& net) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << "network.mfs_per_input = ";
    for (std::size_t i = 0; i < net.inputs(); ++i)
        out << (i ? "," : "") << net.grid.mfs(i);
    out << '\n';
    for (std::size_t i = 0; i < net.inputs(); ++i)
        for (std::size_t k = 0; k < net.grid.mfs(i); ++k) {
            const auto& mf = net.mf(i, k);
            out << "mf." << i << '.' << k << " = " << format_double(mf.center) << ' ' << format_double(mf.sigma_lower)
                << ' ' << format_double(mf.sigma_upper) << '\n';
        }
    for (std::size_t r = 0; r < net.rules(); ++r) {
        out << "rule." << r << " =";
        for (std::size_t i = 0; i < net.inputs(); ++i)
            out << ' ' << format_double(net.coeff(r, i));
        out << ' ' << format_double(net.b[r]) << '\n';
    }
    out << "q = " << format_double(net.q) << '\n';
    out << "alpha = " << format_double(net.alpha) << '\n';
    out << "alpha_ant = " << format_double(net.alpha_ant) << '\n';
    return out.str();
}

NetworkState parse_network(std::string_view text) {
    const auto doc = parse_key_values(text);
    auto need = [&](const std::string& key) -> const KeyValueDocument::Entry& {
        const auto it = doc.entries.find(key);
        if (it == doc.entries.end())
            throw ParseError("missing key", 0, key);
        return it->second;
    };
    auto reals = [&](const std::string& key, std::size_t count) {
        const auto& e = need(key);
        std::vector<double> out;
        std::istringstream in(e.value);
        std::string tok;
        while (in >> tok)
            out.push_back(to_real(tok, key, e.line));
        if (out.size() != count)
            throw ParseError("expected " + std::to_string(count) + " numbers", e.line, key);
        return out;
    };

    std::vector<std::size_t> shape;
    {
        const auto& e = need("network.mfs_per_input");
        std::string_view rest = e.value;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const std::string tok(trim(rest.substr(0, comma)));
            shape.push_back(static_cast<std::size_t>(to_uint(tok, "network.mfs_per_input", e.line)));
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
    }
    NetworkState net(shape);
    std::size_t used = 1;
    for (std::size_t i = 0; i < net.inputs(); ++i)
        for (std::size_t k = 0; k < net.grid.mfs(i); ++k) {
            const auto v = reals("mf." + std::to_string(i) + "." + std::to_string(k), 3);
            net.mf(i, k) = {v[0], v[1], v[2]};
            ++used;
        }
    for (std::size_t r = 0; r < net.rules(); ++r) {
        const auto v = reals("rule." + std::to_string(r), net.inputs() + 1);
        for (std::size_t i = 0; i < net.inputs(); ++i)
            net.coeff(r, i) = v[i];
        net.b[r] = v.back();
        ++used;
    }
    net.q = reals("q", 1)[0];
    net.alpha = reals("alpha", 1)[0];
    net.alpha_ant = reals("alpha_ant", 1)[0];
    used += 3;
    if (used != doc.entries.size())
        for (const auto& [key, entry] : doc.entries)
            if (key != "network.mfs_per_input" && key != "q" && key != "alpha" && key != "alpha_ant" &&
                key.rfind("mf.", 0) != 0 && key.rfind("rule.", 0) != 0)
                throw ParseError("unknown key", entry.line, key);
    if (used != doc.entries.size())
        throw ParseError("entries outside the declared grid", 0, "");
    net.validate();
    return net;
}

} // namespace t2fnn
