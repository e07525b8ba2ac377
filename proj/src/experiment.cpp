#include "stalker/experiment.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "stalker/opinion_game.hpp"
#include "stalker/phi_chain.hpp"
#include "stalker/rng.hpp"
#include "stalker/stalker_core.hpp"
#include "stalker/stats.hpp"
#include "stalker/util.hpp"

namespace stalker {

namespace {

const std::pair<const char*, ExperimentKind> kKinds[] = {
    {"stalker", ExperimentKind::stalker},
    {"convergence", ExperimentKind::convergence},
    {"hitting", ExperimentKind::hitting},
    {"generator", ExperimentKind::generator},
    {"opinion_game", ExperimentKind::opinion_game},
    {"stats", ExperimentKind::stats},
};

// ---- value parsing ------------------------------------------------------

bool to_real(const std::string& text, double& out) {
    const char* s = text.c_str();
    char* end = nullptr;
    errno = 0;
    out = std::strtod(s, &end);
    return end != s && *end == '\0' && errno == 0 && std::isfinite(out);
}

bool to_int(const std::string& text, std::int64_t& out) {
    const char* s = text.c_str();
    char* end = nullptr;
    errno = 0;
    out = std::strtoll(s, &end, 10);
    return end != s && *end == '\0' && errno == 0;
}

bool to_u64(const std::string& text, std::uint64_t& out) {
    if (text.empty() || text[0] == '-') return false;
    const char* s = text.c_str();
    char* end = nullptr;
    errno = 0;
    out = std::strtoull(s, &end, 10);
    return end != s && *end == '\0' && errno == 0;
}

// A checker inspects a value and returns a complaint, or "" if it is fine.
using Checker = std::function<std::string(const std::string&)>;

Checker real_any() {
    return [](const std::string& v) -> std::string {
        double d;
        return to_real(v, d) ? "" : "must be a real number";
    };
}

Checker real_gt(double lo) {
    return [lo](const std::string& v) -> std::string {
        double d;
        if (!to_real(v, d)) return "must be a real number";
        if (!(d > lo)) return "must be > " + format_g17(lo);
        return "";
    };
}

Checker real_ge(double lo) {
    return [lo](const std::string& v) -> std::string {
        double d;
        if (!to_real(v, d)) return "must be a real number";
        if (!(d >= lo)) return "must be >= " + format_g17(lo);
        return "";
    };
}

Checker int_ge(std::int64_t lo) {
    return [lo](const std::string& v) -> std::string {
        std::int64_t n;
        if (!to_int(v, n)) return "must be an integer";
        if (n < lo) return "must be >= " + format_int(lo);
        return "";
    };
}

Checker u64_any() {
    return [](const std::string& v) -> std::string {
        std::uint64_t n;
        return to_u64(v, n) ? "" : "must be a nonnegative 64-bit integer";
    };
}

Checker choice(std::vector<std::string> options) {
    return [options = std::move(options)](const std::string& v) -> std::string {
        for (const auto& o : options)
            if (v == o) return "";
        std::string msg = "must be one of {";
        for (std::size_t i = 0; i < options.size(); ++i)
            msg += (i ? ", " : "") + options[i];
        return msg + "}";
    };
}

Checker step_list() {
    return [](const std::string& v) -> std::string {
        if (v.empty()) return "";
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            std::int64_t n;
            if (!to_int(item, n) || n < 0)
                return "must be a comma-separated list of nonnegative integers";
        }
        return "";
    };
}

Checker non_empty() {
    return [](const std::string& v) -> std::string {
        return v.empty() ? "must not be empty" : "";
    };
}

// ---- schemas ------------------------------------------------------------

struct KeyRule {
    std::string fallback;
    Checker check;
};

using Schema = std::map<std::string, KeyRule>;

void add_game_keys(Schema& s) {
    s["n_traders"] = {"2000", int_ge(2)};
    s["n_shares"] = {"1000", int_ge(1)};
    s["gamma"] = {"1.5", real_ge(0.0)};
    s["l"] = {"4", int_ge(1)};
    s["drift_magnitude"] = {"0.1", real_ge(0.0)};
    s["ext_mean"] = {"0.12", real_gt(0.0)};
    s["ext_rate_steps"] = {"2000", int_ge(1)};
    s["jump_away_min"] = {"5", int_ge(1)};
    s["jump_away_max"] = {"20", int_ge(1)};
    s["record_every"] = {"100", int_ge(1)};
    s["init_spread"] = {"400", int_ge(0)};
    s["init_gap"] = {"0", int_ge(0)};
    s["price_formula"] = {"mid", choice({"mid", "half_spread"})};
    s["drift_rule"] = {"sign", choice({"sign", "role"})};
    s["snapshot_at"] = {"", step_list()};
    s["horizon_updates"] = {"100000", int_ge(1)};
}

Schema schema_for(ExperimentKind kind) {
    Schema s;
    switch (kind) {
        case ExperimentKind::stalker:
            s["gamma"] = {"1", real_gt(0.0)};
            s["eps"] = {"0.05", real_gt(0.0)};
            s["t_star"] = {"1", real_gt(0.0)};
            s["dt"] = {"0", real_ge(0.0)};
            s["b0"] = {"0", real_any()};
            s["x0"] = {"0", real_any()};
            s["y0"] = {"0", real_any()};
            break;
        case ExperimentKind::convergence:
            s["gamma"] = {"1", real_gt(0.0)};
            s["eps"] = {"0.02", real_gt(0.0)};
            s["eps_prime"] = {"0.01", real_gt(0.0)};
            s["t_star"] = {"1", real_gt(0.0)};
            s["replicas"] = {"100", int_ge(1)};
            break;
        case ExperimentKind::hitting:
            s["k"] = {"1", int_ge(0)};
            s["gamma"] = {"0.5", real_gt(0.0)};
            s["eps"] = {"0.05", real_gt(0.0)};
            s["replicas"] = {"2000", int_ge(1)};
            s["step_budget"] = {"10000000", int_ge(1)};
            // negative start means "axis start (0, 4^k)", resolved below
            s["start_x"] = {"-1", real_any()};
            s["start_y"] = {"-1", real_any()};
            break;
        case ExperimentKind::generator:
            s["x"] = {"3", real_ge(0.0)};
            s["y"] = {"3", real_ge(0.0)};
            s["gamma"] = {"2", real_gt(0.0)};
            s["eps"] = {"0.01", real_gt(0.0)};
            s["method"] = {"quadrature", choice({"quadrature", "monte_carlo"})};
            s["samples"] = {"100000", int_ge(1)};
            break;
        case ExperimentKind::opinion_game:
            add_game_keys(s);
            break;
        case ExperimentKind::stats:
            add_game_keys(s);
            s["source"] = {"opinion_game", choice({"opinion_game", "phi_chain"})};
            s["window"] = {"100", int_ge(1)};
            s["max_lag"] = {"150", int_ge(1)};
            // a default game run long enough to fill max_lag windows
            s["horizon_updates"] = {"2000000", int_ge(1)};
            s["eps"] = {"0.1", real_gt(0.0)};
            s["steps"] = {"4000", int_ge(2)};
            s["start_x"] = {"0", real_ge(0.0)};
            s["start_y"] = {"0", real_ge(0.0)};
            s["radius"] = {"1", real_gt(0.0)};
            s["replicas"] = {"1", int_ge(1)};
            break;
    }
    return s;
}

[[noreturn]] void fail(const std::vector<std::string>& problems) {
    std::string msg = "config error";
    for (const auto& p : problems) msg += "\n  " + p;
    throw std::invalid_argument(msg);
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

GameConfig game_config_from(const ExperimentConfig& c) {
    GameConfig g;
    g.n_traders = c.integer("n_traders");
    g.n_shares = c.integer("n_shares");
    g.gamma = c.real("gamma");
    g.l = c.integer("l");
    g.drift_magnitude = c.real("drift_magnitude");
    g.ext_mean = c.real("ext_mean");
    g.ext_rate_steps = c.integer("ext_rate_steps");
    g.jump_away_min = c.integer("jump_away_min");
    g.jump_away_max = c.integer("jump_away_max");
    g.record_every = c.integer("record_every");
    g.init_spread = c.integer("init_spread");
    g.init_gap = c.integer("init_gap");
    g.price_formula = c.str("price_formula") == "mid" ? PriceFormula::mid
                                                      : PriceFormula::half_spread;
    g.drift_rule = c.str("drift_rule") == "sign" ? DriftRule::sign : DriftRule::role;
    g.snapshot_at = c.int_list("snapshot_at");
    return g;
}

// Post-parse adjustments: derived defaults and cross-key constraints.  Runs
// after every individual value has been validated.
void finalize(ExperimentConfig& c, std::vector<std::string>& problems) {
    switch (c.experiment) {
        case ExperimentKind::stalker: {
            if (c.real("dt") == 0.0) {
                double eps = c.real("eps");
                c.params["dt"] = format_g17(eps * eps / 100.0);
            }
            if (!(c.real("x0") <= c.real("b0") && c.real("b0") <= c.real("y0")))
                problems.push_back("x0/b0/y0: need x0 <= b0 <= y0");
            break;
        }
        case ExperimentKind::convergence:
            if (!(c.real("eps_prime") < c.real("eps")))
                problems.push_back("eps_prime: must be smaller than eps");
            break;
        case ExperimentKind::hitting: {
            double mid = std::pow(4.0, static_cast<double>(c.integer("k")));
            if (c.real("start_x") < 0.0 || c.real("start_y") < 0.0) {
                c.params["start_x"] = format_g17(0.0);
                c.params["start_y"] = format_g17(mid);
            } else if (std::abs(c.real("start_x") + c.real("start_y") - mid) >
                       1e-9 * mid) {
                problems.push_back(
                    "start_x/start_y: must sum to 4^k (the middle level set)");
            }
            break;
        }
        case ExperimentKind::generator:
            break;
        case ExperimentKind::opinion_game:
        case ExperimentKind::stats:
            try {
                game_config_from(c).validate();
            } catch (const std::invalid_argument& e) {
                problems.push_back(e.what());
            }
            break;
    }
}

// ---- CSV plumbing -------------------------------------------------------

class CsvFile {
public:
    CsvFile(std::string path, const std::string& header) : path_(std::move(path)) {
        body_ = header;
        body_ += '\n';
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) body_ += ',';
            body_ += cells[i];
        }
        body_ += '\n';
    }

    const std::string& path() const { return path_; }

    void save() const {
        std::ofstream out(path_, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + path_ + " for writing");
        out.write(body_.data(), static_cast<std::streamsize>(body_.size()));
        if (!out) throw std::runtime_error("write failed on " + path_);
    }

private:
    std::string path_;
    std::string body_;
};

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

// ---- runners ------------------------------------------------------------

std::vector<std::string> run_stalker(const ExperimentConfig& c) {
    double gamma = c.real("gamma"), eps = c.real("eps"), t_star = c.real("t_star");
    double dt = c.real("dt"), b0 = c.real("b0");
    RngStream rng(c.seed, 0);
    FinePath path = gen_fine_path(t_star, dt, rng);
    if (b0 != 0.0)
        for (auto& v : path.values) v += b0;
    Skeleton sk = extract_skeleton(path, eps);
    DriftParams params{gamma, 0.0};
    StalkerTrajectory lower = evolve(sk, params, false, c.real("x0"));
    StalkerTrajectory upper = evolve(sk, params, true, c.real("y0"));

    CsvFile csv(join_path(c.output_dir, "stalker.csv"), "jump_time,B_level,X,Y");
    for (std::size_t i = 0; i < sk.levels.size(); ++i)
        csv.row({format_g17(sk.jump_times[i]), format_g17(sk.levels[i]),
                 format_g17(lower.x_at_jump_minus[i]),
                 format_g17(upper.x_at_jump_minus[i])});
    csv.save();
    return {csv.path()};
}

std::vector<std::string> run_convergence(const ExperimentConfig& c) {
    RngStream rng(c.seed, 0);
    auto reports = convergence_experiment(c.real("gamma"), c.real("eps"),
                                          c.real("eps_prime"), c.real("t_star"),
                                          static_cast<std::size_t>(c.integer("replicas")),
                                          rng, c.threads);
    CsvFile csv(join_path(c.output_dir, "convergence.csv"),
                "replica,jumps,sup_diff,bound,violated");
    for (std::size_t r = 0; r < reports.size(); ++r) {
        const auto& rep = reports[r];
        csv.row({format_int(static_cast<long long>(r)),
                 format_int(static_cast<long long>(rep.per_jump_gaps.size())),
                 format_g17(rep.sup_diff), format_g17(rep.bound),
                 rep.sup_diff > rep.bound ? "1" : "0"});
    }
    csv.save();
    return {csv.path()};
}

std::vector<std::string> run_hitting(const ExperimentConfig& c) {
    RngStream rng(c.seed, 0);
    PhiState start{c.real("start_x"), c.real("start_y")};
    HittingReport rep = hitting_experiment(
        start, static_cast<int>(c.integer("k")), c.real("gamma"), c.real("eps"),
        static_cast<std::size_t>(c.integer("replicas")),
        static_cast<std::uint64_t>(c.integer("step_budget")), rng, c.threads);

    CsvFile csv(join_path(c.output_dir, "hitting.csv"),
                "k,gamma,eps,replicas,estimate,ci_lo,ci_hi,censored");
    csv.row({format_int(rep.k), format_g17(rep.gamma), format_g17(rep.eps),
             format_int(static_cast<long long>(rep.replicas)),
             format_g17(rep.estimate), format_g17(rep.ci_lo), format_g17(rep.ci_hi),
             format_int(static_cast<long long>(rep.censored))});
    csv.save();
    return {csv.path()};
}

std::vector<std::string> run_generator(const ExperimentConfig& c) {
    PhiState state{c.real("x"), c.real("y")};
    double eps = c.real("eps"), gamma = c.real("gamma");
    GeneratorEstimate est;
    if (c.str("method") == "quadrature") {
        est = generator_gap(state, eps, gamma, GeneratorMethod::quadrature);
    } else {
        RngStream rng(c.seed, 0);
        est = generator_gap(state, eps, gamma, GeneratorMethod::monte_carlo,
                            static_cast<std::size_t>(c.integer("samples")), &rng);
    }
    CsvFile csv(join_path(c.output_dir, "generator.csv"),
                "x,y,gamma,eps,method,value,std_err,taylor");
    csv.row({format_g17(state.x), format_g17(state.y), format_g17(gamma),
             format_g17(eps), c.str("method"), format_g17(est.value),
             format_g17(est.std_err), taylor_condition(state, gamma) ? "1" : "0"});
    csv.save();
    return {csv.path()};
}

std::vector<std::string> save_game_outputs(const ExperimentConfig& c,
                                           const GameSeries& out) {
    std::vector<std::string> files;
    CsvFile series(join_path(c.output_dir, "series.csv"),
                   "step,price,ask,bid,gap,delta_ext");
    for (std::size_t i = 0; i < out.steps.size(); ++i)
        series.row({format_int(static_cast<long long>(out.steps[i])),
                    format_g17(out.price[i]), format_int(out.ask[i]),
                    format_int(out.bid[i]), format_int(out.gap[i]),
                    format_g17(out.delta_ext[i])});
    series.save();
    files.push_back(series.path());

    for (const auto& snap : out.snapshots) {
        CsvFile f(join_path(c.output_dir,
                            "snapshot_" + format_int(static_cast<long long>(snap.step)) +
                                ".csv"),
                  "trader_index,opinion,owns");
        for (std::size_t i = 0; i < snap.book.opinions.size(); ++i)
            f.row({format_int(static_cast<long long>(i)),
                   format_int(snap.book.opinions[i]),
                   snap.book.owns[i] ? "1" : "0"});
        f.save();
        files.push_back(f.path());
    }
    return files;
}

std::vector<std::string> run_opinion_game(const ExperimentConfig& c) {
    GameConfig gc = game_config_from(c);
    RngStream rng(c.seed, 0);
    GameSeries out = run_game(gc, static_cast<std::uint64_t>(c.integer("horizon_updates")), rng);
    return save_game_outputs(c, out);
}

std::vector<std::string> run_stats(const ExperimentConfig& c) {
    std::vector<std::string> files;
    if (c.str("source") == "opinion_game") {
        GameConfig gc = game_config_from(c);
        RngStream rng(c.seed, 0);
        GameSeries out =
            run_game(gc, static_cast<std::uint64_t>(c.integer("horizon_updates")), rng);
        SeriesRecord rets = returns(out.price_series());
        auto window = static_cast<std::size_t>(c.integer("window"));
        auto max_lag = static_cast<std::size_t>(c.integer("max_lag"));
        SeriesRecord acf = volatility_autocorr(rets, window, max_lag);

        CsvFile summary(join_path(c.output_dir, "summary.csv"),
                        "n_prices,n_returns,excess_kurtosis,window,n_windows");
        summary.row({format_int(static_cast<long long>(out.price.size())),
                     format_int(static_cast<long long>(rets.size())),
                     format_g17(excess_kurtosis(rets.values)),
                     format_int(static_cast<long long>(window)),
                     format_int(static_cast<long long>(rets.size() / window))});
        summary.save();
        files.push_back(summary.path());

        CsvFile acf_csv(join_path(c.output_dir, "acf.csv"), "lag,acf");
        for (std::size_t i = 0; i < acf.size(); ++i)
            acf_csv.row({format_int(static_cast<long long>(acf.times[i])),
                         format_g17(acf.values[i])});
        acf_csv.save();
        files.push_back(acf_csv.path());
    } else {
        auto replicas = static_cast<std::size_t>(c.integer("replicas"));
        auto steps = static_cast<std::size_t>(c.integer("steps"));
        PhiState start{c.real("start_x"), c.real("start_y")};
        double eps = c.real("eps"), gamma = c.real("gamma"), radius = c.real("radius");

        struct Row {
            RecurrenceReport diag;
            double horizon = 0.0;
            double terminal = 0.0;
        };
        std::vector<Row> rows(replicas);
        std::uint64_t seed = c.seed;
        parallel_for(replicas, c.threads, [&](std::size_t r) {
            RngStream local(seed, r);
            SeriesRecord series = run_phi_series(start, eps, gamma, steps, local);
            rows[r].diag = recurrence_diagnostics(series, radius);
            rows[r].horizon = series.times.back();
            rows[r].terminal = series.values.back();
        });

        CsvFile csv(join_path(c.output_dir, "recurrence.csv"),
                    "replica,radius,horizon,last_exit,visit_count,growth_exponent,"
                    "terminal");
        for (std::size_t r = 0; r < replicas; ++r)
            csv.row({format_int(static_cast<long long>(r)), format_g17(radius),
                     format_g17(rows[r].horizon), format_g17(rows[r].diag.last_exit),
                     format_int(static_cast<long long>(rows[r].diag.visit_count)),
                     format_g17(rows[r].diag.growth_exponent),
                     format_g17(rows[r].terminal)});
        csv.save();
        files.push_back(csv.path());
    }
    return files;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
    for (const auto& [name, k] : kKinds)
        if (k == kind) return name;
    return "?";
}

double ExperimentConfig::real(const std::string& key) const {
    double d;
    if (!to_real(str(key), d))
        throw std::logic_error("config key " + key + " is not a real");
    return d;
}

std::int64_t ExperimentConfig::integer(const std::string& key) const {
    std::int64_t n;
    if (!to_int(str(key), n))
        throw std::logic_error("config key " + key + " is not an integer");
    return n;
}

const std::string& ExperimentConfig::str(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end())
        throw std::logic_error("config key " + key + " is not part of this experiment");
    return it->second;
}

std::vector<std::int64_t> ExperimentConfig::int_list(const std::string& key) const {
    std::vector<std::int64_t> out;
    std::stringstream ss(str(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::int64_t n;
        if (to_int(item, n)) out.push_back(n);
    }
    return out;
}

KeyValues env_overrides(const std::vector<std::string>& environ_entries) {
    const std::string prefix = "STALKER_";
    KeyValues out;
    for (const auto& entry : environ_entries) {
        std::size_t eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string name = entry.substr(0, eq);
        if (name.rfind(prefix, 0) != 0) continue;
        std::string key = name.substr(prefix.size());
        std::transform(key.begin(), key.end(), key.begin(),
                       [](unsigned char ch) { return std::tolower(ch); });
        out.emplace_back(key, entry.substr(eq + 1));
    }
    return out;
}

ExperimentConfig parse_config(const std::string& text, const KeyValues& env,
                              const KeyValues& cli) {
    std::vector<std::string> problems;

    // gather raw pairs; later sources overwrite earlier ones
    std::map<std::string, std::string> raw;      // key -> value
    std::map<std::string, std::string> origin;   // key -> where it came from
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            problems.push_back("line " + format_int(lineno) + ": expected key=value");
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            problems.push_back("line " + format_int(lineno) + ": empty key");
            continue;
        }
        if (raw.count(key)) {
            problems.push_back("duplicate key: " + key);
            continue;
        }
        raw[key] = value;
        origin[key] = "line " + format_int(lineno);
    }
    for (const auto& [key, value] : env) {
        raw[key] = value;
        origin[key] = "environment";
    }
    for (const auto& [key, value] : cli) {
        raw[key] = value;
        origin[key] = "command line";
    }

    auto complain = [&](const std::string& key, const std::string& what) {
        problems.push_back(key + " (" + origin[key] + "): " + what);
    };

    // the experiment key selects the schema, so it goes first
    ExperimentConfig cfg;
    auto exp_it = raw.find("experiment");
    if (exp_it == raw.end()) {
        problems.push_back("missing required key: experiment");
        fail(problems);
    }
    bool known = false;
    for (const auto& [name, kind] : kKinds) {
        if (exp_it->second == name) {
            cfg.experiment = kind;
            known = true;
        }
    }
    if (!known) {
        complain("experiment",
                 "must be one of {stalker, convergence, hitting, generator, "
                 "opinion_game, stats}");
        fail(problems);
    }
    raw.erase(exp_it);

    // global keys shared by every experiment
    Schema schema = schema_for(cfg.experiment);
    schema["seed"] = {"0", u64_any()};
    schema["threads"] = {"1", int_ge(1)};
    schema["output_dir"] = {".", non_empty()};

    for (const auto& [key, value] : raw) {
        auto rule = schema.find(key);
        if (rule == schema.end()) {
            complain(key, "unknown key for experiment " +
                              std::string(to_string(cfg.experiment)));
            continue;
        }
        std::string what = rule->second.check(value);
        if (!what.empty()) complain(key, what + " (got \"" + value + "\")");
    }
    if (!problems.empty()) fail(problems);

    for (const auto& [key, rule] : schema)
        cfg.params[key] = raw.count(key) ? raw[key] : rule.fallback;

    cfg.seed = [&] {
        std::uint64_t s = 0;
        to_u64(cfg.params["seed"], s);
        return s;
    }();
    cfg.threads = static_cast<int>(cfg.integer("threads"));
    cfg.output_dir = cfg.params["output_dir"];
    cfg.params.erase("seed");
    cfg.params.erase("threads");
    cfg.params.erase("output_dir");

    finalize(cfg, problems);
    if (!problems.empty()) fail(problems);
    return cfg;
}

std::string manifest_text(const ExperimentConfig& config) {
    std::string out = "# resolved configuration\n";
    out += "experiment=" + std::string(to_string(config.experiment)) + '\n';
    out += "output_dir=" + config.output_dir + '\n';
    out += "seed=" + std::to_string(config.seed) + '\n';
    out += "threads=" + format_int(config.threads) + '\n';
    for (const auto& [key, value] : config.params) out += key + '=' + value + '\n';
    return out;
}

std::vector<std::string> run_experiment(const ExperimentConfig& config) {
    std::filesystem::create_directories(config.output_dir);
    std::string manifest_path = join_path(config.output_dir, "manifest.txt");
    {
        std::ofstream out(manifest_path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot open " + manifest_path + " for writing");
        std::string body = manifest_text(config);
        out.write(body.data(), static_cast<std::streamsize>(body.size()));
    }

    std::vector<std::string> files{manifest_path};
    std::vector<std::string> results;
    switch (config.experiment) {
        case ExperimentKind::stalker: results = run_stalker(config); break;
        case ExperimentKind::convergence: results = run_convergence(config); break;
        case ExperimentKind::hitting: results = run_hitting(config); break;
        case ExperimentKind::generator: results = run_generator(config); break;
        case ExperimentKind::opinion_game: results = run_opinion_game(config); break;
        case ExperimentKind::stats: results = run_stats(config); break;
    }
    files.insert(files.end(), results.begin(), results.end());
    return files;
}

}  // namespace stalker
