#include "fblrate/cli.hpp"

#include "fblrate/aloha.hpp"
#include "fblrate/error.hpp"
#include "fblrate/mcbounds.hpp"
#include "fblrate/normapprox.hpp"
#include "fblrate/output.hpp"
#include "fblrate/sweeps.hpp"
#include "fblrate/validation.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace fblrate::cli {

namespace {

std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string json_scalar_text(const Json& v)
{
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number_float()) {
        return format_double(v.get<double>());
    }
    if (v.is_array()) {
        std::string out;
        for (const auto& item : v) {
            if (!out.empty()) {
                out += ',';
            }
            out += json_scalar_text(item);
        }
        return out;
    }
    return v.dump();
}

// Channel names accepted on the command line.
const std::map<std::string, ChannelKind> kChannels{
    {"awgn", ChannelKind::awgn}, {"coherent", ChannelKind::coherent}, {"noncoherent", ChannelKind::noncoherent}};

// Options shared by most subcommands. Optional fields are echoed only when used.
struct Common {
    std::string format = "json";
    std::string out_path;
    std::uint64_t seed = kDefaultSeed;
    std::int64_t samples = 100'000;
    int workers = 0;
    std::optional<double> snr_db;
    std::optional<double> snr;

    [[nodiscard]] double rho() const
    {
        if (snr_db) {
            return db_to_linear(*snr_db);
        }
        if (snr) {
            return *snr;
        }
        throw ValidityError("an SNR is required: pass --snr-db or --snr");
    }

    void echo_snr(Json& p) const
    {
        if (snr_db) {
            p["snr-db"] = *snr_db;
        } else if (snr) {
            p["snr"] = *snr;
        }
    }

    [[nodiscard]] SamplingPlan plan(std::int64_t count) const
    {
        SamplingPlan p;
        p.samples = count;
        p.stream = RngStream{seed, 0};
        p.workers = workers;
        return p;
    }

    [[nodiscard]] Json mc_metadata(std::int64_t count) const
    {
        return Json{{"seed", seed}, {"samples", count}, {"workers", workers}};
    }
};

void add_output_flags(CLI::App* app, Common& c)
{
    app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--out", c.out_path, "Write the record to this file instead of standard output");
}

void add_snr_flags(CLI::App* app, Common& c)
{
    auto* db = app->add_option("--snr-db", c.snr_db, "SNR in dB");
    auto* lin = app->add_option("--snr", c.snr, "SNR as a linear power ratio");
    db->excludes(lin);
}

void add_mc_flags(CLI::App* app, Common& c)
{
    app->add_option("--samples", c.samples, "Monte Carlo sample count")->check(CLI::PositiveNumber);
    app->add_option("--seed", c.seed, "Random seed (default: FBLRATE_SEED or 2024)");
    app->add_option("--workers", c.workers, "OpenMP threads for sampling; 0 uses the runtime default")
        ->check(CLI::NonNegativeNumber);
}

// Blocklength given either as L (coherence intervals) or n (channel uses).
struct Blocklength {
    std::optional<double> L;
    std::optional<double> n;

    void add(CLI::App* app)
    {
        auto* l = app->add_option("--L", L, "Number of coherence intervals (may be fractional)");
        auto* nn = app->add_option("--n", n, "Blocklength in channel uses; L = n / T");
        l->excludes(nn);
    }

    [[nodiscard]] double intervals(int T) const
    {
        if (L) {
            return *L;
        }
        if (n) {
            return *n / T;
        }
        throw ValidityError("a blocklength is required: pass --L or --n");
    }

    void echo(Json& p) const
    {
        if (L) {
            p["L"] = *L;
        } else if (n) {
            p["n"] = *n;
        }
    }
};

std::vector<AntennaConfig> pair_antennas(const std::vector<int>& nt, const std::vector<int>& nr)
{
    if (nt.empty() || nr.empty()) {
        throw ValidityError("--nt and --nr need at least one value each");
    }
    if (nt.size() != nr.size() && nt.size() != 1 && nr.size() != 1) {
        throw ValidityError("--nt and --nr lists must have equal length or one of them a single value");
    }
    const std::size_t count = std::max(nt.size(), nr.size());
    std::vector<AntennaConfig> out;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back({nt[nt.size() == 1 ? 0 : i], nr[nr.size() == 1 ? 0 : i]});
    }
    return out;
}

Json breakdown_json(const RateBreakdown& r)
{
    return Json{{"capacity_term", r.capacity_term},
                {"dispersion_term", r.dispersion_term},
                {"correction_term", r.correction_term},
                {"total", r.total},
                {"unit", "nats per channel use"}};
}

Json estimate_json(const MCEstimate& e)
{
    return Json{{"mean", e.mean}, {"std_error", e.std_error}, {"samples", e.samples}};
}

// Flattens an array of flat objects into CSV with the union of keys as header.
std::string records_to_csv(const Json& rows)
{
    std::vector<std::string> header;
    std::set<std::string> seen;
    for (const auto& row : rows) {
        for (const auto& [k, v] : row.items()) {
            if (seen.insert(k).second) {
                header.push_back(k);
            }
        }
    }
    std::ostringstream out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        out << (i ? "," : "") << csv_field(header[i]);
    }
    out << "\r\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) {
                out << ',';
            }
            if (!row.contains(header[i])) {
                continue;
            }
            const auto& v = row[header[i]];
            if (v.is_number_float()) {
                out << format_double(v.get<double>());
            } else if (v.is_string()) {
                out << csv_field(v.get<std::string>());
            } else if (!v.is_null()) {
                out << csv_field(v.dump());
            }
        }
        out << "\r\n";
    }
    return out.str();
}

struct Emission {
    OutputRecord record;
    std::string csv; // already rendered when the command has a natural table
};

void emit(const Emission& e, const Common& c, std::ostream& out)
{
    std::string text;
    if (c.format == "csv") {
        text = e.csv.empty() ? object_to_csv(e.record.results) : e.csv;
    } else {
        text = e.record.to_json().dump(2) + "\n";
    }
    if (c.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(c.out_path, std::ios::binary);
    if (!file) {
        throw ValidityError("cannot open output file " + c.out_path);
    }
    file << text;
}

// ---- subcommands -------------------------------------------------------

struct RateArgs {
    int nt = 1, nr = 1, T = 0;
    Blocklength block;
    double eps = 1e-3;
    std::string channel = "noncoherent";
};

Emission do_rate(const RateArgs& a, const Common& c)
{
    const double rho = c.rho();
    const Scenario s{a.nt, a.nr, a.T, a.block.intervals(a.T), rho, Probability(a.eps)};
    Emission e;
    e.record.command = "rate";
    auto& p = e.record.parameters;
    p = Json{{"nt", a.nt}, {"nr", a.nr}, {"T", a.T}};
    a.block.echo(p);
    c.echo_snr(p);
    p["eps"] = a.eps;
    p["channel"] = a.channel;

    switch (kChannels.at(a.channel)) {
    case ChannelKind::noncoherent:
        e.record.results = breakdown_json(na_noncoherent(s));
        break;
    case ChannelKind::awgn:
        e.record.results = breakdown_json(na_awgn(s.blocklength(), s.eps, rho, a.nt, a.nr));
        break;
    case ChannelKind::coherent: {
        p["samples"] = c.samples;
        p["seed"] = c.seed;
        const auto plan = c.plan(c.samples);
        const auto m = coherent_moments(a.T, rho, a.nt, a.nr, plan);
        e.record.results = breakdown_json(na_coherent(s, plan));
        auto meta = c.mc_metadata(c.samples);
        meta["capacity"] = estimate_json(m.capacity);
        meta["dispersion"] = estimate_json(m.dispersion);
        e.record.mc_metadata = meta;
        break;
    }
    }
    e.record.results["blocklength"] = s.blocklength();
    return e;
}

struct ErrArgs {
    int nt = 1, nr = 1, T = 0;
    Blocklength block;
    std::optional<double> bits;
    std::optional<double> rate;
    std::string channel = "noncoherent";
};

Emission do_errprob(const ErrArgs& a, const Common& c)
{
    const double rho = c.rho();
    const double L = a.block.intervals(a.T);
    if (!(L > 0.0)) {
        throw ValidityError("L > 0 violated");
    }
    const double n = L * a.T;
    double k;
    if (a.bits) {
        k = *a.bits;
    } else if (a.rate) {
        k = *a.rate * n / std::numbers::ln2;
    } else {
        throw ValidityError("a payload is required: pass --bits or --rate");
    }
    Emission e;
    e.record.command = "errprob";
    auto& p = e.record.parameters;
    p = Json{{"nt", a.nt}, {"nr", a.nr}, {"T", a.T}};
    a.block.echo(p);
    c.echo_snr(p);
    if (a.bits) {
        p["bits"] = *a.bits;
    } else {
        p["rate"] = *a.rate;
    }
    p["channel"] = a.channel;

    Probability eps;
    switch (kChannels.at(a.channel)) {
    case ChannelKind::noncoherent:
        eps = eps_noncoherent(k, n, a.T, rho, a.nt, a.nr);
        break;
    case ChannelKind::awgn:
        eps = eps_awgn(k, n, rho, a.nt, a.nr);
        break;
    case ChannelKind::coherent:
        p["samples"] = c.samples;
        p["seed"] = c.seed;
        eps = eps_coherent(k, n, a.T, rho, a.nt, a.nr, c.plan(c.samples));
        e.record.mc_metadata = c.mc_metadata(c.samples);
        break;
    }
    e.record.results = Json{{"eps", eps.value()}, {"bits", k}, {"blocklength", n}};
    return e;
}

struct SweepTArgs {
    double n = 0.0;
    double eps = 1e-3;
    std::vector<int> nt{1};
    std::vector<int> nr{1};
    int T_min = 1;
    int T_max = 128;
};

Emission do_sweep_T(const SweepTArgs& a, const Common& c)
{
    if (a.T_min < 1 || a.T_max < a.T_min) {
        throw ValidityError("1 ≤ T-min ≤ T-max violated");
    }
    std::vector<int> Ts;
    for (int T = a.T_min; T <= a.T_max; ++T) {
        Ts.push_back(T);
    }
    const auto table = rate_vs_T(a.n, Probability(a.eps), c.rho(), pair_antennas(a.nt, a.nr), Ts);
    Emission e;
    e.record.command = "sweep-T";
    auto& p = e.record.parameters;
    p = Json{{"n", a.n}, {"eps", a.eps}};
    c.echo_snr(p);
    p["nt"] = a.nt;
    p["nr"] = a.nr;
    p["T-min"] = a.T_min;
    p["T-max"] = a.T_max;
    e.record.results = sweep_to_json(table);
    e.csv = sweep_to_csv(table);
    return e;
}

struct SweepSnrArgs {
    double rate = 0.0;
    int T = 0;
    Blocklength block;
    double snr_min = 0.0, snr_max = 30.0, snr_step = 1.0;
    std::vector<int> nt{1};
    std::vector<int> nr{1};
    std::vector<std::string> channels{"noncoherent"};
};

Emission do_sweep_snr(const SweepSnrArgs& a, const Common& c)
{
    if (!(a.snr_step > 0.0) || a.snr_max < a.snr_min) {
        throw ValidityError("snr-step > 0 and snr-min ≤ snr-max required");
    }
    std::vector<double> grid;
    const auto steps = static_cast<int>(std::floor((a.snr_max - a.snr_min) / a.snr_step + 1e-9));
    for (int i = 0; i <= steps; ++i) {
        grid.push_back(a.snr_min + i * a.snr_step);
    }
    std::vector<SnrSweepConfig> configs;
    bool coherent = false;
    for (const auto& ant : pair_antennas(a.nt, a.nr)) {
        for (const auto& ch : a.channels) {
            configs.push_back({ant, kChannels.at(ch)});
            coherent = coherent || ch == "coherent";
        }
    }
    const auto table = err_vs_snr(a.rate, a.T, a.block.intervals(a.T), grid, configs, c.plan(c.samples));
    Emission e;
    e.record.command = "sweep-snr";
    auto& p = e.record.parameters;
    p = Json{{"rate", a.rate}, {"T", a.T}};
    a.block.echo(p);
    p["snr-min"] = a.snr_min;
    p["snr-max"] = a.snr_max;
    p["snr-step"] = a.snr_step;
    p["nt"] = a.nt;
    p["nr"] = a.nr;
    p["channel"] = a.channels;
    if (coherent) {
        p["samples"] = c.samples;
        p["seed"] = c.seed;
        e.record.mc_metadata = c.mc_metadata(c.samples);
    }
    e.record.results = sweep_to_json(table);
    e.csv = sweep_to_csv(table);
    return e;
}

struct AntennaArgs {
    double n = 0.0;
    double eps = 1e-3;
    int nr = 1;
    std::vector<int> nt;
    int T_max = kDefaultCrossingTMax;
    std::optional<int> T;
};

Emission do_antennas(const AntennaArgs& a, const Common& c)
{
    std::vector<int> nts = a.nt;
    if (nts.empty()) {
        for (int i = 1; i <= a.nr; ++i) {
            nts.push_back(i);
        }
    }
    const double rho = c.rho();
    const auto reports = crossing_points(a.n, Probability(a.eps), rho, a.nr, nts, a.T_max);
    Emission e;
    e.record.command = "antennas";
    auto& p = e.record.parameters;
    p = Json{{"n", a.n}, {"eps", a.eps}};
    c.echo_snr(p);
    p["nr"] = a.nr;
    p["nt"] = nts;
    p["T-max"] = a.T_max;

    Json list = Json::array();
    Json rows = Json::array();
    for (const auto& r : reports) {
        Json crossings = Json::array();
        for (const auto& x : r.crossings) {
            const std::string dir = x.upward ? "up" : "down";
            crossings.push_back(Json{{"T", x.T}, {"direction", dir}});
            rows.push_back(Json{{"n1", r.n1}, {"n2", r.n2}, {"T", x.T}, {"direction", dir}});
        }
        list.push_back(Json{{"n1", r.n1}, {"n2", r.n2}, {"crossings", std::move(crossings)}});
    }
    e.record.results["crossings"] = list;
    if (a.T) {
        p["T"] = *a.T;
        e.record.results["optimal_nt"] = optimal_nt(*a.T, a.n, Probability(a.eps), rho, a.nr, nts);
    }
    e.csv = records_to_csv(rows);
    return e;
}

struct AlohaArgs {
    int devices = 12;
    double n = 480.0;
    std::string channel = "awgn";
    double threshold = 0.3;
    int nt = 1, nr = 1, T = 96;
    bool integer_bits = false;
};

Emission do_aloha(const AlohaArgs& a, const Common& c)
{
    AlohaScenario sc;
    sc.devices = a.devices;
    sc.n = a.n;
    sc.rho = c.rho();
    sc.channel = kChannels.at(a.channel);
    sc.n_t = a.nt;
    sc.n_r = a.nr;
    sc.T = a.T;
    if (!(a.threshold > 0.0 && a.threshold <= 1.0)) {
        throw ValidityError("0 < threshold ≤ 1 violated");
    }
    sc.success_threshold = Probability(a.threshold);
    sc.payload = a.integer_bits ? PayloadMode::integer : PayloadMode::continuous;
    sc.coherent_plan = c.plan(c.samples);

    const auto plan = optimize(sc);
    Emission e;
    e.record.command = "aloha";
    auto& p = e.record.parameters;
    p = Json{{"devices", a.devices}, {"n", a.n}};
    c.echo_snr(p);
    p["channel"] = a.channel;
    p["threshold"] = a.threshold;
    if (sc.channel != ChannelKind::awgn) {
        p["T"] = a.T;
    }
    p["nt"] = a.nt;
    p["nr"] = a.nr;
    p["integer-bits"] = a.integer_bits;
    if (sc.channel == ChannelKind::coherent) {
        p["samples"] = c.samples;
        p["seed"] = c.seed;
        e.record.mc_metadata = c.mc_metadata(c.samples);
    }
    e.record.results = Json{{"s_star", plan.s_star},
                            {"k_star_bits", plan.k_star},
                            {"eps_star", plan.eps_star.value()},
                            {"p_success", plan.p_success.value()},
                            {"slot_length", a.n / plan.s_star}};
    return e;
}

struct ConverseArgs {
    int nt = 1, nr = 2, T = 24;
    double L = 7.0;
    double eps = 1e-5;
};

Emission do_converse(const ConverseArgs& a, const Common& c)
{
    const Scenario s{a.nt, a.nr, a.T, a.L, c.rho(), Probability(a.eps)};
    const auto r = empirical_converse(s, c.plan(c.samples));
    Emission e;
    e.record.command = "converse";
    auto& p = e.record.parameters;
    p = Json{{"nt", a.nt}, {"nr", a.nr}, {"T", a.T}, {"L", a.L}, {"eps", a.eps}};
    c.echo_snr(p);
    p["samples"] = c.samples;
    p["seed"] = c.seed;
    e.record.results = Json{{"rate_upper_bound", r.rate_upper_bound},
                            {"std_error", r.std_error},
                            {"threshold_log_xi", r.threshold_log_xi},
                            {"tail_estimate", r.tail_estimate.value()},
                            {"empirical", r.empirical}};
    if (s.valid()) {
        e.record.results["normal_approximation"] = na_noncoherent(s).total;
    }
    auto meta = c.mc_metadata(c.samples);
    meta["realizations"] = r.samples;
    meta["block_draws"] = r.block_draws;
    meta["std_error"] = r.std_error;
    e.record.mc_metadata = meta;
    return e;
}

struct ValidateArgs {
    std::string suite = "all";
    std::optional<std::int64_t> samples;
};

Json check_json(const OracleCheck& c)
{
    return Json{{"check", c.name},         {"estimate", c.estimate.mean}, {"std_error", c.estimate.std_error},
                {"oracle", c.oracle},      {"z", c.z_score()},            {"pass", c.pass()}};
}

Emission do_validate(const ValidateArgs& a, Common c)
{
    const bool all = a.suite == "all";
    Json rows = Json::array();
    Json params{{"suite", a.suite}, {"seed", c.seed}};
    if (a.samples) {
        params["samples"] = *a.samples;
    }
    std::uint64_t stream = 0;
    if (all || a.suite == "variance-law") {
        const std::int64_t count = a.samples.value_or(1'000'000);
        for (auto [nt, nr, T] : {std::tuple{1, 2, 4}, std::tuple{2, 2, 8}, std::tuple{2, 4, 12}}) {
            auto plan = c.plan(count);
            plan.stream.stream_index = stream++;
            rows.push_back(check_json(variance_law_check(T, nt, nr, plan)));
        }
    }
    if (all || a.suite == "wishart") {
        const std::int64_t count = a.samples.value_or(100'000);
        for (auto [nt, nr] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{2, 2}, std::pair{2, 4}}) {
            auto plan = c.plan(count);
            plan.stream.stream_index = stream++;
            for (const auto& chk : wishart_moment_check(nt, nr, plan)) {
                rows.push_back(check_json(chk));
            }
        }
    }
    Json results;
    if (all || a.suite == "positivity") {
        const auto grid = positivity_grid();
        Json failures = Json::array();
        for (const auto& f : grid.failures) {
            failures.push_back(Json{{"nt", f.n_t}, {"nr", f.n_r}, {"T", f.T}});
        }
        rows.push_back(Json{{"check", "positivity_grid"},
                            {"estimate", static_cast<double>(grid.points - static_cast<int>(grid.failures.size()))},
                            {"oracle", static_cast<double>(grid.points)},
                            {"pass", grid.failures.empty()}});
        results["positivity_failures"] = failures;
    }
    results["checks"] = rows;
    Emission e;
    e.record.command = "mc-validate";
    e.record.parameters = params;
    e.record.results = results;
    e.record.mc_metadata = Json{{"seed", c.seed}, {"workers", c.workers}};
    e.csv = records_to_csv(rows);
    return e;
}

// ---- argument plumbing -------------------------------------------------

std::set<std::string> given_flags(const std::vector<std::string>& args)
{
    std::set<std::string> out;
    for (const auto& a : args) {
        if (a.rfind("--", 0) == 0 && a.size() > 2) {
            out.insert(a.substr(2, a.find('=') - 2));
        }
    }
    return out;
}

std::vector<std::string> merge_config(const std::vector<std::string>& args, std::string& config_path)
{
    // Find --config without disturbing the rest of the line.
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (config_path.empty()) {
        return rest;
    }
    const auto given = given_flags(rest);
    const auto config = load_config(config_path);

    std::vector<std::string> merged;
    auto command = config.find("command");
    const bool has_sub = !rest.empty() && rest.front().rfind("-", 0) != 0;
    if (has_sub) {
        merged.push_back(rest.front());
    } else if (command != config.end()) {
        merged.push_back(command->second);
    }
    for (const auto& [key, value] : config) {
        if (key == "command" || key == "config" || given.count(key)) {
            continue;
        }
        if ((key == "snr-db" && given.count("snr")) || (key == "snr" && given.count("snr-db")) ||
            (key == "L" && given.count("n")) || (key == "n" && given.count("L")) ||
            (key == "bits" && given.count("rate")) || (key == "rate" && given.count("bits"))) {
            continue;
        }
        merged.push_back("--" + key + "=" + value);
    }
    merged.insert(merged.end(), rest.begin() + (has_sub ? 1 : 0), rest.end());
    return merged;
}

} // namespace

std::map<std::string, std::string> load_config(const std::string& path)
{
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw ValidityError("cannot read config file " + path);
    }
    std::stringstream buffer;
    buffer << file.rdbuf();
    const std::string text = buffer.str();

    std::map<std::string, std::string> out;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        Json doc;
        try {
            doc = Json::parse(text);
        } catch (const Json::parse_error& e) {
            throw ValidityError("config file " + path + " is not valid JSON: " + e.what());
        }
        const Json& params = doc.contains("parameters") ? doc["parameters"] : doc;
        if (!params.is_object()) {
            throw ValidityError("config file " + path + " has no parameter object");
        }
        for (const auto& [k, v] : params.items()) {
            out[k] = json_scalar_text(v);
        }
        if (doc.contains("command") && doc["command"].is_string()) {
            out["command"] = doc["command"].get<std::string>();
        }
        return out;
    }

    std::istringstream lines(text);
    std::string line;
    int number = 0;
    while (std::getline(lines, line)) {
        ++number;
        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidityError("config line " + std::to_string(number) + " is not key=value");
        }
        std::string key = trim(line.substr(0, eq));
        while (!key.empty() && key.front() == '-') {
            key.erase(0, 1);
        }
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err)
{
    Common common;
    if (const char* env = std::getenv("FBLRATE_SEED")) {
        try {
            std::size_t used = 0;
            common.seed = std::stoull(env, &used);
            if (used != std::string(env).size()) {
                throw std::invalid_argument(env);
            }
        } catch (const std::exception&) {
            err << "error: FBLRATE_SEED must be a non-negative integer\n";
            return kExitInvalid;
        }
    }

    CLI::App app{"Finite-blocklength rates for MIMO Rayleigh block-fading channels", "fblrate"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");
    // Recorded for --help only; merge_config consumes it before parsing.
    std::string config_unused;
    app.add_option("--config", config_unused, "key=value or JSON config file; flags override it");

    const std::vector<std::string> channel_names{"awgn", "coherent", "noncoherent"};

    RateArgs rate_args;
    auto* rate = app.add_subcommand("rate", "Normal approximation of the maximum coding rate");
    rate->add_option("--nt", rate_args.nt, "Transmit antennas")->default_val(1);
    rate->add_option("--nr", rate_args.nr, "Receive antennas")->default_val(1);
    rate->add_option("--T", rate_args.T, "Coherence interval")->required();
    rate_args.block.add(rate);
    rate->add_option("--eps", rate_args.eps, "Target error probability")->default_val(1e-3);
    rate->add_option("--channel", rate_args.channel)->check(CLI::IsMember(channel_names));

    ErrArgs err_args;
    auto* errprob = app.add_subcommand("errprob", "Error probability for a payload");
    errprob->add_option("--nt", err_args.nt)->default_val(1);
    errprob->add_option("--nr", err_args.nr)->default_val(1);
    errprob->add_option("--T", err_args.T)->required();
    err_args.block.add(errprob);
    auto* bits = errprob->add_option("--bits", err_args.bits, "Payload in bits");
    auto* ratef = errprob->add_option("--rate", err_args.rate, "Rate in nats per channel use");
    bits->excludes(ratef);
    errprob->add_option("--channel", err_args.channel)->check(CLI::IsMember(channel_names));

    SweepTArgs sweep_t_args;
    auto* sweep_t = app.add_subcommand("sweep-T", "Rate against the coherence interval at fixed n");
    sweep_t->add_option("--n", sweep_t_args.n, "Blocklength in channel uses")->required();
    sweep_t->add_option("--eps", sweep_t_args.eps)->default_val(1e-3);
    sweep_t->add_option("--nt", sweep_t_args.nt, "Comma-separated transmit antenna counts")->delimiter(',');
    sweep_t->add_option("--nr", sweep_t_args.nr, "Comma-separated receive antenna counts")->delimiter(',');
    sweep_t->add_option("--T-min", sweep_t_args.T_min)->default_val(1);
    sweep_t->add_option("--T-max", sweep_t_args.T_max)->default_val(128);

    SweepSnrArgs snr_args;
    auto* sweep_snr = app.add_subcommand("sweep-snr", "Error probability against SNR at a fixed rate");
    sweep_snr->add_option("--rate", snr_args.rate, "Rate in nats per channel use")->required();
    sweep_snr->add_option("--T", snr_args.T)->required();
    snr_args.block.add(sweep_snr);
    sweep_snr->add_option("--snr-min", snr_args.snr_min, "dB")->default_val(0.0);
    sweep_snr->add_option("--snr-max", snr_args.snr_max, "dB")->default_val(30.0);
    sweep_snr->add_option("--snr-step", snr_args.snr_step, "dB")->default_val(1.0);
    sweep_snr->add_option("--nt", snr_args.nt)->delimiter(',');
    sweep_snr->add_option("--nr", snr_args.nr)->delimiter(',');
    sweep_snr->add_option("--channel", snr_args.channels, "Comma-separated channel models")
        ->delimiter(',')
        ->check(CLI::IsMember(channel_names));

    AntennaArgs ant_args;
    auto* antennas = app.add_subcommand("antennas", "Crossing points and the best number of transmit antennas");
    antennas->add_option("--n", ant_args.n)->required();
    antennas->add_option("--eps", ant_args.eps)->default_val(1e-3);
    antennas->add_option("--nr", ant_args.nr)->required();
    antennas->add_option("--nt", ant_args.nt, "Candidate transmit antenna counts (default 1..nr)")->delimiter(',');
    antennas->add_option("--T-max", ant_args.T_max)->default_val(kDefaultCrossingTMax);
    antennas->add_option("--T", ant_args.T, "Also report the best n_t at this T");

    AlohaArgs aloha_args;
    auto* aloha = app.add_subcommand("aloha", "Slotted-ALOHA slot count and payload optimization");
    aloha->add_option("--devices", aloha_args.devices)->default_val(12);
    aloha->add_option("--n", aloha_args.n, "Frame length in channel uses")->default_val(480.0);
    aloha->add_option("--channel", aloha_args.channel)->check(CLI::IsMember(channel_names));
    aloha->add_option("--threshold", aloha_args.threshold, "Required success probability")->default_val(0.3);
    aloha->add_option("--nt", aloha_args.nt)->default_val(1);
    aloha->add_option("--nr", aloha_args.nr)->default_val(1);
    aloha->add_option("--T", aloha_args.T)->default_val(96);
    aloha->add_flag("--integer-bits", aloha_args.integer_bits, "Restrict payloads to whole bits");

    ConverseArgs conv_args;
    auto* converse = app.add_subcommand("converse", "Empirical weakened meta-converse bound");
    converse->add_option("--nt", conv_args.nt)->default_val(1);
    converse->add_option("--nr", conv_args.nr)->default_val(2);
    converse->add_option("--T", conv_args.T)->default_val(24);
    converse->add_option("--L", conv_args.L, "Integer number of coherence intervals")->default_val(7.0);
    converse->add_option("--eps", conv_args.eps)->default_val(1e-5);

    ValidateArgs val_args;
    auto* validate = app.add_subcommand("mc-validate", "Monte Carlo checks against closed forms");
    validate->add_option("--suite", val_args.suite)
        ->check(CLI::IsMember({"all", "variance-law", "wishart", "positivity"}));
    validate->add_option("--samples", val_args.samples, "Override sample counts")->check(CLI::PositiveNumber);
    validate->add_option("--seed", common.seed);
    validate->add_option("--workers", common.workers)->check(CLI::NonNegativeNumber);
    add_output_flags(validate, common);

    for (auto* sub : {rate, errprob, sweep_t, sweep_snr, antennas, aloha, converse}) {
        add_output_flags(sub, common);
    }
    for (auto* sub : {rate, errprob, sweep_t, antennas, aloha, converse}) {
        add_snr_flags(sub, common);
    }
    for (auto* sub : {rate, errprob, sweep_snr, aloha, converse}) {
        add_mc_flags(sub, common);
    }

    try {
        std::string config_path;
        const auto args = merge_config(raw_args, config_path);
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);

        Emission e;
        if (*rate) {
            e = do_rate(rate_args, common);
        } else if (*errprob) {
            e = do_errprob(err_args, common);
        } else if (*sweep_t) {
            e = do_sweep_T(sweep_t_args, common);
        } else if (*sweep_snr) {
            e = do_sweep_snr(snr_args, common);
        } else if (*antennas) {
            e = do_antennas(ant_args, common);
        } else if (*aloha) {
            e = do_aloha(aloha_args, common);
        } else if (*converse) {
            e = do_converse(conv_args, common);
        } else {
            e = do_validate(val_args, common);
        }
        emit(e, common, out);
        return kExitOk;
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const ValidityError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const DimensionError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

} // namespace fblrate::cli
