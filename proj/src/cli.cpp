#include "matchdist/cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "matchdist/classical.hpp"
#include "matchdist/generalised.hpp"
#include "matchdist/inference.hpp"
#include "matchdist/matching_test.hpp"
#include "matchdist/oracle.hpp"

namespace matchdist::cli {

namespace {

using json = nlohmann::ordered_json;

enum class Format { csv, json };

struct Output {
    std::string command;
    json params = json::object();
    json summary = json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
};

std::string format_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned())
        return std::to_string(v.get<unsigned long long>());
    return format_double(v.get<double>());
}

void emit(const Output& o, Format fmt, std::ostream& out) {
    if (fmt == Format::json) {
        json doc;
        doc["command"] = o.command;
        doc["parameters"] = o.params;
        if (!o.summary.empty()) doc["summary"] = o.summary;
        json rows = json::array();
        for (const auto& r : o.rows) {
            json row = json::object();
            for (std::size_t i = 0; i < o.columns.size(); ++i)
                row[o.columns[i]] = r[i];
            rows.push_back(std::move(row));
        }
        doc["results"] = rows;
        out << doc.dump(2) << '\n';
        return;
    }
    out << "# command: " << o.command << '\n';
    for (const auto& [key, value] : o.params.items())
        out << "# " << key << "=" << csv_cell(value) << '\n';
    for (const auto& [key, value] : o.summary.items())
        out << "# " << key << "=" << csv_cell(value) << '\n';
    for (std::size_t i = 0; i < o.columns.size(); ++i)
        out << (i ? "," : "") << o.columns[i];
    out << '\n';
    for (const auto& r : o.rows) {
        for (std::size_t i = 0; i < r.size(); ++i)
            out << (i ? "," : "") << csv_cell(r[i]);
        out << '\n';
    }
}

// --size accepts a nonnegative integer or "inf".
std::optional<int> parse_size(const std::string& text) {
    if (text == "inf" || text == "Inf" || text == "infinity")
        return std::nullopt;
    try {
        std::size_t pos = 0;
        const int v = std::stoi(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw CLI::ValidationError("--size",
                                   "expected an integer or 'inf', got '" +
                                       text + "'");
    }
}

MatchingParams make_params(const std::string& size_text, int trials,
                           double prob) {
    const std::optional<int> size = parse_size(size_text);
    if (!size) return MatchingParams::with_infinite_size(trials, prob);
    return MatchingParams(*size, trials, prob);
}

std::string method_name(PmfMethod m) {
    switch (m) {
        case PmfMethod::exact: return "exact";
        case PmfMethod::normal_approx: return "normal-approx";
        case PmfMethod::poisson_limit: return "poisson-limit";
    }
    return "";
}

Alternative parse_alternative(const std::string& text) {
    if (text == "greater") return Alternative::greater;
    if (text == "less") return Alternative::less;
    if (text == "two-sided" || text == "two_sided")
        return Alternative::two_sided;
    throw CLI::ValidationError(
        "--alternative", "expected greater, less or two-sided, got '" + text +
                             "'");
}

std::string alternative_name(Alternative a) {
    switch (a) {
        case Alternative::greater: return "greater";
        case Alternative::less: return "less";
        case Alternative::two_sided: return "two-sided";
    }
    return "";
}

TailSplit parse_tail_split(const std::string& text) {
    if (text == "fraction") return TailSplit::fraction_of_alpha;
    if (text == "absolute") return TailSplit::absolute;
    throw CLI::ValidationError(
        "--tail-split", "expected fraction or absolute, got '" + text + "'");
}

std::string boundary_name(BoundaryFlag b) {
    switch (b) {
        case BoundaryFlag::none: return "none";
        case BoundaryFlag::at_zero: return "at-zero";
        case BoundaryFlag::at_one: return "at-one";
    }
    return "";
}

std::vector<int> read_observations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::domain_error("cannot open data file: " + path);
    std::vector<int> obs;
    long long v = 0;
    while (in >> v) obs.push_back(static_cast<int>(v));
    if (!in.eof())
        throw std::domain_error("data file is not integer-per-line: " + path);
    return obs;
}

struct DistOpts {
    std::string size;
    int trials = 1;
    double prob = 0.0;
    bool approx = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--size", size,
                        "items per game (nonnegative integer or 'inf')")
            ->required();
        cmd->add_option("--trials", trials, "number of games")->capture_default_str();
        cmd->add_option("--prob", prob, "knowledge probability")->capture_default_str();
        cmd->add_flag("--approx", approx,
                      "force the normal approximation for the total");
    }

    MatchingParams params() const { return make_params(size, trials, prob); }
    ApproxPolicy policy() const {
        return approx ? ApproxPolicy::force_normal : ApproxPolicy::automatic;
    }
};

void setup_pmf(CLI::App& app, const Format& fmt, std::ostream& out) {
    struct Opts {
        DistOpts dist;
        std::vector<long long> k;
        bool log = false;
    };
    auto opts = std::make_shared<Opts>();
    auto* cmd = app.add_subcommand("pmf", "Probability mass of the total");
    cmd->add_option("--k", opts->k, "totals to evaluate")->required();
    opts->dist.attach(cmd);
    cmd->add_flag("--log", opts->log, "return natural-log probabilities");
    cmd->callback([opts, &fmt, &out] {
        const MatchingDistribution dist(opts->dist.params(),
                                        opts->dist.policy());
        Output o;
        o.command = "pmf";
        o.params["size"] = opts->dist.size;
        o.params["trials"] = opts->dist.trials;
        o.params["prob"] = opts->dist.prob;
        o.params["log"] = opts->log;
        o.params["method"] = method_name(dist.method());
        o.columns = {"k", opts->log ? "log_pmf" : "pmf"};
        for (long long k : opts->k)
            o.rows.push_back(
                {k, opts->log ? dist.log_pmf(k) : dist.pmf(k)});
        emit(o, fmt, out);
    });
}

void setup_cdf(CLI::App& app, const Format& fmt, std::ostream& out) {
    struct Opts {
        DistOpts dist;
        std::vector<long long> t;
        bool lower_tail = true;
        bool log_p = false;
    };
    auto opts = std::make_shared<Opts>();
    auto* cmd = app.add_subcommand("cdf", "Cumulative probability of the total");
    cmd->add_option("--t", opts->t, "totals to evaluate")->required();
    opts->dist.attach(cmd);
    cmd->add_option("--lower-tail", opts->lower_tail,
                    "true for P(T <= t), false for P(T > t)")->capture_default_str();
    cmd->add_flag("--log-p", opts->log_p, "return natural-log probabilities");
    cmd->callback([opts, &fmt, &out] {
        const MatchingDistribution dist(opts->dist.params(),
                                        opts->dist.policy());
        Output o;
        o.command = "cdf";
        o.params["size"] = opts->dist.size;
        o.params["trials"] = opts->dist.trials;
        o.params["prob"] = opts->dist.prob;
        o.params["lower_tail"] = opts->lower_tail;
        o.params["log_p"] = opts->log_p;
        o.params["method"] = method_name(dist.method());
        o.columns = {"t", opts->log_p ? "log_prob" : "prob"};
        for (long long t : opts->t) {
            const double p =
                opts->lower_tail ? dist.cdf(t) : dist.upper_tail(t + 1);
            o.rows.push_back({t, opts->log_p ? std::log(p) : p});
        }
        emit(o, fmt, out);
    });
}

void setup_quantile(CLI::App& app, const Format& fmt, std::ostream& out) {
    struct Opts {
        DistOpts dist;
        std::vector<double> p;
        bool lower_tail = true;
        bool log_p = false;
    };
    auto opts = std::make_shared<Opts>();
    auto* cmd = app.add_subcommand("quantile", "Quantiles of the total");
    cmd->add_option("--p", opts->p, "probabilities")->required();
    opts->dist.attach(cmd);
    cmd->add_option("--lower-tail", opts->lower_tail,
                    "false treats p as upper-tail mass")->capture_default_str();
    cmd->add_flag("--log-p", opts->log_p, "probabilities given as logs");
    cmd->callback([opts, &fmt, &out] {
        const MatchingDistribution dist(opts->dist.params(),
                                        opts->dist.policy());
        Output o;
        o.command = "quantile";
        o.params["size"] = opts->dist.size;
        o.params["trials"] = opts->dist.trials;
        o.params["prob"] = opts->dist.prob;
        o.params["lower_tail"] = opts->lower_tail;
        o.params["log_p"] = opts->log_p;
        o.params["method"] = method_name(dist.method());
        o.columns = {"p", "quantile"};
        for (double p : opts->p) {
            double eff = opts->log_p ? std::exp(p) : p;
            if (!opts->lower_tail) eff = 1.0 - eff;
            o.rows.push_back({p, dist.quantile(eff)});
        }
        emit(o, fmt, out);
    });
}

void setup_sample(CLI::App& app, const Format& fmt, std::ostream& out) {
    struct Opts {
        DistOpts dist;
        int count = 1;
        std::uint64_t seed = 0;
    };
    auto opts = std::make_shared<Opts>();
    auto* cmd = app.add_subcommand("sample", "Pseudo-random totals");
    cmd->add_option("--count", opts->count, "number of draws")->required();
    cmd->add_option("--seed", opts->seed, "generator seed")->capture_default_str();
    opts->dist.attach(cmd);
    cmd->callback([opts, &fmt, &out] {
        const MatchingDistribution dist(opts->dist.params(),
                                        opts->dist.policy());
        const std::vector<long long> draws =
            dist.sample(opts->count, opts->seed);
        Output o;
        o.command = "sample";
        o.params["size"] = opts->dist.size;
        o.params["trials"] = opts->dist.trials;
        o.params["prob"] = opts->dist.prob;
        o.params["count"] = opts->count;
        o.params["seed"] = opts->seed;
        o.params["method"] = method_name(dist.method());
        o.columns = {"index", "value"};
        for (std::size_t i = 0; i < draws.size(); ++i)
            o.rows.push_back({static_cast<long long>(i), draws[i]});
        emit(o, fmt, out);
    });
}

void setup_hdr(CLI::App& app, const Format& fmt, std::ostream& out) {
    struct Opts {
        DistOpts dist;
        double cover_prob = 0.95;
    };
    auto opts = std::make_shared<Opts>();
    auto* cmd = app.add_subcommand("hdr", "Highest density region of the total");
    cmd->add_option("--cover-prob", opts->cover_prob,
                    "minimum coverage probability")->capture_default_str();
    opts->dist.attach(cmd);
    cmd->callback([opts, &fmt, &out] {
        const HdrRegion region =
            matching_hdr(opts->cover_prob, opts->dist.params(),
                         opts->dist.policy());
        Output o;
        o.command = "hdr";
        o.params["size"] = opts->dist.size;
        o.params["trials"] = opts->dist.trials;
        o.params["prob"] = opts->dist.prob;
        o.params["cover_prob"] = opts->cover_prob;
        o.summary["coverage"] = region.coverage;
        o.summary["contiguous"] = region.contiguous;
        o.columns = {"t"};
        for (long long t : region.points) o.rows.push_back({t});
        emit(o, fmt, out);
    });
}

void setup_moments(CLI::App& app, const Format& fmt, std::ostream& out) {
    struct Opts {
        DistOpts dist;
        bool include_sd = false;
        bool asymptotic = false;
    };
    auto opts = std::make_shared<Opts>();
    auto* cmd = app.add_subcommand("moments", "Moments of the total");
    opts->dist.attach(cmd);
    cmd->add_flag("--include-sd", opts->include_sd,
                  "also report the standard deviation");
    cmd->add_flag("--asymptotic", opts->asymptotic,
                  "use the large-size asymptotic forms");
    cmd->callback([opts, &fmt, &out] {
        const MatchingMoments mom =
            matching_moments(opts->dist.params(), opts->asymptotic);
        Output o;
        o.command = "moments";
        o.params["size"] = opts->dist.size;
        o.params["trials"] = opts->dist.trials;
        o.params["prob"] = opts->dist.prob;
        o.params["asymptotic"] = opts->asymptotic;
        o.columns = {"mean", "variance"};
        std::vector<json> row{mom.mean, mom.variance};
        if (opts->include_sd) {
            o.columns.push_back("sd");
            row.push_back(std::sqrt(mom.variance));
        }
        o.columns.push_back("skewness");
        row.push_back(mom.skewness ? json(*mom.skewness) : json());
        o.columns.push_back("kurtosis");
        row.push_back(mom.kurtosis ? json(*mom.kurtosis) : json());
        o.rows.push_back(std::move(row));
        emit(o, fmt, out);
    });
}

void setup_mle(CLI::App& app, const Format& fmt, std::ostream& out) {
    struct Opts {
        std::string data_path;
        int size = 0;
        std::string ci_method = "asymptotic";
        double conf_level = 0.95;
        int bootstrap_sims = 1000;
        std::uint64_t seed = 0;
        std::string tail_split = "fraction";
    };
    auto opts = std::make_shared<Opts>();
    auto* cmd =
        app.add_subcommand("mle", "Estimate the knowledge probability");
    cmd->add_option("--data", opts->data_path,
                    "file of observed counts, one integer per line")
        ->required();
    cmd->add_option("--size", opts->size, "items per game")->required();
    cmd->add_option("--ci-method", opts->ci_method,
                    "asymptotic or bootstrap")->capture_default_str();
    cmd->add_option("--conf-level", opts->conf_level, "confidence level")->capture_default_str();
    cmd->add_option("--bootstrap-sims", opts->bootstrap_sims,
                    "bootstrap resamples")->capture_default_str();
    cmd->add_option("--seed", opts->seed, "bootstrap seed")->capture_default_str();
    cmd->add_option("--tail-split", opts->tail_split,
                    "fraction or absolute tail allocation")->capture_default_str();
    cmd->callback([opts, &fmt, &out] {
        if (opts->ci_method != "asymptotic" && opts->ci_method != "bootstrap")
            throw CLI::ValidationError(
                "--ci-method",
                "expected asymptotic or bootstrap, got '" + opts->ci_method +
                    "'");
        const TailSplit split = parse_tail_split(opts->tail_split);
        Dataset data;
        data.size = opts->size;
        data.observations = read_observations(opts->data_path);
        const MleResult fit = mle(data);
        const ConfidenceInterval ci =
            opts->ci_method == "bootstrap"
                ? ci_bootstrap(data, opts->conf_level, opts->bootstrap_sims,
                               opts->seed, split)
                : ci_asymptotic(data, opts->conf_level, split);
        Output o;
        o.command = "mle";
        o.params["data"] = opts->data_path;
        o.params["size"] = opts->size;
        o.params["observations"] =
            static_cast<long long>(data.observations.size());
        o.params["ci_method"] = opts->ci_method;
        o.params["conf_level"] = opts->conf_level;
        if (opts->ci_method == "bootstrap") {
            o.params["bootstrap_sims"] = opts->bootstrap_sims;
            o.params["seed"] = opts->seed;
        }
        o.params["tail_split"] = opts->tail_split;
        o.columns = {"estimate", "boundary", "ci_lower", "ci_upper"};
        o.rows.push_back({fit.theta, boundary_name(fit.boundary), ci.lower,
                          ci.upper});
        emit(o, fmt, out);
    });
}

void setup_test(CLI::App& app, const Format& fmt, std::ostream& out) {
    struct Opts {
        std::string data_path;
        int size = 0;
        double null_prob = 0.0;
        std::string alternative = "greater";
        bool approx = false;
    };
    auto opts = std::make_shared<Opts>();
    auto* cmd = app.add_subcommand(
        "test", "Test the observed totals against a null probability");
    cmd->add_option("--data", opts->data_path,
                    "file of observed counts, one integer per line")
        ->required();
    cmd->add_option("--size", opts->size, "items per game")->required();
    cmd->add_option("--null-prob", opts->null_prob, "null probability")->capture_default_str();
    cmd->add_option("--alternative", opts->alternative,
                    "greater, less or two-sided")->capture_default_str();
    cmd->add_flag("--approx", opts->approx,
                  "force the normal approximation");
    cmd->callback([opts, &fmt, &out] {
        const Alternative alt = parse_alternative(opts->alternative);
        Dataset data;
        data.size = opts->size;
        data.observations = read_observations(opts->data_path);
        const TestResult res = matching_test(
            data, opts->null_prob, alt,
            opts->approx ? ApproxPolicy::force_normal
                         : ApproxPolicy::automatic);
        Output o;
        o.command = "test";
        o.params["data"] = opts->data_path;
        o.params["size"] = opts->size;
        o.params["trials"] = static_cast<long long>(data.observations.size());
        o.params["null_prob"] = opts->null_prob;
        o.params["alternative"] = alternative_name(res.alternative);
        o.columns = {"observed_total", "mean_matches", "p_value", "method"};
        o.rows.push_back({res.observed_total, res.mean_matches, res.p_value,
                          method_name(res.method)});
        emit(o, fmt, out);
    });
}

void setup_power(CLI::App& app, const Format& fmt, std::ostream& out) {
    struct Opts {
        int size = 0;
        int trials = 1;
        double alpha = 0.05;
        std::vector<double> grid;
    };
    auto opts = std::make_shared<Opts>();
    auto* cmd =
        app.add_subcommand("power", "Power of the canonical matching test");
    cmd->add_option("--size", opts->size, "items per game")->required();
    cmd->add_option("--trials", opts->trials, "number of games")->capture_default_str();
    cmd->add_option("--alpha", opts->alpha, "significance level")->capture_default_str();
    cmd->add_option("--theta-grid", opts->grid,
                    "probabilities to evaluate (default 0,0.01,...,1)");
    cmd->callback([opts, &fmt, &out] {
        std::vector<double> grid = opts->grid;
        if (grid.empty())
            for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
        const PowerCurve curve =
            power_curve(opts->size, opts->trials, opts->alpha, grid);
        Output o;
        o.command = "power";
        o.params["size"] = opts->size;
        o.params["trials"] = opts->trials;
        o.params["alpha"] = opts->alpha;
        o.summary["t_star"] = curve.t_star;
        o.columns = {"theta", "power"};
        for (const auto& [theta, pw] : curve.points)
            o.rows.push_back({theta, pw});
        emit(o, fmt, out);
    });
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<json>>& rows) {
    std::ofstream file(path);
    if (!file)
        throw std::domain_error("cannot write file: " + path.string());
    for (std::size_t i = 0; i < columns.size(); ++i)
        file << (i ? "," : "") << columns[i];
    file << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i)
            file << (i ? "," : "") << csv_cell(r[i]);
        file << '\n';
    }
}

void setup_figures(CLI::App& app, std::ostream& out) {
    struct Opts {
        std::string out_dir = ".";
    };
    auto opts = std::make_shared<Opts>();
    auto* cmd = app.add_subcommand(
        "figures", "Write plot data (always CSV) for the standard figures");
    cmd->add_option("--out-dir", opts->out_dir, "output directory")->capture_default_str();
    cmd->callback([opts, &out] {
        namespace fs = std::filesystem;
        const fs::path dir(opts->out_dir);
        fs::create_directories(dir);
        std::vector<std::string> written;

        {
            // Single-game pmf across sizes.
            std::vector<std::vector<json>> rows;
            for (int n = 1; n <= 12; ++n) {
                const MatchingDistribution dist(MatchingParams(n, 1, 0.0));
                for (long long k = 0; k <= n; ++k)
                    rows.push_back({n, k, dist.pmf(k)});
            }
            write_csv(dir / "figure1.csv", {"n", "k", "pmf"}, rows);
            written.push_back("figure1.csv");
        }
        {
            // Squared distance from the unit-rate Poisson limit.
            std::vector<std::vector<json>> rows;
            for (int n = 1; n <= 12; ++n)
                rows.push_back({n, classical_poisson_sse(n)});
            write_csv(dir / "figure2.csv", {"n", "sse"}, rows);
            written.push_back("figure2.csv");
        }
        {
            std::vector<std::vector<json>> rows;
            for (int n = 1; n <= 12; ++n) {
                const MatchingDistribution dist(MatchingParams(n, 1, 0.2));
                for (long long k = 0; k <= n; ++k)
                    rows.push_back({n, k, 0.2, dist.pmf(k)});
            }
            write_csv(dir / "figure3.csv", {"n", "k", "theta", "pmf"}, rows);
            written.push_back("figure3.csv");
        }
        {
            // Four panels at size 12, prob 0.2.
            const MatchingParams params(12, 1, 0.2);
            const MatchingDistribution dist(params);
            std::vector<std::vector<json>> pmf_rows, cdf_rows, q_rows, s_rows;
            for (long long k = 0; k <= 12; ++k) {
                pmf_rows.push_back({k, dist.pmf(k)});
                cdf_rows.push_back({k, dist.cdf(k)});
            }
            for (int i = 0; i <= 100; ++i) {
                const double p = i / 100.0;
                q_rows.push_back({p, dist.quantile(p)});
            }
            const std::vector<long long> draws = dist.sample(10000, 1);
            std::vector<long long> freq(13, 0);
            for (long long d : draws) ++freq[static_cast<std::size_t>(d)];
            for (long long k = 0; k <= 12; ++k)
                s_rows.push_back(
                    {k, static_cast<double>(freq[static_cast<std::size_t>(k)]) /
                            10000.0});
            write_csv(dir / "figure4_pmf.csv", {"k", "pmf"}, pmf_rows);
            write_csv(dir / "figure4_cdf.csv", {"k", "cdf"}, cdf_rows);
            write_csv(dir / "figure4_quantile.csv", {"p", "quantile"}, q_rows);
            write_csv(dir / "figure4_sample.csv", {"k", "proportion"}, s_rows);
            written.insert(written.end(),
                           {"figure4_pmf.csv", "figure4_cdf.csv",
                            "figure4_quantile.csv", "figure4_sample.csv"});
        }
        {
            std::vector<std::vector<json>> rows;
            std::vector<double> grid;
            for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
            for (int n : {4, 6, 8, 10})
                for (int m = 1; m <= 5; ++m) {
                    const PowerCurve curve = power_curve(n, m, 0.05, grid);
                    for (const auto& [theta, pw] : curve.points)
                        rows.push_back({n, m, theta, pw});
                }
            write_csv(dir / "figure5.csv", {"n", "m", "theta", "power"}, rows);
            written.push_back("figure5.csv");
        }

        for (const std::string& name : written)
            out << (fs::path(opts->out_dir) / name).string() << '\n';
    });
}

void setup_oracle(CLI::App& app, const Format& fmt, std::ostream& out) {
    struct Opts {
        std::string mode;
        int size = 0;
        double prob = 0.0;
        int trials = 1;
        int reps = 10000;
        std::uint64_t seed = 0;
    };
    auto opts = std::make_shared<Opts>();
    auto* cmd = app.add_subcommand(
        "oracle", "Brute-force references (enumeration and simulation)");
    cmd->group("");  // hidden from help
    cmd->add_option("--mode", opts->mode,
                    "classical, generalised or simulate")
        ->required();
    cmd->add_option("--size", opts->size, "items per game")->required();
    cmd->add_option("--prob", opts->prob, "knowledge probability")->capture_default_str();
    cmd->add_option("--trials", opts->trials, "games per rep")->capture_default_str();
    cmd->add_option("--reps", opts->reps, "simulation repetitions")->capture_default_str();
    cmd->add_option("--seed", opts->seed, "simulation seed")->capture_default_str();
    cmd->callback([opts, &fmt, &out] {
        Output o;
        o.command = "oracle";
        o.params["mode"] = opts->mode;
        o.params["size"] = opts->size;
        o.columns = {"t", "prob"};
        if (opts->mode == "classical") {
            const auto dist = oracle::enumerate_classical(opts->size);
            for (std::size_t k = 0; k < dist.probs.size(); ++k)
                o.rows.push_back({static_cast<long long>(k), dist.probs[k]});
        } else if (opts->mode == "generalised") {
            o.params["prob"] = opts->prob;
            const auto dist =
                oracle::enumerate_generalised(opts->size, opts->prob);
            for (std::size_t k = 0; k < dist.probs.size(); ++k)
                o.rows.push_back({static_cast<long long>(k), dist.probs[k]});
        } else if (opts->mode == "simulate") {
            o.params["prob"] = opts->prob;
            o.params["trials"] = opts->trials;
            o.params["reps"] = opts->reps;
            o.params["seed"] = opts->seed;
            const auto pmf = oracle::simulate_two_step(
                opts->size, opts->prob, opts->trials, opts->reps, opts->seed);
            for (std::size_t t = 0; t < pmf.size(); ++t)
                o.rows.push_back({static_cast<long long>(t), pmf[t]});
        } else {
            throw CLI::ValidationError(
                "--mode", "expected classical, generalised or simulate");
        }
        emit(o, fmt, out);
    });
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
    CLI::App app{
        "Distributions of matches in allocation games: probabilities, "
        "moments, estimation and tests"};
    app.require_subcommand(1);
    app.fallthrough();

    Format fmt = Format::csv;
    app.add_option_function<std::string>(
           "--format",
           [&fmt](const std::string& text) {
               if (text == "csv")
                   fmt = Format::csv;
               else if (text == "json")
                   fmt = Format::json;
               else
                   throw CLI::ValidationError(
                       "--format", "expected csv or json, got '" + text + "'");
           },
           "output format: csv or json (default csv)")
        ->expected(1);

    setup_pmf(app, fmt, out);
    setup_cdf(app, fmt, out);
    setup_quantile(app, fmt, out);
    setup_sample(app, fmt, out);
    setup_hdr(app, fmt, out);
    setup_moments(app, fmt, out);
    setup_mle(app, fmt, out);
    setup_test(app, fmt, out);
    setup_power(app, fmt, out);
    setup_figures(app, out);
    setup_oracle(app, fmt, out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace matchdist::cli
