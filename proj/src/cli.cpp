#include "sparsegof/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "sparsegof/datasets.hpp"
#include "sparsegof/error.hpp"
#include "sparsegof/io.hpp"
#include "sparsegof/simulation.hpp"
#include "sparsegof/tables.hpp"

namespace sparsegof::cli {

namespace {

struct CommonTestOptions {
    double alpha = 0.05;
    double h = 0.1;
    double lambda = 2.0 / 3.0;
    std::optional<double> epsilon;
    std::string format = "json";
    std::string output;
};

struct SimulationOptions {
    std::string sampling = "f1";
    std::string null = "f1";
    std::int64_t n = 400;
    std::int64_t reps = 1000;
    std::uint64_t seed = 0;
    std::vector<double> alphas = {0.01, 0.05, 0.1};
    double h = 0.1;
    std::optional<double> epsilon;
    unsigned workers = 0;
    std::string records;
    std::string format = "json";
    std::string output;
};

void add_test_options(CLI::App* cmd, CommonTestOptions& o) {
    cmd->add_option("--alpha", o.alpha, "Significance level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    cmd->add_option("--h", o.h, "Convex weight placing b between b_min and 1")->capture_default_str();
    cmd->add_option("--lambda", o.lambda, "Power-divergence index for the rc statistic")->capture_default_str();
    cmd->add_option("--epsilon", o.epsilon, "Absolute gap below a_max (default: 1e-4 of the interval width)");
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    cmd->add_option("-o,--output", o.output, "Write the report here instead of stdout");
}

void add_simulation_options(CLI::App* cmd, SimulationOptions& o) {
    cmd->add_option("--sampling", o.sampling, "Generating distribution: f1..f4, fp1..fp4 or a file")->capture_default_str();
    cmd->add_option("--null", o.null, "Null distribution: f1..f4, fp1..fp4 or a file")->capture_default_str();
    cmd->add_option("--n", o.n, "Sample size per replicate")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--reps", o.reps, "Number of replicates")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--seed", o.seed, std::string("Master seed (default from ") + kSeedEnv + " or " +
                                          std::to_string(kDefaultSeed) + ")");
    cmd->add_option("--alphas", o.alphas, "Levels for rejection rates")->delimiter(',')->capture_default_str();
    cmd->add_option("--h", o.h, "Convex weight placing b between b_min and 1")->capture_default_str();
    cmd->add_option("--epsilon", o.epsilon, "Absolute gap below a_max");
    cmd->add_option("--workers", o.workers, "Worker threads (0 = all cores); results do not depend on it");
    cmd->add_option("-o,--output", o.output, "Write the report here instead of stdout");
}

TestConfig to_config(const CommonTestOptions& o) {
    TestConfig cfg;
    cfg.alpha = o.alpha;
    cfg.h = o.h;
    cfg.lambda = o.lambda;
    cfg.epsilon.absolute = o.epsilon;
    return cfg;
}

// Writes to the requested file, or to out when no path is given.
template <class Writer>
void emit(const std::string& path, std::ostream& out, Writer write) {
    if (path.empty()) {
        write(out);
        return;
    }
    std::ofstream file(path);
    if (!file) throw Error("cannot write '" + path + "'");
    write(file);
}

int emit_test_report(const TestReport& report, const CommonTestOptions& o, std::ostream& out) {
    emit(o.output, out, [&](std::ostream& os) {
        if (o.format == "csv") {
            write_test_report_csv(os, report);
        } else {
            os << to_json(report).dump(2) << '\n';
        }
    });
    return report.combined == Decision::reject ? kExitReject : kExitAccept;
}

SimulationReport simulate(const SimulationOptions& o, bool seed_given) {
    SimConfig cfg;
    cfg.sampling_probs = resolve_distribution(o.sampling);
    cfg.null_probs = resolve_distribution(o.null);
    cfg.n = o.n;
    cfg.reps = o.reps;
    cfg.seed = seed_given ? o.seed : default_seed();
    cfg.alphas = o.alphas;
    cfg.h = o.h;
    cfg.epsilon.absolute = o.epsilon;
    cfg.workers = o.workers;
    return run_simulation(cfg);
}

void list_datasets(std::ostream& out) {
    for (const auto& d : embedded_datasets()) {
        const auto clean = preprocess(d.table);
        out << d.name << '\t' << d.table.rows() << 'x' << d.table.cols() << " raw, " << clean.rows() << 'x'
            << clean.cols() << " preprocessed, n=" << d.table.total() << '\t' << d.description << '\n';
    }
}

}  // namespace

std::uint64_t default_seed() {
    if (const char* env = std::getenv(kSeedEnv)) {
        std::uint64_t value = 0;
        const std::string_view s(env);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec == std::errc() && ptr == s.data() + s.size() && !s.empty()) return value;
    }
    return kDefaultSeed;
}

std::vector<double> resolve_distribution(const std::string& spec) {
    static const std::vector<std::pair<std::string, ReferenceDistribution>> names = {
        {"1", ReferenceDistribution::f1}, {"2", ReferenceDistribution::f2},
        {"3", ReferenceDistribution::f3}, {"4", ReferenceDistribution::f4}};
    for (const auto& [suffix, which] : names) {
        if (spec == "f" + suffix) return table1_distribution(which);
        if (spec == "fp" + suffix || spec == "f'" + suffix) return perturb(table1_distribution(which));
    }
    return read_number_file(spec);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Goodness-of-fit tests for sparse multinomial vectors and contingency tables"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);

    CommonTestOptions test_opts;
    std::string input;
    std::string dataset;
    auto* test = app.add_subcommand("test", "Independence test of a two-way table");
    auto* input_opt = test->add_option("-i,--input", input, "Table CSV file");
    test->add_option("--dataset", dataset, "Embedded dataset name")->excludes(input_opt);
    add_test_options(test, test_opts);

    CommonTestOptions gof_opts;
    std::string counts_path;
    std::string null_spec;
    std::int64_t estimated = 0;
    auto* gof = app.add_subcommand("gof", "Goodness-of-fit test of a count vector against a null vector");
    gof->add_option("--counts", counts_path, "File of observed counts")->required();
    gof->add_option("--null", null_spec, "Null probabilities: f1..f4, fp1..fp4 or a file")->required();
    gof->add_option("--params", estimated, "Parameters estimated for the null (lowers df)")->capture_default_str();
    add_test_options(gof, gof_opts);

    SimulationOptions sim_opts;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo type I risk / power study");
    add_simulation_options(sim, sim_opts);
    sim->add_option("--records", sim_opts.records, "Also write per-replicate CSV to this file");
    sim->add_option("--format", sim_opts.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    SimulationOptions q_opts;
    auto* quant = app.add_subcommand("quantiles", "Per-zero-count 0.95 quantiles as CSV");
    add_simulation_options(quant, q_opts);

    std::string show;
    auto* ds = app.add_subcommand("datasets", "List embedded datasets");
    ds->add_option("--show", show, "Print one dataset as table CSV");

    std::vector<const char*> argv{"sparsegof"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitError;
    }

    try {
        if (test->parsed()) {
            if (input.empty() == dataset.empty()) throw Error("test: give exactly one of --input or --dataset");
            const auto table = input.empty() ? find_dataset(dataset).table : read_table_csv(input);
            return emit_test_report(run_independence_test(table, to_config(test_opts)), test_opts, out);
        }
        if (gof->parsed()) {
            const auto counts = read_counts_file(counts_path);
            const auto null = resolve_distribution(null_spec);
            return emit_test_report(run_gof_test(counts, null, to_config(gof_opts), estimated), gof_opts, out);
        }
        if (sim->parsed()) {
            const auto report = simulate(sim_opts, sim->count("--seed") > 0);
            if (!sim_opts.records.empty()) {
                emit(sim_opts.records, out, [&](std::ostream& os) { write_records_csv(os, report.records); });
            }
            emit(sim_opts.output, out, [&](std::ostream& os) {
                if (sim_opts.format == "csv") {
                    write_simulation_csv(os, report);
                } else {
                    os << to_json(report).dump(2) << '\n';
                }
            });
            return kExitAccept;
        }
        if (quant->parsed()) {
            const auto report = simulate(q_opts, quant->count("--seed") > 0);
            emit(q_opts.output, out, [&](std::ostream& os) { write_quantiles_csv(os, report); });
            return kExitAccept;
        }
        if (ds->parsed()) {
            if (show.empty()) {
                list_datasets(out);
            } else {
                write_table_csv(out, find_dataset(show).table);
            }
            return kExitAccept;
        }
    } catch (const ParseError& e) {
        err << "error: " << e.what() << " (line " << e.line << ", column " << e.column << ")\n";
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace sparsegof::cli
