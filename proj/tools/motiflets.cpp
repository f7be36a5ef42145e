#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "motiflets/io.hpp"
#include "motiflets/run.hpp"

namespace {

using motiflets::Command;
using motiflets::Exactness;
using motiflets::RunConfig;

struct Flags {
    std::string l_range;
    std::string memory_budget;
    std::string mode = "approx";
    std::string kind = "planted-motif";
    std::string output;
    bool strict_flat = false;
};

void add_series_options(CLI::App* cmd, RunConfig& c, Flags& f) {
    cmd->add_option("-i,--input", c.input, "series file (single column, delimited or whitespace)")
            ->required();
    cmd->add_option("--column", c.column, "column name or 0-based index");
    cmd->add_option("--memory-budget", f.memory_budget,
                    "distance matrix budget, e.g. 512M (env MOTIFLETS_MEMORY_BUDGET)");
    cmd->add_flag("--strict-flat", f.strict_flat, "reject constant windows instead of zeroing them");
    cmd->add_option("--threads", c.threads, "worker threads, 0 = all cores");
    cmd->add_option("-o,--output", f.output, "result document path (default stdout)");
}

void add_search_options(CLI::App* cmd, RunConfig& c, Flags& f) {
    cmd->add_option("--mode", f.mode, "approx, exact or oracle")
            ->check(CLI::IsMember({"approx", "approximate", "exact", "oracle"}));
    cmd->add_option("--subset-ceiling", c.subset_ceiling,
                    "exact mode: refuse runs whose candidate estimate exceeds this");
}

void write_document(const nlohmann::ordered_json& doc, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << doc.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw motiflets::IoError("cannot write " + path);
    }
    out << doc.dump(2) << '\n';
}

int fail(motiflets::ErrorCode code, const std::string& message) {
    std::cerr << motiflets::error_document(code, message).dump() << '\n';
    return static_cast<int>(code);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-Motiflets: motif sets of unknown size in time series"};
    app.require_subcommand(1);
    RunConfig c;
    Flags f;

    auto* discover = app.add_subcommand("discover", "top k-motiflet at fixed k and l");
    add_series_options(discover, c, f);
    add_search_options(discover, c, f);
    discover->add_option("-l,--l", c.window, "window length")->required();
    discover->add_option("-k,--k", c.k, "motif set size")->required();

    auto* learn_k = app.add_subcommand("learn-k", "extent function and elbows at fixed l");
    add_series_options(learn_k, c, f);
    add_search_options(learn_k, c, f);
    learn_k->add_option("-l,--l", c.window, "window length")->required();
    learn_k->add_option("--k-max", c.k_max, "largest k to evaluate")->required();
    learn_k->add_option("--alpha", c.alpha, "elbow slope-ratio threshold");
    learn_k->add_option("--curves", c.curves, "write k,extent,elbow CSV here");

    auto* learn_l = app.add_subcommand("learn-length", "AU_EF sweep over window lengths");
    add_series_options(learn_l, c, f);
    auto* l_single = learn_l->add_option("-l,--l", c.window, "single window length");
    auto* l_range = learn_l->add_option("--l-range", f.l_range,
                                        "a,b,c or min:max:step or min:max:xFACTOR");
    l_single->excludes(l_range);
    learn_l->add_option("--k-max", c.k_max, "largest k to evaluate")->required();
    learn_l->add_option("--alpha", c.alpha, "elbow slope-ratio threshold");
    learn_l->add_option("--curves", c.curves, "write l,au_ef,elbow_count CSV here");

    auto* fixture = app.add_subcommand("fixture", "generate a synthetic series");
    fixture->add_option("--kind", f.kind, "planted-motif, two-motif, random-walk or sine")
            ->check(CLI::IsMember({"planted-motif", "two-motif", "random-walk", "sine"}));
    fixture->add_option("--seed", c.seed, "generator seed");
    fixture->add_option("--length", c.fixture.length, "samples (0 = natural length)");
    fixture->add_option("--period", c.fixture.period, "template length or sine period");
    fixture->add_option("--copies", c.fixture.copies, "planted copies");
    fixture->add_option("--noise", c.fixture.noise, "noise sigma relative to amplitude");
    fixture->add_option("--series", c.series_out, "where to write the series")->required();
    fixture->add_option("-o,--output", f.output, "result document path (default stdout)");

    auto* dump = app.add_subcommand("matrix-dump", "write the squared z-ED matrix (binary)");
    add_series_options(dump, c, f);
    dump->add_option("-l,--l", c.window, "window length")->required();
    dump->add_option("--matrix", c.matrix_out, "binary output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::Error& e) {
        return fail(motiflets::ErrorCode::kParameter, e.what());
    }

    const std::map<CLI::App*, Command> commands{{discover, Command::kDiscover},
                                                {learn_k, Command::kLearnK},
                                                {learn_l, Command::kLearnLength},
                                                {fixture, Command::kFixture},
                                                {dump, Command::kMatrixDump}};
    c.command = commands.at(app.get_subcommands().front());

    try {
        c.mode = f.mode == "exact"    ? Exactness::kExact
                 : f.mode == "oracle" ? Exactness::kOracle
                                      : Exactness::kApproximate;
        c.flat_policy = f.strict_flat ? motiflets::FlatPolicy::kStrict
                                      : motiflets::FlatPolicy::kZeroVector;
        c.fixture_kind = *motiflets::parse_fixture_kind(f.kind);
        c.memory_budget = f.memory_budget.empty() ? motiflets::memory_budget_from_env()
                                                  : motiflets::parse_byte_size(f.memory_budget);
        if (!f.l_range.empty()) {
            c.window_range = motiflets::parse_window_range(f.l_range);
        } else if (c.command == Command::kLearnLength && c.window) {
            c.window_range = {*c.window};
            c.window.reset();
        }
        write_document(motiflets::run(c), f.output);
    } catch (const motiflets::Error& e) {
        return fail(e.code(), e.what());
    } catch (const std::bad_alloc&) {
        return fail(motiflets::ErrorCode::kResource, "out of memory");
    } catch (const std::exception& e) {
        std::cerr << "{\"error\":{\"code\":1,\"kind\":\"internal\",\"message\":"
                  << nlohmann::json(e.what()).dump() << "}}\n";
        return 1;
    }
    return 0;
}
