#include "motiflets/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "motiflets/io.hpp"

namespace motiflets {

using nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string_view to_string(FlatPolicy p) {
    return p == FlatPolicy::kStrict ? "strict" : "zero-vector";
}

ordered_json config_echo(const RunConfig& c) {
    ordered_json j;
    j["command"] = to_string(c.command);
    if (c.command == Command::kFixture) {
        j["kind"] = to_string(c.fixture_kind);
        j["seed"] = c.seed;
        j["length"] = c.fixture.length;
        j["period"] = c.fixture.period;
        j["copies"] = c.fixture.copies;
        j["noise"] = c.fixture.noise;
        return j;
    }
    j["input"] = c.input;
    j["column"] = c.column ? ordered_json(*c.column) : ordered_json(nullptr);
    if (c.window) {
        j["l"] = *c.window;
    } else {
        j["l_range"] = c.window_range;
    }
    if (c.k) {
        j["k"] = *c.k;
    }
    if (c.k_max) {
        j["k_max"] = *c.k_max;
    }
    if (c.command != Command::kMatrixDump) {
        j["mode"] = to_string(c.mode);
        j["alpha"] = c.alpha;
        j["subset_ceiling"] = c.subset_ceiling;
    }
    j["memory_budget"] = c.memory_budget;
    j["flat_policy"] = to_string(c.flat_policy);
    return j;
}

ordered_json series_summary(const SeriesView<double>& view, const DistanceSource<double>& source) {
    ordered_json j;
    j["length"] = view.length();
    j["windows"] = view.count();
    j["flat_windows"] = [&] {
        Index n = 0;
        for (Index i = 0; i < view.count(); ++i) {
            n += view.flat(i) ? 1 : 0;
        }
        return n;
    }();
    j["storage"] = source.materialized() ? "materialized" : "on-demand";
    return j;
}

std::ofstream open_text(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    return out;
}

void write_ef_curve(const std::string& path, const ExtentProfile& p) {
    auto out = open_text(path);
    out.precision(17);
    out << "k,extent,elbow\n";
    for (Index k = 2; k <= p.k_max; ++k) {
        const bool elbow = std::find(p.elbows.begin(), p.elbows.end(), k) != p.elbows.end();
        out << k << ',' << p.extent(k) << ',' << (elbow ? 1 : 0) << '\n';
    }
}

void write_length_curve(const std::string& path, const LengthSelection& sel) {
    auto out = open_text(path);
    out.precision(17);
    out << "l,au_ef,elbow_count\n";
    for (const auto& s : sel.scores) {
        out << s.window << ',' << s.au_ef << ',' << s.elbow_count << '\n';
    }
}

ordered_json run_discover(const RunConfig& c, const Eigen::VectorXd& series, ordered_json& timing) {
    const SeriesView<double> view(series, *c.window, c.flat_policy);
    auto t0 = Clock::now();
    const auto source = DistanceSource<double>::compute(view, StoragePolicy::kAutomatic,
                                                        c.memory_budget, c.threads);
    timing["distances_seconds"] = seconds_since(t0);

    ordered_json doc;
    doc["series"] = series_summary(view, source);
    t0 = Clock::now();
    SearchOptions options;
    options.subset_ceiling = c.subset_ceiling;
    ordered_json stats = nullptr;
    Motiflet m;
    switch (c.mode) {
        case Exactness::kApproximate: {
            auto r = approx_k_motiflet(source, *c.k, options);
            m = std::move(r.motiflet);
            stats = to_json(r.state);
            break;
        }
        case Exactness::kExact: {
            auto r = exact_k_motiflet(source, *c.k, options);
            m = std::move(r.motiflet);
            stats = to_json(r.state);
            break;
        }
        case Exactness::kOracle: m = oracle_k_motiflet(source, *c.k, c.oracle_limits); break;
    }
    timing["search_seconds"] = seconds_since(t0);
    doc["motiflets"] = ordered_json::array({to_json(m)});
    doc["search"] = stats;
    return doc;
}

ProfileOptions profile_options(const RunConfig& c) {
    ProfileOptions p;
    p.alpha = c.alpha;
    p.subset_ceiling = c.subset_ceiling;
    p.oracle_limits = c.oracle_limits;
    return p;
}

ordered_json recommended_motiflets(const ExtentProfile& p) {
    auto out = ordered_json::array();
    for (Index k : p.recommended) {
        out.push_back(to_json(p.motiflets.at(static_cast<std::size_t>(k - 2))));
    }
    return out;
}

ordered_json run_learn_k(const RunConfig& c, const Eigen::VectorXd& series, ordered_json& timing) {
    const SeriesView<double> view(series, *c.window, c.flat_policy);
    auto t0 = Clock::now();
    const auto source = DistanceSource<double>::compute(view, StoragePolicy::kAutomatic,
                                                        c.memory_budget, c.threads);
    timing["distances_seconds"] = seconds_since(t0);
    t0 = Clock::now();
    const auto profile = extent_function(source, *c.k_max, c.mode, profile_options(c));
    timing["search_seconds"] = seconds_since(t0);

    ordered_json doc;
    doc["series"] = series_summary(view, source);
    doc["profile"] = to_json(profile, c.alpha);
    doc["motiflets"] = recommended_motiflets(profile);
    if (!c.curves.empty()) {
        write_ef_curve(c.curves, profile);
    }
    return doc;
}

ordered_json run_learn_length(const RunConfig& c, const Eigen::VectorXd& series,
                              ordered_json& timing) {
    LengthOptions options;
    options.profile = profile_options(c);
    options.memory_budget = c.memory_budget;
    options.threads = c.threads;
    const auto t0 = Clock::now();
    const auto sel = select_length(series, c.window_range, *c.k_max, options);
    timing["search_seconds"] = seconds_since(t0);

    ordered_json doc;
    doc["series"] = {{"length", series.size()}};
    auto scores = ordered_json::array();
    for (const auto& s : sel.scores) {
        scores.push_back({{"l", s.window}, {"au_ef", s.au_ef}, {"elbow_count", s.elbow_count}});
    }
    doc["length_scores"] = std::move(scores);
    doc["best_l"] = sel.best_window;
    for (const auto& p : sel.profiles) {
        if (p.window == sel.best_window) {
            doc["profile"] = to_json(p, c.alpha);
            doc["motiflets"] = recommended_motiflets(p);
        }
    }
    if (!c.curves.empty()) {
        write_length_curve(c.curves, sel);
    }
    return doc;
}

ordered_json run_fixture(const RunConfig& c) {
    const auto f = generate_fixture(c.fixture_kind, c.fixture, c.seed);
    write_series(c.series_out, f.values);
    ordered_json doc;
    doc["series"] = {{"path", c.series_out}, {"length", f.values.size()}, {"period", f.period}};
    doc["ground_truth"] = f.ground_truth;
    return doc;
}

ordered_json run_matrix_dump(const RunConfig& c, const Eigen::VectorXd& series) {
    const SeriesView<double> view(series, *c.window, c.flat_policy);
    const auto source = DistanceSource<double>::compute(view, StoragePolicy::kMaterialize,
                                                        c.memory_budget, c.threads);
    write_matrix_dump(c.matrix_out, source);
    ordered_json doc;
    doc["series"] = series_summary(view, source);
    doc["matrix"] = {{"path", c.matrix_out},
                     {"version", kMatrixDumpVersion},
                     {"rows", source.count()},
                     {"l", source.window()}};
    return doc;
}

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw ParameterError(message);
    }
}

}  // namespace

std::string_view to_string(Command command) noexcept {
    switch (command) {
        case Command::kDiscover: return "discover";
        case Command::kLearnK: return "learn-k";
        case Command::kLearnLength: return "learn-length";
        case Command::kFixture: return "fixture";
        case Command::kMatrixDump: return "matrix-dump";
    }
    return "unknown";
}

void validate(const RunConfig& c) {
    require(!(c.window && !c.window_range.empty()), "--l and --l-range are mutually exclusive");
    require(c.alpha > 0.0, "alpha must be positive");
    require(c.subset_ceiling > 0.0, "subset ceiling must be positive");
    switch (c.command) {
        case Command::kDiscover:
            require(!c.input.empty(), "discover needs --input");
            require(c.window.has_value(), "discover needs --l");
            require(c.k.has_value(), "discover needs --k");
            break;
        case Command::kLearnK:
            require(!c.input.empty(), "learn-k needs --input");
            require(c.window.has_value(), "learn-k needs --l");
            require(c.k_max.has_value(), "learn-k needs --k-max");
            break;
        case Command::kLearnLength:
            require(!c.input.empty(), "learn-length needs --input");
            require(!c.window_range.empty(), "learn-length needs --l-range");
            require(c.k_max.has_value(), "learn-length needs --k-max");
            require(c.mode == Exactness::kApproximate, "learn-length runs in approx mode only");
            break;
        case Command::kFixture:
            require(!c.series_out.empty(), "fixture needs --output-series");
            break;
        case Command::kMatrixDump:
            require(!c.input.empty(), "matrix-dump needs --input");
            require(c.window.has_value(), "matrix-dump needs --l");
            require(!c.matrix_out.empty(), "matrix-dump needs --matrix");
            break;
    }
    if (c.command == Command::kDiscover || c.command == Command::kLearnK) {
        const Index k = c.k.value_or(c.k_max.value_or(0));
        require(c.mode != Exactness::kOracle || k <= c.oracle_limits.max_k,
                "oracle mode is limited to k <= " + std::to_string(c.oracle_limits.max_k));
    }
}

std::uint64_t memory_budget_from_env(std::uint64_t fallback) {
    if (const char* v = std::getenv("MOTIFLETS_MEMORY_BUDGET"); v != nullptr && *v != '\0') {
        return parse_byte_size(v);
    }
    return fallback;
}

ordered_json run(const RunConfig& config) {
    validate(config);
    const auto start = Clock::now();
    ordered_json timing;

    ordered_json doc;
    doc["format"] = "motiflets-result";
    doc["format_version"] = 1;
    doc["config"] = config_echo(config);

    Eigen::VectorXd series;
    if (config.command != Command::kFixture) {
        const auto t0 = Clock::now();
        series = load_series(config.input, config.column);
        timing["load_seconds"] = seconds_since(t0);
    }

    ordered_json body;
    switch (config.command) {
        case Command::kDiscover: body = run_discover(config, series, timing); break;
        case Command::kLearnK: body = run_learn_k(config, series, timing); break;
        case Command::kLearnLength: body = run_learn_length(config, series, timing); break;
        case Command::kFixture: body = run_fixture(config); break;
        case Command::kMatrixDump: body = run_matrix_dump(config, series); break;
    }
    for (auto& [key, value] : body.items()) {
        doc[key] = std::move(value);
    }
    timing["total_seconds"] = seconds_since(start);
    doc["timings"] = std::move(timing);
    return doc;
}

double rescore_extent(const Eigen::VectorXd& series, Index window,
                      const std::vector<Index>& offsets, FlatPolicy policy) {
    const SeriesView<double> view(series, window, policy);
    double worst = 0.0;
    for (std::size_t a = 0; a < offsets.size(); ++a) {
        for (std::size_t b = a + 1; b < offsets.size(); ++b) {
            worst = std::max(worst, znorm_distance_naive(view, {offsets[a], offsets[b]}));
        }
    }
    return worst;
}

ordered_json error_document(ErrorCode code, const std::string& message) {
    ordered_json e;
    e["code"] = static_cast<int>(code);
    e["kind"] = to_string(code);
    e["message"] = message;
    return {{"error", std::move(e)}};
}

ordered_json to_json(const Motiflet& m) {
    ordered_json j;
    j["k"] = m.k();
    j["l"] = m.window;
    j["offsets"] = m.offsets;
    j["extent"] = m.extent;
    j["exactness"] = to_string(m.exactness);
    return j;
}

ordered_json to_json(const SearchState& state) {
    ordered_json j;
    j["queries"] = state.stats.queries;
    j["candidates_examined"] = state.stats.candidates_examined;
    j["pruned"] = state.stats.pruned;
    j["subsets_enumerated"] = state.stats.subsets_enumerated;
    j["incumbent_updates"] = state.stats.incumbent_updates;
    j["estimated_subsets"] = state.stats.estimated_subsets;
    auto trace = ordered_json::array();
    for (double sq : state.trace) {
        trace.push_back(std::sqrt(sq));
    }
    j["incumbent_trace"] = std::move(trace);
    return j;
}

ordered_json to_json(const ExtentProfile& p, double alpha) {
    ordered_json j;
    j["l"] = p.window;
    j["k_max"] = p.k_max;
    j["requested_k_max"] = p.requested_k_max;
    j["truncated"] = p.truncated;
    j["mode"] = to_string(p.mode);
    j["alpha"] = alpha;
    auto curve = ordered_json::array();
    for (Index k = 2; k <= p.k_max; ++k) {
        curve.push_back({{"k", k}, {"extent", p.extent(k)}});
    }
    j["extent_function"] = std::move(curve);
    j["elbows"] = p.elbows;
    j["recommended_k"] = p.recommended;
    j["monotonicity_violations"] = p.monotonicity_violations;
    j["au_ef"] = au_ef(p).au_ef;
    return j;
}

}  // namespace motiflets
