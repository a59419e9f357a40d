// trendflow command-line front end.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "trendflow/log_io.hpp"
#include "trendflow/pipeline.hpp"
#include "trendflow/synth.hpp"

using namespace trendflow;
namespace fs = std::filesystem;

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kInternal = 3;

struct Flags {
    std::string input;
    std::string catalog;
    std::string format;
    std::string output_dir;
    std::string config_file;
    std::int64_t tick_seconds = 600;
    std::string depnet_mode = "uniform";
    std::int64_t halflife = 3600;
    double alpha = 0.0;
    bool tune = false;
    bool out_only = false;
    std::vector<double> cuts;
    std::size_t clusters = 0;
    std::string setter_mode = "uniform";
    std::uint64_t seed = 0;
    std::string kind = "both";
    std::vector<std::string> stages;
    bool all = false;
    int verbose = 0;
    bool quiet = false;
};

struct Options {
    CLI::Option* input = nullptr;
    CLI::Option* catalog = nullptr;
    CLI::Option* format = nullptr;
    CLI::Option* output_dir = nullptr;
    CLI::Option* tick = nullptr;
    CLI::Option* depnet_mode = nullptr;
    CLI::Option* halflife = nullptr;
    CLI::Option* alpha = nullptr;
    CLI::Option* tune = nullptr;
    CLI::Option* out_only = nullptr;
    CLI::Option* cuts = nullptr;
    CLI::Option* clusters = nullptr;
    CLI::Option* setter_mode = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* kind = nullptr;
    CLI::Option* stages = nullptr;
    CLI::Option* all = nullptr;
};

bool given(const CLI::Option* o) { return o && o->count() > 0; }

void add_io(CLI::App* app, Flags& f, Options& o, bool input_required) {
    o.input = app->add_option("input", f.input, "Snapshot log (.jsonl or .csv)");
    if (input_required) o.input->required();
    o.catalog = app->add_option("--catalog", f.catalog, "Location catalog CSV (default: <input stem>.catalog.csv)");
    o.format = app->add_option("--format", f.format, "Log format: jsonl | csv (default: by suffix)")
                   ->check(CLI::IsMember({"jsonl", "csv"}));
    o.tick = app->add_option("--tick-seconds", f.tick_seconds, "Snapshot interval in seconds")->check(CLI::PositiveNumber);
}

void add_stage_options(CLI::App* app, Flags& f, Options& o, Stage stage, bool all) {
    auto on = [&](Stage s) { return all || s == stage; };
    if (on(Stage::depnet) || on(Stage::backbone)) {
        o.depnet_mode = app->add_option(all ? "--depnet-mode" : "--mode", f.depnet_mode,
                                        "Precedence credit: uniform | lag | initiator");
        o.halflife = app->add_option("--halflife", f.halflife, "Lag discount half-life in seconds")->check(CLI::PositiveNumber);
    }
    if (on(Stage::backbone)) {
        auto* grp = app->add_option_group("alpha");
        o.alpha = grp->add_option("--alpha", f.alpha, "Disparity filter level in (0, 1]")->check(CLI::PositiveNumber & CLI::Range(0.0, 1.0));
        o.tune = grp->add_flag("--tune", f.tune, "Pick the smallest alpha keeping the backbone connected (default)");
        grp->require_option(0, 1);
        o.out_only = app->add_flag("--out-only", f.out_only, "Test arcs against the source's out-distribution only");
    }
    if (on(Stage::cluster)) {
        o.cuts = app->add_option("--cut", f.cuts, "Dendrogram cut distance (repeatable)")->check(CLI::Range(0.0, 1.0));
        o.clusters = app->add_option("--clusters", f.clusters, "Also cut at this many clusters")->check(CLI::PositiveNumber);
    }
    if (on(Stage::setters)) {
        o.setter_mode = app->add_option(all ? "--setters-mode" : "--mode", f.setter_mode,
                                        "Before-count credit: uniform | lag | initiator");
        if (!o.halflife)
            o.halflife = app->add_option("--halflife", f.halflife, "Lag discount half-life in seconds")->check(CLI::PositiveNumber);
        o.seed = app->add_option("--seed", f.seed, "Seed for the mixture fits");
        o.kind = app->add_option("--kind", f.kind, "Country-level trends to count: hashtag | phrase | both")
                     ->check(CLI::IsMember({"hashtag", "phrase", "both"}));
    }
}

// Defaults, then the config file, then explicitly given flags.
PipelineConfig make_config(const Flags& f, const Options& o, std::optional<Stage> single) {
    PipelineConfig c;
    if (!f.config_file.empty()) {
        std::ifstream in(f.config_file);
        if (!in) throw DataError("cannot open config file '" + f.config_file + "'");
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw DataError("config file '" + f.config_file + "' is not valid JSON: " + e.what());
        }
        apply_config_json(c, doc);
    }
    if (given(o.input)) c.input = f.input;
    if (given(o.catalog)) c.catalog = fs::path(f.catalog);
    if (given(o.format)) c.format = log_format_from_string(f.format);
    if (given(o.output_dir)) c.output_dir = f.output_dir;
    if (given(o.tick)) c.tick_interval = Duration{f.tick_seconds};
    if (given(o.depnet_mode)) c.depnet_mode = weighting_mode_from_string(f.depnet_mode);
    if (given(o.halflife)) c.lag_halflife = Duration{f.halflife};
    if (given(o.alpha)) c.alpha = f.alpha;
    if (given(o.tune)) c.alpha.reset();
    if (given(o.out_only)) c.out_only = f.out_only;
    if (given(o.cuts)) c.cuts = f.cuts;
    if (given(o.clusters)) c.cluster_count = f.clusters;
    if (given(o.setter_mode)) c.setter_mode = weighting_mode_from_string(f.setter_mode);
    if (given(o.seed)) c.seed = f.seed;
    if (given(o.kind)) c.kinds = kind_filter_from_string(f.kind);
    if (single) {
        c.stages = {*single};
    } else if (given(o.all)) {
        c.stages = all_stages();
    } else if (given(o.stages)) {
        c.stages.clear();
        for (const auto& s : f.stages) c.stages.push_back(stage_from_string(s));
    }
    if (f.quiet) c.verbosity = 0;
    else if (f.verbose > 0) c.verbosity = 1 + f.verbose;
    if (c.input.empty()) throw std::invalid_argument("no input log given");
    if (c.stages.empty()) throw std::invalid_argument("no stages selected (use --stages or --all)");
    return c;
}

int run(const PipelineConfig& config) {
    const auto result = run_pipeline(config, std::cerr);
    if (result.status != ExitCode::ok) std::cerr << "trendflow: " << result.error << '\n';
    return static_cast<int>(result.status);
}

int do_validate(const Flags& f) {
    PipelineConfig c;
    c.input = f.input;
    if (!f.catalog.empty()) c.catalog = fs::path(f.catalog);
    std::ifstream cat_in(c.catalog_path());
    if (!cat_in) throw DataError("cannot open catalog '" + c.catalog_path().string() + "'");
    const auto catalog = read_catalog(cat_in);
    std::ifstream in(f.input, std::ios::binary);
    if (!in) throw DataError("cannot open '" + f.input + "'");
    const auto format = f.format.empty() ? log_format_for_path(f.input) : log_format_from_string(f.format);
    const auto report = validate_log(in, format, catalog, Duration{f.tick_seconds});
    for (const auto& v : report.violations) std::cout << f.input << ":" << v.line << ": " << v.reason << '\n';
    for (const auto& n : report.notes) std::cout << f.input << ": " << n << '\n';
    std::cout << report.records << " records, " << report.snapshots << " snapshots, " << report.violations.size()
              << " violations\n";
    return report.clean() ? 0 : kData;
}

struct SynthFlags {
    std::uint64_t seed = 1;
    std::string preset = "paper-like";
    std::string config_file;
    std::string output;
    std::string truth;
    std::string catalog;
    std::string format;
};

int do_synth(const SynthFlags& s, const CLI::App* app) {
    GeneratorConfig cfg = generator_preset(s.preset);
    if (!s.config_file.empty()) {
        std::ifstream in(s.config_file);
        if (!in) throw DataError("cannot open config file '" + s.config_file + "'");
        cfg = config_from_json(nlohmann::json::parse(in), cfg);
    }
    if (app->count("--seed") > 0) cfg.seed = s.seed;
    const auto data = generate(cfg);

    const fs::path out_path = s.output;
    fs::path catalog_path = s.catalog.empty() ? fs::path(out_path).replace_filename(out_path.stem().string() + ".catalog.csv")
                                              : fs::path(s.catalog);
    const auto format = s.format.empty() ? log_format_for_path(s.output) : log_format_from_string(s.format);
    for (const fs::path& p : {out_path, catalog_path, fs::path(s.truth)}) {
        std::error_code ec;
        if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream log_out(out_path, std::ios::binary | std::ios::trunc);
    if (!log_out) throw DataError("cannot write '" + s.output + "'");
    write_log(log_out, data.log, format);
    std::ofstream cat_out(catalog_path, std::ios::binary | std::ios::trunc);
    if (!cat_out) throw DataError("cannot write '" + catalog_path.string() + "'");
    write_catalog(cat_out, data.log.catalog());
    if (!s.truth.empty()) {
        std::ofstream truth_out(s.truth, std::ios::binary | std::ios::trunc);
        if (!truth_out) throw DataError("cannot write '" + s.truth + "'");
        truth_out << truth_to_json(data.truth, data.log, cfg).dump() << '\n';
    }
    std::cerr << "wrote " << data.log.snapshots().size() << " snapshots to " << s.output << ", catalog "
              << catalog_path.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatio-temporal trend analysis over per-location top-10 snapshot logs"};
    app.require_subcommand(1);
    Flags f;

    // a plain int-bound flag is counted as present whenever -q is given
    auto* verbose = app.add_flag_function(
        "-v,--verbose", [&f](std::int64_t n) { f.verbose = static_cast<int>(n); }, "More progress output (repeatable)");
    app.add_flag("-q,--quiet", f.quiet, "No progress output")->excludes(verbose);

    SynthFlags sf;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic log with planted ground truth");
    synth->add_option("--seed", sf.seed, "Generator seed");
    synth->add_option("--preset", sf.preset, "paper-like | small")->check(CLI::IsMember({"paper-like", "small"}));
    synth->add_option("--config", sf.config_file, "Generator config JSON (overrides the preset)");
    synth->add_option("-o,--output", sf.output, "Output log path")->required();
    synth->add_option("--truth", sf.truth, "Ground-truth JSON path");
    synth->add_option("--catalog", sf.catalog, "Catalog output path (default: <output stem>.catalog.csv)");
    synth->add_option("--format", sf.format, "jsonl | csv (default: by suffix)")->check(CLI::IsMember({"jsonl", "csv"}));

    Options vo;
    auto* validate = app.add_subcommand("validate", "Report every invalid record in a log");
    add_io(validate, f, vo, true);

    struct StageCommand {
        Stage stage;
        const char* help;
        CLI::App* app = nullptr;
        Options opts;
    };
    std::vector<StageCommand> stage_commands{
        {Stage::stats, "Spread, lifetime and entropy statistics"},
        {Stage::depnet, "Temporal dependence network"},
        {Stage::backbone, "Disparity-filter backbone and source-sink ranking"},
        {Stage::cluster, "Trend-sharing clusters of cities"},
        {Stage::setters, "Trendsetter and follower classification"},
    };
    for (auto& sc : stage_commands) {
        sc.app = app.add_subcommand(std::string(to_string(sc.stage)), sc.help);
        add_io(sc.app, f, sc.opts, true);
        sc.opts.output_dir = sc.app->add_option("-o,--output-dir", f.output_dir, "Artifact directory");
        sc.app->add_option("--config", f.config_file, "Pipeline config JSON");
        add_stage_options(sc.app, f, sc.opts, sc.stage, false);
    }

    Options ro;
    auto* run_cmd = app.add_subcommand("run", "Run several stages and write a manifest");
    add_io(run_cmd, f, ro, false);
    ro.output_dir = run_cmd->add_option("-o,--output-dir", f.output_dir, "Artifact directory");
    run_cmd->add_option("--config", f.config_file, "Pipeline config JSON");
    ro.stages = run_cmd->add_option("--stages", f.stages, "Stages to run: stats,depnet,backbone,cluster,setters")
                    ->delimiter(',');
    ro.all = run_cmd->add_flag("--all", f.all, "Run every stage")->excludes(ro.stages);
    add_stage_options(run_cmd, f, ro, Stage::stats, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (synth->parsed()) return do_synth(sf, synth);
        if (validate->parsed()) return do_validate(f);
        for (auto& sc : stage_commands) {
            if (sc.app->parsed()) return run(make_config(f, sc.opts, sc.stage));
        }
        if (run_cmd->parsed()) return run(make_config(f, ro, std::nullopt));
    } catch (const DataError& e) {
        std::cerr << "trendflow: " << e.what() << '\n';
        return kData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "trendflow: " << e.what() << '\n';
        return kUsage;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "trendflow: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "trendflow: internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kUsage;
}
