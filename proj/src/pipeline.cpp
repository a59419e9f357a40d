#include "trendflow/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "trendflow/backbone.hpp"
#include "trendflow/episodes.hpp"
#include "trendflow/export.hpp"
#include "trendflow/geocluster.hpp"
#include "trendflow/gmm.hpp"
#include "trendflow/stats.hpp"

namespace trendflow {

namespace fs = std::filesystem;

namespace {

using Json = nlohmann::ordered_json;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string cut_label(double cut) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", cut);
    return buf;
}

class ArtifactSink {
public:
    ArtifactSink(fs::path dir, Json& manifest) : dir_(std::move(dir)), manifest_(manifest) {}

    void write(const std::string& stage, const std::string& name, const std::function<void(std::ostream&)>& body) {
        std::ostringstream ss;
        body(ss);
        const std::string bytes = ss.str();
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
        manifest_["artifacts"].push_back({{"path", name}, {"stage", stage}, {"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}});
    }

    void write_json(const std::string& stage, const std::string& name, const Json& doc) {
        write(stage, name, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
    }

private:
    fs::path dir_;
    Json& manifest_;
};

struct Context {
    const PipelineConfig& config;
    std::ostream& log;
    ArtifactSink& sink;
    TrendEpisodeTable episodes;
    std::optional<DependenceNetwork> network;
    std::vector<std::string> warnings;  // of the stage being run
    Json summary = Json::object();

    void note(int level, const std::string& text) const {
        if (config.verbosity >= level) log << text << '\n';
    }
};

void run_stats(Context& ctx) {
    const auto& ep = ctx.episodes;
    const auto spreads = spread_stats(ep);
    ctx.sink.write("stats", "stats.csv", [&](std::ostream& o) { write_stats_csv(o, ep, spreads); });
    ctx.sink.write("stats", "spread_histogram.csv", [&](std::ostream& o) { write_histogram_csv(o, spread_histogram(ep)); });
    ctx.sink.write("stats", "lifetime_vs_locations.csv",
                   [&](std::ostream& o) { write_curve_csv(o, lifetime_vs(CurveAxis::n_locations, spreads), "n_locations"); });
    ctx.sink.write("stats", "lifetime_vs_entropy.csv",
                   [&](std::ostream& o) { write_curve_csv(o, lifetime_vs(CurveAxis::entropy, spreads), "entropy_nats"); });
    ctx.sink.write("stats", "lifetime_cdf.csv", [&](std::ostream& o) { write_cdf_csv(o, lifetime_cdf(ep)); });
    ctx.sink.write("stats", "run_length_cdf.csv", [&](std::ostream& o) { write_cdf_csv(o, run_length_cdf(ep)); });
    ctx.summary["trends"] = spreads.size();
}

void run_depnet(Context& ctx) {
    ctx.network = build_dependence_network(ctx.episodes, ctx.config.depnet_mode, ctx.config.lag_halflife);
    const auto& net = *ctx.network;
    const auto ids = location_ids(ctx.episodes.catalog(), net.nodes());
    const auto arcs = net.arcs();
    ctx.sink.write("depnet", "depnet_edges.csv", [&](std::ostream& o) { write_edge_list(o, ids, arcs); });
    ctx.sink.write("depnet", "depnet.dot", [&](std::ostream& o) { write_dot(o, "dependence", ids, arcs); });
    ctx.summary["mode"] = to_string(net.mode());
    ctx.summary["nodes"] = net.node_count();
    ctx.summary["arcs"] = arcs.size();
}

void run_backbone(Context& ctx) {
    const auto& net = ctx.network.value();
    const auto sides = ctx.config.out_only ? SignificanceSides::out_only : SignificanceSides::both;
    BackboneNetwork bb;
    if (ctx.config.alpha) {
        bb = extract_backbone(net, *ctx.config.alpha, sides);
    } else {
        TuneOptions opts;
        opts.sides = sides;
        bb = tune_alpha(net, opts).backbone;
    }
    if (!bb.connected()) ctx.warnings.push_back("backbone is not weakly connected at alpha " + format_number(bb.alpha()));
    const auto& catalog = ctx.episodes.catalog();
    const auto ids = location_ids(catalog, bb.nodes());
    const auto ranking = source_sink_ranking(bb);
    for (const auto& w : ranking.warnings) ctx.warnings.push_back(w);

    ctx.sink.write("backbone", "backbone_edges.csv", [&](std::ostream& o) { write_edge_list(o, ids, bb.arcs()); });
    ctx.sink.write("backbone", "backbone.dot", [&](std::ostream& o) { write_dot(o, "backbone", ids, bb.arcs()); });
    ctx.sink.write_json("backbone", "backbone.geojson", arcs_geojson(catalog, bb.nodes(), bb.arcs()));
    ctx.sink.write("backbone", "ranking.csv", [&](std::ostream& o) { write_ranking_csv(o, ids, ranking); });
    ctx.summary["alpha"] = bb.alpha();
    ctx.summary["tuned"] = !ctx.config.alpha.has_value();
    ctx.summary["arcs"] = bb.arcs().size();
    ctx.summary["connected"] = bb.connected();
}

void run_cluster(Context& ctx) {
    const auto sim = jaccard_matrix(ctx.episodes, &ctx.warnings);
    const auto ids = location_ids(ctx.episodes.catalog(), sim.locations());
    auto result = cluster(sim, ids, ctx.config.cuts);
    std::vector<std::string> tags;
    for (double c : ctx.config.cuts) tags.push_back("cut" + cut_label(c));
    if (auto k = ctx.config.cluster_count) {
        if (*k < 1 || *k > sim.size()) throw std::invalid_argument("cluster count out of range");
        result.models.push_back(make_cluster_model(sim, result.dendrogram.cut_clusters(*k), result.dendrogram.cut_distance_for(*k)));
        tags.push_back("k" + std::to_string(*k));
    }

    ctx.sink.write("cluster", "similarity.csv", [&](std::ostream& o) { write_similarity_csv(o, ids, sim); });
    ctx.sink.write("cluster", "dendrogram.nwk", [&](std::ostream& o) { o << result.dendrogram.newick(ids) << '\n'; });
    Json cuts = Json::array();
    for (std::size_t m = 0; m < result.models.size(); ++m) {
        const auto& model = result.models[m];
        const auto report = cluster_significance(sim, model);
        for (const auto& w : report.warnings) ctx.warnings.push_back(tags[m] + ": " + w);
        ctx.sink.write("cluster", "clusters_" + tags[m] + ".csv", [&](std::ostream& o) { write_assignment_csv(o, ids, model.labels); });
        ctx.sink.write("cluster", "kde_" + tags[m] + ".csv", [&](std::ostream& o) { write_kde_csv(o, model); });
        ctx.sink.write_json("cluster", "significance_" + tags[m] + ".json", significance_json(report));
        cuts.push_back({{"cut", model.cut}, {"clusters", model.cluster_count}, {"all_significant", report.all_significant()}});
    }
    ctx.summary["cuts"] = std::move(cuts);
}

void run_setters(Context& ctx) {
    const auto& ep = ctx.episodes;
    if (!ep.catalog().country_index()) throw DataError("setters stage needs a country-level location in the catalog");
    if (ep.country_rows().empty()) throw DataError("setters stage needs country-level trend rows; none found");

    const auto counts = count_before_after(ep, ctx.config.setter_mode, ctx.config.lag_halflife, ctx.config.kinds);
    for (const auto& w : counts.warnings) ctx.warnings.push_back(w);
    const auto points = counts.points();
    if (points.size() < 2) throw DataError("setters stage needs at least two cities");

    GmmOptions opts;
    opts.seed = ctx.config.seed;
    if (points.size() < 2 * opts.k_max) {
        opts.k_max = points.size() / 2;
        ctx.warnings.push_back("only " + std::to_string(points.size()) + " cities; K searched up to " + std::to_string(opts.k_max));
    }
    const auto model = fit_gmm(points, opts);
    for (const auto& w : model.warnings) ctx.warnings.push_back(w);
    const auto labeling = classify_cities(counts, model);
    const auto regressions = fit_class_regressions(counts, model);
    for (const auto& w : regressions.warnings) ctx.warnings.push_back(w);

    ctx.sink.write("setters", "setters_counts.csv",
                   [&](std::ostream& o) { write_counts_csv(o, ep.catalog(), counts, labeling); });
    Json model_doc = gmm_json(model);
    model_doc["mode"] = to_string(counts.mode);
    model_doc["country_trends"] = counts.country_trends;
    ctx.sink.write_json("setters", "setters_model.json", model_doc);
    ctx.sink.write_json("setters", "setters_regression.json", regression_json(regressions));
    ctx.summary["selected_k"] = model.selected_k;
    ctx.summary["trendsetters"] = labeling.trendsetters().size();
}

bool is_data_failure(const std::exception& e) {
    return dynamic_cast<const DataError*>(&e) || dynamic_cast<const std::invalid_argument*>(&e) ||
           dynamic_cast<const std::runtime_error*>(&e);
}

}  // namespace

std::string_view to_string(Stage stage) {
    switch (stage) {
        case Stage::stats: return "stats";
        case Stage::depnet: return "depnet";
        case Stage::backbone: return "backbone";
        case Stage::cluster: return "cluster";
        case Stage::setters: return "setters";
    }
    return "stats";
}

Stage stage_from_string(std::string_view name) {
    for (Stage s : all_stages()) {
        if (to_string(s) == name) return s;
    }
    throw std::invalid_argument("unknown stage '" + std::string(name) + "'");
}

const std::vector<Stage>& all_stages() {
    static const std::vector<Stage> stages{Stage::stats, Stage::depnet, Stage::backbone, Stage::cluster, Stage::setters};
    return stages;
}

fs::path PipelineConfig::catalog_path() const {
    if (catalog) return *catalog;
    fs::path p = input;
    return p.replace_filename(input.stem().string() + ".catalog.csv");
}

std::vector<Stage> PipelineConfig::resolved_stages() const {
    auto wanted = [&](Stage s) { return std::find(stages.begin(), stages.end(), s) != stages.end(); };
    std::vector<Stage> out;
    for (Stage s : all_stages()) {
        if (wanted(s) || (s == Stage::depnet && wanted(Stage::backbone))) out.push_back(s);
    }
    return out;
}

void apply_config_json(PipelineConfig& c, const nlohmann::json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("pipeline config must be a JSON object");
    static const std::vector<std::string> known{"input", "catalog", "format", "output_dir", "tick_seconds", "stages",
                                                "depnet", "backbone", "cluster", "setters", "verbosity"};
    for (const auto& [key, value] : doc.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::invalid_argument("unknown config key '" + key + "'");
    }
    try {
        if (doc.contains("input")) c.input = doc["input"].get<std::string>();
        if (doc.contains("catalog")) c.catalog = fs::path(doc["catalog"].get<std::string>());
        if (doc.contains("format")) c.format = log_format_from_string(doc["format"].get<std::string>());
        if (doc.contains("output_dir")) c.output_dir = doc["output_dir"].get<std::string>();
        if (doc.contains("tick_seconds")) c.tick_interval = Duration{doc["tick_seconds"].get<std::int64_t>()};
        if (doc.contains("verbosity")) c.verbosity = doc["verbosity"].get<int>();
        if (doc.contains("stages")) {
            c.stages.clear();
            for (const auto& s : doc["stages"]) {
                const auto name = s.get<std::string>();
                if (name == "all") c.stages = all_stages();
                else c.stages.push_back(stage_from_string(name));
            }
        }
        if (auto it = doc.find("depnet"); it != doc.end()) {
            if (it->contains("mode")) c.depnet_mode = weighting_mode_from_string((*it)["mode"].get<std::string>());
            if (it->contains("halflife_seconds")) c.lag_halflife = Duration{(*it)["halflife_seconds"].get<std::int64_t>()};
        }
        if (auto it = doc.find("backbone"); it != doc.end()) {
            if (it->contains("alpha")) {
                const auto& a = (*it)["alpha"];
                if (a.is_string() && a.get<std::string>() == "tune") c.alpha.reset();
                else c.alpha = a.get<double>();
            }
            if (it->contains("out_only")) c.out_only = (*it)["out_only"].get<bool>();
        }
        if (auto it = doc.find("cluster"); it != doc.end()) {
            if (it->contains("cuts")) c.cuts = (*it)["cuts"].get<std::vector<double>>();
            if (it->contains("clusters")) c.cluster_count = (*it)["clusters"].get<std::size_t>();
        }
        if (auto it = doc.find("setters"); it != doc.end()) {
            if (it->contains("mode")) c.setter_mode = weighting_mode_from_string((*it)["mode"].get<std::string>());
            if (it->contains("seed")) c.seed = (*it)["seed"].get<std::uint64_t>();
            if (it->contains("kind")) c.kinds = kind_filter_from_string((*it)["kind"].get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad config value: ") + e.what());
    }
}

Json config_to_json(const PipelineConfig& c) {
    Json stages = Json::array();
    for (Stage s : c.resolved_stages()) stages.push_back(to_string(s));
    Json cluster{{"cuts", c.cuts}};
    if (c.cluster_count) cluster["clusters"] = *c.cluster_count;
    return {
        {"input", c.input.generic_string()},
        {"catalog", c.catalog_path().generic_string()},
        {"format", c.format ? (*c.format == LogFormat::csv ? "csv" : "jsonl")
                            : (log_format_for_path(c.input.string()) == LogFormat::csv ? "csv" : "jsonl")},
        {"tick_seconds", c.tick_interval.count()},
        {"stages", std::move(stages)},
        {"depnet", {{"mode", to_string(c.depnet_mode)}, {"halflife_seconds", c.lag_halflife.count()}}},
        {"backbone", {{"alpha", c.alpha ? Json(*c.alpha) : Json("tune")}, {"out_only", c.out_only}}},
        {"cluster", std::move(cluster)},
        {"setters",
         {{"mode", to_string(c.setter_mode)},
          {"seed", c.seed},
          {"kind", c.kinds == KindFilter::both ? "both" : (c.kinds == KindFilter::hashtag ? "hashtag" : "phrase")}}},
    };
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

PipelineResult run_pipeline(const PipelineConfig& config, std::ostream& log) {
    PipelineResult result;
    Json& manifest = result.manifest;
    manifest = {{"tool", "trendflow"}, {"config", config_to_json(config)}, {"inputs", Json::array()},
                {"stages", Json::array()}, {"artifacts", Json::array()}, {"status", "ok"}};

    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) {
        result.status = ExitCode::data;
        result.error = "cannot create output directory '" + config.output_dir.string() + "': " + ec.message();
        return result;
    }
    ArtifactSink sink(config.output_dir, manifest);
    Context ctx{config, log, sink, {}, {}, {}, Json::object()};

    auto fail = [&](const std::string& stage, ExitCode code, const std::string& message) {
        result.status = code;
        result.error = stage + ": " + message;
        manifest["status"] = "failed";
        manifest["failure"] = {{"stage", stage}, {"kind", code == ExitCode::data ? "data" : "internal"}, {"message", message}};
    };
    auto guarded = [&](const std::string& stage, const std::function<void()>& body) {
        ctx.warnings.clear();
        ctx.summary = Json::object();
        ctx.note(1, "[" + stage + "] running");
        try {
            body();
        } catch (const std::exception& e) {
            fail(stage, is_data_failure(e) ? ExitCode::data : ExitCode::internal, e.what());
        } catch (...) {
            fail(stage, ExitCode::internal, "unknown error");
        }
        const bool ok = result.status == ExitCode::ok;
        for (const auto& w : ctx.warnings) ctx.note(1, "[" + stage + "] warning: " + w);
        manifest["stages"].push_back({{"stage", stage}, {"status", ok ? "ok" : "failed"}, {"summary", ctx.summary},
                                      {"warnings", ctx.warnings}});
        return ok;
    };

    bool ok = guarded("ingest", [&] {
        const fs::path catalog_path = config.catalog_path();
        const std::string catalog_bytes = read_file(catalog_path);
        const std::string log_bytes = read_file(config.input);
        manifest["inputs"].push_back({{"role", "catalog"}, {"path", catalog_path.generic_string()},
                                      {"sha256", sha256_hex(catalog_bytes)}, {"bytes", catalog_bytes.size()}});
        manifest["inputs"].push_back({{"role", "log"}, {"path", config.input.generic_string()},
                                      {"sha256", sha256_hex(log_bytes)}, {"bytes", log_bytes.size()}});
        std::istringstream cat_in(catalog_bytes);
        const auto catalog = read_catalog(cat_in);
        std::istringstream log_in(log_bytes);
        const auto format = config.format.value_or(log_format_for_path(config.input.string()));
        const auto parsed = parse_log(log_in, format, catalog, config.tick_interval);
        ctx.episodes = build_episodes(filter_promoted(parsed));
        ctx.summary["snapshots"] = parsed.snapshots().size();
        ctx.summary["locations"] = catalog.size();
        ctx.summary["city_rows"] = ctx.episodes.rows().size();
        ctx.summary["country_rows"] = ctx.episodes.country_rows().size();
        if (parsed.snapshots().empty()) ctx.warnings.push_back("no snapshots");
    });

    const std::vector<Stage> stages = config.resolved_stages();
    for (Stage s : stages) {
        const std::string name(to_string(s));
        if (!ok) {
            manifest["stages"].push_back({{"stage", name}, {"status", "skipped"}});
            continue;
        }
        ok = guarded(name, [&] {
            switch (s) {
                case Stage::stats: run_stats(ctx); break;
                case Stage::depnet: run_depnet(ctx); break;
                case Stage::backbone: run_backbone(ctx); break;
                case Stage::cluster: run_cluster(ctx); break;
                case Stage::setters: run_setters(ctx); break;
            }
        });
    }

    std::ofstream out(config.output_dir / "manifest.json", std::ios::binary | std::ios::trunc);
    out << manifest.dump(2) << '\n';
    if (!out && result.status == ExitCode::ok) {
        result.status = ExitCode::internal;
        result.error = "cannot write manifest";
    }
    return result;
}

}  // namespace trendflow
