#include "trendflow/export.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "trendflow/log_io.hpp"

namespace trendflow {

namespace {

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

nlohmann::ordered_json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json();
}

nlohmann::ordered_json welch_json(const WelchResult& r) {
    return {{"t", number_or_null(r.t)},
            {"dof", number_or_null(r.dof)},
            {"p_value", number_or_null(r.p_value)},
            {"mean_a", r.mean_a},
            {"mean_b", r.mean_b}};
}

}  // namespace

std::string format_number(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::vector<std::string> location_ids(const LocationCatalog& catalog, const std::vector<LocationIndex>& nodes) {
    std::vector<std::string> out;
    out.reserve(nodes.size());
    for (auto n : nodes) out.push_back(catalog[n].id);
    return out;
}

void write_stats_csv(std::ostream& out, const TrendEpisodeTable& episodes, const std::vector<TrendSpread>& spreads) {
    out << "trend,kind,n_locations,lifetime_min,entropy_nats\n";
    for (const auto& s : spreads) {
        const auto& name = episodes.trend_name(s.trend);
        out << csv_escape(name.text) << ',' << to_string(name.kind) << ',' << s.n_locations << ','
            << format_number(s.lifetime_minutes) << ',' << format_number(s.entropy) << '\n';
    }
}

void write_histogram_csv(std::ostream& out, const std::vector<std::size_t>& histogram) {
    out << "n_locations,trends\n";
    for (std::size_t n = 1; n < histogram.size(); ++n) out << n << ',' << histogram[n] << '\n';
}

void write_curve_csv(std::ostream& out, const BinnedCurve& curve, const std::string& x_name) {
    out << x_name << ",mean_lifetime_min,std_error,count\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        out << format_number(curve.x[i]) << ',' << format_number(curve.mean[i]) << ','
            << format_number(curve.std_error[i]) << ',' << curve.count[i] << '\n';
    }
}

void write_cdf_csv(std::ostream& out, const LifetimeCdf& cdf) {
    out << "lifetime_min,cdf\n";
    const auto& v = cdf.sorted();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
        out << format_number(v[i]) << ',' << format_number(static_cast<double>(i + 1) / static_cast<double>(v.size()))
            << '\n';
    }
}

void write_edge_list(std::ostream& out, const std::vector<std::string>& ids, const std::vector<Arc>& arcs) {
    out << "src,dst,weight\n";
    for (const auto& a : arcs) {
        out << csv_escape(ids.at(a.source)) << ',' << csv_escape(ids.at(a.target)) << ',' << format_number(a.weight)
            << '\n';
    }
}

void write_dot(std::ostream& out, const std::string& graph_name, const std::vector<std::string>& ids,
               const std::vector<Arc>& arcs) {
    out << "digraph " << dot_quote(graph_name) << " {\n";
    for (const auto& id : ids) out << "  " << dot_quote(id) << ";\n";
    for (const auto& a : arcs) {
        out << "  " << dot_quote(ids.at(a.source)) << " -> " << dot_quote(ids.at(a.target))
            << " [weight=" << format_number(a.weight) << "];\n";
    }
    out << "}\n";
}

nlohmann::ordered_json arcs_geojson(const LocationCatalog& catalog, const std::vector<LocationIndex>& nodes,
                                    const std::vector<Arc>& arcs) {
    nlohmann::ordered_json features = nlohmann::ordered_json::array();
    for (const auto& a : arcs) {
        const auto& s = catalog[nodes.at(a.source)];
        const auto& t = catalog[nodes.at(a.target)];
        features.push_back({
            {"type", "Feature"},
            {"geometry",
             {{"type", "LineString"}, {"coordinates", {{s.longitude, s.latitude}, {t.longitude, t.latitude}}}}},
            {"properties", {{"src", s.id}, {"dst", t.id}, {"weight", a.weight}}},
        });
    }
    return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

void write_ranking_csv(std::ostream& out, const std::vector<std::string>& ids, const SourceSinkRanking& ranking) {
    out << "loc,omega,s_in,s_out,rank\n";
    for (auto node : ranking.order) {
        const auto& r = ranking.nodes.at(node);
        out << csv_escape(ids.at(r.node)) << ',' << (r.omega ? format_number(*r.omega) : "") << ','
            << format_number(r.s_in) << ',' << format_number(r.s_out) << ',' << r.rank << '\n';
    }
}

void write_assignment_csv(std::ostream& out, const std::vector<std::string>& ids, const std::vector<int>& labels) {
    out << "loc,cluster\n";
    for (std::size_t i = 0; i < ids.size(); ++i) out << csv_escape(ids[i]) << ',' << labels.at(i) << '\n';
}

void write_similarity_csv(std::ostream& out, const std::vector<std::string>& ids, const SimilarityMatrix& similarity) {
    out << "loc";
    for (const auto& id : ids) out << ',' << csv_escape(id);
    out << '\n';
    for (std::size_t i = 0; i < similarity.size(); ++i) {
        out << csv_escape(ids.at(i));
        for (std::size_t j = 0; j < similarity.size(); ++j) out << ',' << format_number(similarity(i, j));
        out << '\n';
    }
}

void write_kde_csv(std::ostream& out, const ClusterModel& model, std::size_t points) {
    out << "group,x,density\n";
    auto emit = [&](const std::string& group, const std::vector<double>& samples) {
        if (samples.size() < 2 || sample_variance(samples) == 0.0) return;
        const GaussianKde kde(samples);
        const double pad = 3.0 * kde.bandwidth();
        for (const auto& [x, d] : kde.grid(kde.min_sample() - pad, kde.max_sample() + pad, points)) {
            out << group << ',' << format_number(x) << ',' << format_number(d) << '\n';
        }
    };
    for (std::size_t c = 0; c < model.intra.size(); ++c) emit("intra_" + std::to_string(c), model.intra[c]);
    emit("inter", model.inter);
}

nlohmann::ordered_json significance_json(const SignificanceReport& report) {
    nlohmann::ordered_json tests = nlohmann::ordered_json::array();
    for (const auto& t : report.tests) {
        nlohmann::ordered_json row{{"kind", to_string(t.kind)}, {"cluster", t.cluster}};
        row["other"] = t.other < 0 ? nlohmann::ordered_json() : nlohmann::ordered_json(t.other);
        row["welch"] = welch_json(t.result);
        row["rejects"] = t.rejects;
        tests.push_back(std::move(row));
    }
    nlohmann::ordered_json clusters = nlohmann::ordered_json::array();
    for (const auto& v : report.clusters) {
        clusters.push_back({{"cluster", v.cluster}, {"members", v.members}, {"significant", v.significant}});
    }
    return {{"level", report.level},
            {"all_significant", report.all_significant()},
            {"clusters", std::move(clusters)},
            {"tests", std::move(tests)},
            {"warnings", report.warnings}};
}

void write_counts_csv(std::ostream& out, const LocationCatalog& catalog, const SetterFollowerCounts& counts,
                      const CityLabeling& labeling) {
    out << "loc,n_before,n_after,label\n";
    for (std::size_t i = 0; i < counts.cities.size(); ++i) {
        const auto& c = counts.cities[i];
        std::string label;
        if (i < labeling.roles.size() && labeling.roles[i]) label = std::string(to_string(*labeling.roles[i]));
        else if (i < labeling.component.size()) label = "component_" + std::to_string(labeling.component[i]);
        out << csv_escape(catalog[c.location].id) << ',' << format_number(c.n_before) << ','
            << format_number(c.n_after) << ',' << label << '\n';
    }
}

nlohmann::ordered_json gmm_json(const GmmModel& model) {
    nlohmann::ordered_json components = nlohmann::ordered_json::array();
    for (const auto& c : model.mixture.components()) {
        components.push_back({{"weight", c.weight},
                              {"mean", {c.mean.x, c.mean.y}},
                              {"covariance", {{c.cov.xx, c.cov.xy}, {c.cov.xy, c.cov.yy}}}});
    }
    nlohmann::ordered_json cv = nlohmann::ordered_json::array();
    for (const auto& row : model.cv) {
        nlohmann::ordered_json r{{"k", row.k}, {"failed", row.failed}};
        if (!row.failed) {
            r["mean_bic"] = row.mean_bic;
            r["mean_aic"] = row.mean_aic;
            r["bic"] = row.bic;
            r["aic"] = row.aic;
        }
        cv.push_back(std::move(r));
    }
    return {{"selected_k", model.selected_k},
            {"aic_k", model.aic_k()},
            {"log_likelihood", model.log_likelihood},
            {"components", std::move(components)},
            {"cv", std::move(cv)},
            {"warnings", model.warnings}};
}

nlohmann::ordered_json regression_json(const ClassRegressions& regressions) {
    nlohmann::ordered_json fits = nlohmann::ordered_json::array();
    for (const auto& f : regressions.fits) {
        fits.push_back({{"class", to_string(f.role)},
                        {"n", f.fit.n},
                        {"slope", f.fit.slope},
                        {"intercept", f.fit.intercept},
                        {"r_squared", f.fit.r_squared},
                        {"slope_p_value", f.fit.slope_p_value}});
    }
    return {{"fits", std::move(fits)}, {"warnings", regressions.warnings}};
}

}  // namespace trendflow
