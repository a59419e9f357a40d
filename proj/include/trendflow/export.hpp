#pragma once

// Plain-text exports of analysis results: CSV, JSON, DOT, GeoJSON, Newick.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "trendflow/backbone.hpp"
#include "trendflow/depnet.hpp"
#include "trendflow/episodes.hpp"
#include "trendflow/geocluster.hpp"
#include "trendflow/gmm.hpp"
#include "trendflow/setters.hpp"
#include "trendflow/stats.hpp"

namespace trendflow {

// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

std::vector<std::string> location_ids(const LocationCatalog& catalog, const std::vector<LocationIndex>& nodes);

// trend,kind,n_locations,lifetime_min,entropy_nats
void write_stats_csv(std::ostream& out, const TrendEpisodeTable& episodes, const std::vector<TrendSpread>& spreads);
// n_locations,trends
void write_histogram_csv(std::ostream& out, const std::vector<std::size_t>& histogram);
// <x_name>,mean_lifetime_min,std_error,count
void write_curve_csv(std::ostream& out, const BinnedCurve& curve, const std::string& x_name);
// lifetime_min,cdf (one row per distinct value)
void write_cdf_csv(std::ostream& out, const LifetimeCdf& cdf);

// src,dst,weight
void write_edge_list(std::ostream& out, const std::vector<std::string>& ids, const std::vector<Arc>& arcs);
void write_dot(std::ostream& out, const std::string& graph_name, const std::vector<std::string>& ids,
               const std::vector<Arc>& arcs);
// FeatureCollection of LineStrings from source to target coordinates.
nlohmann::ordered_json arcs_geojson(const LocationCatalog& catalog, const std::vector<LocationIndex>& nodes,
                                    const std::vector<Arc>& arcs);
// loc,omega,s_in,s_out,rank in rank order; omega is empty for isolated nodes
void write_ranking_csv(std::ostream& out, const std::vector<std::string>& ids, const SourceSinkRanking& ranking);

// loc,cluster
void write_assignment_csv(std::ostream& out, const std::vector<std::string>& ids, const std::vector<int>& labels);
// Square matrix with a leading loc column.
void write_similarity_csv(std::ostream& out, const std::vector<std::string>& ids, const SimilarityMatrix& similarity);
// group,x,density for each cluster's intra similarities and the pooled inter similarities.
void write_kde_csv(std::ostream& out, const ClusterModel& model, std::size_t points = 200);
nlohmann::ordered_json significance_json(const SignificanceReport& report);

// loc,n_before,n_after,label
void write_counts_csv(std::ostream& out, const LocationCatalog& catalog, const SetterFollowerCounts& counts,
                      const CityLabeling& labeling);
nlohmann::ordered_json gmm_json(const GmmModel& model);
nlohmann::ordered_json regression_json(const ClassRegressions& regressions);

}  // namespace trendflow
