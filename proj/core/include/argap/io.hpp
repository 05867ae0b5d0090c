#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "argap/clustering.hpp"
#include "argap/filter.hpp"
#include "argap/gap.hpp"
#include "argap/mixture.hpp"
#include "argap/simulate.hpp"

namespace argap {

// Shortest round-trip decimal representation; all file output goes through
// this so identical values serialize to identical bytes.
std::string format_double(double value);

// Filters: CSV with header psi_1..psi_L, one filter per row.
void write_filters_csv(const std::string& path, const std::vector<Filter>& filters, int lag);

// Series: CSV with header `x`, one observation per row.
std::vector<double> read_series_csv(const std::string& path);
void write_series_csv(const std::string& path, const std::vector<double>& values);

// Reference curve: CSV with a `# argap-refcurve ...` metadata comment and
// columns M,log_w_ref; or a JSON mirror carrying the same fields.
void write_refcurve_csv(const std::string& path, const ReferenceCurve& curve);
ReferenceCurve read_refcurve_csv(const std::string& path);
nlohmann::json refcurve_to_json(const ReferenceCurve& curve);
ReferenceCurve refcurve_from_json(const nlohmann::json& j);
void write_refcurve(const std::string& path, const ReferenceCurve& curve, bool as_json);
ReferenceCurve read_refcurve(const std::string& path);  // dispatch on .json extension

// Gap selection output: CSV columns M,log_w_ref,log_mspe_emp,gap, or the
// full JSON report (selection, curves, per-M fit diagnostics, metadata).
void write_gap_csv(const std::string& path, const GapAnalysis& analysis);
nlohmann::json gap_analysis_json(const GapAnalysis& analysis, int n_obs,
                                 const std::string& presample_source);

// Mixture model: JSON {weights[], modes[][], sigma2}.
nlohmann::json model_to_json(const MixtureARModel& model);
MixtureARModel model_from_json(const nlohmann::json& j);

// Root sets: JSON {complex_pairs: [[x, y], ...], reals: [...]}.
nlohmann::json rootset_to_json(const RootSet& roots);
RootSet rootset_from_json(const nlohmann::json& j);

// Experiment table: CSV rows scenario,method,selected_m,count followed by
// one accuracy summary row per method; or a JSON mirror.
void write_experiment_csv(const std::string& path, const ExperimentTable& table);
nlohmann::json experiment_to_json(const ExperimentTable& table);

// Distance table: dense CSV, row i = distances from filter i.
void write_distance_csv(const std::string& path, const DistanceTable& table);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace argap
