#include "argap/io.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "argap/errors.hpp"

namespace argap {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open: " + path);
    return in;
}

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& token, const std::string& path, int line) {
    const std::string t = strip(token);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size())
        throw ParseError(path + ":" + std::to_string(line) + ": not a number: '" + t + "'");
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string token;
    while (std::getline(ss, token, ',')) out.push_back(token);
    return out;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void write_filters_csv(const std::string& path, const std::vector<Filter>& filters, int lag) {
    auto out = open_out(path);
    for (int l = 1; l <= lag; ++l) out << (l > 1 ? "," : "") << "psi_" << l;
    out << '\n';
    for (const auto& f : filters) {
        for (int l = 1; l <= lag; ++l) out << (l > 1 ? "," : "") << format_double(f.psi(l));
        out << '\n';
    }
}

std::vector<double> read_series_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    int line_no = 0;
    std::vector<double> values;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = strip(line);
        if (t.empty() || t[0] == '#') continue;
        if (!header_seen) {
            if (t != "x")
                throw ParseError(path + ":" + std::to_string(line_no) + ": expected header 'x', got '" + t + "'");
            header_seen = true;
            continue;
        }
        values.push_back(parse_double(t, path, line_no));
    }
    if (!header_seen) throw ParseError(path + ":1: missing header 'x'");
    return values;
}

void write_series_csv(const std::string& path, const std::vector<double>& values) {
    auto out = open_out(path);
    out << "x\n";
    for (double v : values) out << format_double(v) << '\n';
}

void write_refcurve_csv(const std::string& path, const ReferenceCurve& curve) {
    auto out = open_out(path);
    out << "# argap-refcurve lag=" << curve.lag << " m_max=" << curve.m_max
        << " filters=" << curve.n_filters << " instances=" << curve.n_instances
        << " seed=" << curve.seed << '\n';
    out << "M,log_w_ref\n";
    for (int m = 1; m <= curve.m_max; ++m)
        out << m << ',' << format_double(curve.values[static_cast<std::size_t>(m - 1)]) << '\n';
}

ReferenceCurve read_refcurve_csv(const std::string& path) {
    auto in = open_in(path);
    ReferenceCurve curve;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = strip(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            std::stringstream ss(t.substr(1));
            std::string token;
            while (ss >> token) {
                const auto eq = token.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = token.substr(0, eq);
                const std::string value = token.substr(eq + 1);
                if (key == "lag") curve.lag = std::atoi(value.c_str());
                else if (key == "filters") curve.n_filters = std::atoi(value.c_str());
                else if (key == "instances") curve.n_instances = std::atoi(value.c_str());
                else if (key == "seed") curve.seed = std::strtoull(value.c_str(), nullptr, 10);
            }
            continue;
        }
        if (!header_seen) {
            if (t != "M,log_w_ref")
                throw ParseError(path + ":" + std::to_string(line_no) + ": expected header 'M,log_w_ref'");
            header_seen = true;
            continue;
        }
        const auto tokens = split_csv(t);
        if (tokens.size() != 2)
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected two columns");
        const int m = static_cast<int>(parse_double(tokens[0], path, line_no));
        if (m != static_cast<int>(curve.values.size()) + 1)
            throw ParseError(path + ":" + std::to_string(line_no) + ": M values must run 1,2,...");
        curve.values.push_back(parse_double(tokens[1], path, line_no));
    }
    if (curve.values.empty()) throw ParseError(path + ": no curve rows found");
    curve.m_max = static_cast<int>(curve.values.size());
    return curve;
}

nlohmann::json refcurve_to_json(const ReferenceCurve& curve) {
    return nlohmann::json{{"lag", curve.lag},
                          {"m_max", curve.m_max},
                          {"values", curve.values},
                          {"n_filters", curve.n_filters},
                          {"n_instances", curve.n_instances},
                          {"seed", curve.seed}};
}

ReferenceCurve refcurve_from_json(const nlohmann::json& j) {
    ReferenceCurve curve;
    curve.lag = j.at("lag").get<int>();
    curve.m_max = j.at("m_max").get<int>();
    curve.values = j.at("values").get<std::vector<double>>();
    curve.n_filters = j.at("n_filters").get<int>();
    curve.n_instances = j.at("n_instances").get<int>();
    curve.seed = j.at("seed").get<std::uint64_t>();
    if (static_cast<int>(curve.values.size()) != curve.m_max)
        throw ParseError("reference curve values do not match m_max");
    return curve;
}

void write_refcurve(const std::string& path, const ReferenceCurve& curve, bool as_json) {
    if (as_json) {
        auto out = open_out(path);
        out << refcurve_to_json(curve).dump(2) << '\n';
    } else {
        write_refcurve_csv(path, curve);
    }
}

ReferenceCurve read_refcurve(const std::string& path) {
    if (ends_with(path, ".json")) {
        auto in = open_in(path);
        try {
            return refcurve_from_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path + ": " + e.what());
        }
    }
    return read_refcurve_csv(path);
}

void write_gap_csv(const std::string& path, const GapAnalysis& analysis) {
    auto out = open_out(path);
    out << "# argap-select selected_m=" << analysis.result.selected_m
        << " aic_m=" << analysis.result.aic_m << " bic_m=" << analysis.result.bic_m << '\n';
    out << "M,log_w_ref,log_mspe_emp,gap\n";
    const auto& r = analysis.result;
    for (std::size_t i = 0; i < r.gaps.size(); ++i)
        out << (i + 1) << ',' << format_double(r.reference.values[i]) << ','
            << format_double(r.empirical[i]) << ',' << format_double(r.gaps[i]) << '\n';
}

nlohmann::json gap_analysis_json(const GapAnalysis& analysis, int n_obs,
                                 const std::string& presample_source) {
    const auto& r = analysis.result;
    nlohmann::json per_m = nlohmann::json::array();
    for (std::size_t i = 0; i < analysis.curve.fits.size(); ++i) {
        const auto& fit = analysis.curve.fits[i];
        per_m.push_back({{"m", i + 1},
                         {"log_w_ref", r.reference.values[i]},
                         {"log_mspe_emp", r.empirical[i]},
                         {"gap", r.gaps[i]},
                         {"mspe", analysis.curve.mspe[i]},
                         {"mspe_min", analysis.curve.mspe_min[i]},
                         {"sigma2", fit.model.sigma2},
                         {"log_likelihood", fit.log_likelihood},
                         {"aic", aic(fit, n_obs)},
                         {"bic", bic(fit, n_obs)},
                         {"em_converged", fit.converged},
                         {"em_iterations", fit.n_iterations}});
    }
    return nlohmann::json{{"selected_m", r.selected_m},
                          {"aic_m", r.aic_m},
                          {"bic_m", r.bic_m},
                          {"n_obs", n_obs},
                          {"presample", presample_source},
                          {"reference", refcurve_to_json(r.reference)},
                          {"curves", per_m}};
}

nlohmann::json model_to_json(const MixtureARModel& model) {
    nlohmann::json modes = nlohmann::json::array();
    for (const auto& mode : model.modes) modes.push_back(mode.coefficients());
    return nlohmann::json{{"weights", model.weights}, {"modes", modes}, {"sigma2", model.sigma2}};
}

MixtureARModel model_from_json(const nlohmann::json& j) {
    MixtureARModel model;
    model.weights = j.at("weights").get<std::vector<double>>();
    for (const auto& mode : j.at("modes")) model.modes.emplace_back(mode.get<std::vector<double>>());
    model.sigma2 = j.at("sigma2").get<double>();
    model.validate();
    return model;
}

nlohmann::json rootset_to_json(const RootSet& roots) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : roots.complex_pairs()) pairs.push_back({p.x, p.y});
    return nlohmann::json{{"complex_pairs", pairs}, {"reals", roots.reals()}};
}

RootSet rootset_from_json(const nlohmann::json& j) {
    std::vector<ComplexPair> pairs;
    for (const auto& p : j.at("complex_pairs")) pairs.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    return RootSet(std::move(pairs), j.at("reals").get<std::vector<double>>());
}

void write_experiment_csv(const std::string& path, const ExperimentTable& table) {
    auto out = open_out(path);
    out << "scenario,method,selected_m,count\n";
    for (std::size_t k = 0; k < ExperimentTable::kMethods.size(); ++k)
        for (int m = 1; m <= table.m_max; ++m)
            out << table.scenario << ',' << ExperimentTable::kMethods[k] << ',' << m << ','
                << table.counts[k][static_cast<std::size_t>(m - 1)] << '\n';
    for (std::size_t k = 0; k < ExperimentTable::kMethods.size(); ++k)
        out << table.scenario << ',' << ExperimentTable::kMethods[k] << ",accuracy,"
            << format_double(table.accuracy[k]) << '\n';
}

nlohmann::json experiment_to_json(const ExperimentTable& table) {
    nlohmann::json methods;
    for (std::size_t k = 0; k < ExperimentTable::kMethods.size(); ++k) {
        methods[ExperimentTable::kMethods[k]] = {{"counts", table.counts[k]},
                                                 {"accuracy", table.accuracy[k]},
                                                 {"modal_m", table.modal_m[k]}};
    }
    return nlohmann::json{{"scenario", table.scenario},
                          {"true_m", table.true_m},
                          {"m_max", table.m_max},
                          {"n_replications", table.n_replications},
                          {"methods", methods}};
}

void write_distance_csv(const std::string& path, const DistanceTable& table) {
    auto out = open_out(path);
    for (int i = 0; i < table.size(); ++i) {
        for (int j = 0; j < table.size(); ++j)
            out << (j > 0 ? "," : "") << format_double(table.entry(i, j));
        out << '\n';
    }
}

void write_text_file(const std::string& path, const std::string& contents) {
    auto out = open_out(path);
    out << contents;
}

}  // namespace argap
