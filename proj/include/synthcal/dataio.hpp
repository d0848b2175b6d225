#pragma once

// Dataset ingestion with validation, response-scale mapping, and results
// serialization (JSON container plus CSV export of curve/aggregate rows).

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "synthcal/calibration.hpp"
#include "synthcal/core_stats.hpp"
#include "synthcal/evaluation.hpp"
#include "synthcal/simulator.hpp"

namespace synthcal {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kDatasetVersion = "synthcal-dataset-1";
inline constexpr const char* kResultsVersion = "synthcal-results-1";
inline constexpr const char* kToolVersion = "0.1.0";

struct dataio_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DatasetQuestion {
    CalibrationRecord record;
    std::string text;
    std::vector<std::string> options;
};

struct Dataset {
    std::string version = kDatasetVersion;
    ResponseRange range{0.0, 1.0};
    std::optional<std::vector<double>> score_map;  // categorical option scores
    std::vector<DatasetQuestion> questions;        // responses as stored in the file

    // Records with the score map applied; the only categorical-to-numeric
    // conversion point.
    std::vector<CalibrationRecord> records() const;
};

namespace detail {

// The single categorical-to-numeric conversion point: 1-based option index
// to its configured score.
inline double map_score(const std::vector<double>& score_map, double raw,
                        const std::string& question_id, const char* field) {
    double idx = raw;
    if (idx != std::floor(idx) || idx < 1.0 || idx > static_cast<double>(score_map.size()))
        throw dataio_error("question '" + question_id + "': " + field + " option index " +
                           std::to_string(raw) + " outside 1.." +
                           std::to_string(score_map.size()));
    return score_map[static_cast<std::size_t>(idx) - 1];
}

inline std::vector<double> read_response_list(const ordered_json& j, const std::string& qid,
                                              const char* field) {
    if (!j.contains(field) || !j.at(field).is_array())
        throw dataio_error("question '" + qid + "': missing or non-array field '" +
                           std::string(field) + "'");
    std::vector<double> out;
    for (const auto& v : j.at(field)) {
        if (!v.is_number())
            throw dataio_error("question '" + qid + "': non-numeric entry in '" +
                               std::string(field) + "'");
        out.push_back(v.get<double>());
    }
    return out;
}

inline ordered_json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw dataio_error("cannot open '" + path + "' for reading");
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw dataio_error("'" + path + "': " + e.what());
    }
    return j;
}

// Doubles that JSON numbers cannot carry are encoded as strings.
inline ordered_json encode_double(double v) {
    if (std::isnan(v)) return "nan";
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    return v;
}

inline double decode_double(const ordered_json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string& s = j.get_ref<const std::string&>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw dataio_error("expected a numeric value, got " + j.dump());
}

}  // namespace detail

inline Dataset parse_dataset(const ordered_json& j, const std::string& context) {
    Dataset ds;
    if (!j.contains("version") || !j.at("version").is_string())
        throw dataio_error(context + ": missing 'version' field");
    ds.version = j.at("version").get<std::string>();
    if (ds.version != kDatasetVersion)
        throw dataio_error(context + ": unsupported dataset version '" + ds.version + "'");
    if (!j.contains("response_range") || !j.at("response_range").is_array() ||
        j.at("response_range").size() != 2)
        throw dataio_error(context + ": missing or malformed 'response_range' [lo, hi]");
    ds.range.lo = j.at("response_range")[0].get<double>();
    ds.range.hi = j.at("response_range")[1].get<double>();
    if (!(ds.range.lo < ds.range.hi))
        throw dataio_error(context + ": response_range must satisfy lo < hi");
    if (j.contains("score_map")) {
        std::vector<double> map = j.at("score_map").get<std::vector<double>>();
        if (map.size() < 2) throw dataio_error(context + ": score_map needs >= 2 entries");
        ds.score_map = std::move(map);
    }
    if (!j.contains("questions") || !j.at("questions").is_array() || j.at("questions").empty())
        throw dataio_error(context + ": missing or empty 'questions' array");

    std::set<std::string> seen_ids;
    for (const auto& q : j.at("questions")) {
        if (!q.contains("id") || !q.at("id").is_string())
            throw dataio_error(context + ": question without string 'id'");
        DatasetQuestion question;
        CalibrationRecord& rec = question.record;
        rec.question_id = q.at("id").get<std::string>();
        if (!seen_ids.insert(rec.question_id).second)
            throw dataio_error(context + ": duplicate question id '" + rec.question_id + "'");
        if (q.contains("text")) question.text = q.at("text").get<std::string>();
        if (q.contains("options"))
            question.options = q.at("options").get<std::vector<std::string>>();
        rec.dims = 1;
        if (q.contains("dims")) {
            if (!q.at("dims").is_number_unsigned() || q.at("dims").get<std::size_t>() < 1)
                throw dataio_error("question '" + rec.question_id +
                                   "': 'dims' must be a positive integer");
            rec.dims = q.at("dims").get<std::size_t>();
        }
        rec.real_responses = detail::read_response_list(q, rec.question_id, "real_responses");
        rec.synthetic_responses =
            detail::read_response_list(q, rec.question_id, "synthetic_responses");
        if (rec.real_responses.empty())
            throw dataio_error("question '" + rec.question_id + "': empty 'real_responses'");

        // Stored responses stay raw; validation maps option indices through
        // the score map without mutating them.
        auto check_values = [&](const std::vector<double>& vals, const char* field) {
            for (double v : vals) {
                if (rec.dims > 1) {
                    if (v != std::floor(v) || v < 0.0 || v >= static_cast<double>(rec.dims))
                        throw dataio_error("question '" + rec.question_id + "': " + field +
                                           " category " + std::to_string(v) +
                                           " outside [0, dims)");
                    continue;
                }
                double mapped =
                    ds.score_map ? detail::map_score(*ds.score_map, v, rec.question_id, field)
                                 : v;
                if (!ds.range.contains(mapped))
                    throw dataio_error("question '" + rec.question_id + "': " + field +
                                       " value " + std::to_string(mapped) +
                                       " outside range [" + std::to_string(ds.range.lo) + ", " +
                                       std::to_string(ds.range.hi) + "]");
            }
        };
        check_values(rec.real_responses, "real_responses");
        check_values(rec.synthetic_responses, "synthetic_responses");
        ds.questions.push_back(std::move(question));
    }
    return ds;
}

inline std::vector<CalibrationRecord> Dataset::records() const {
    std::vector<CalibrationRecord> out;
    out.reserve(questions.size());
    for (const DatasetQuestion& q : questions) {
        CalibrationRecord rec = q.record;
        if (score_map && rec.dims == 1) {
            for (double& v : rec.real_responses)
                v = detail::map_score(*score_map, v, rec.question_id, "real_responses");
            for (double& v : rec.synthetic_responses)
                v = detail::map_score(*score_map, v, rec.question_id, "synthetic_responses");
        }
        out.push_back(std::move(rec));
    }
    return out;
}

inline Dataset load_dataset_file(const std::string& path) {
    return parse_dataset(detail::parse_json_file(path), "'" + path + "'");
}

// Loads and validates a dataset, returning calibration records with scores
// already mapped.
inline std::vector<CalibrationRecord> load_dataset(const std::string& path) {
    return load_dataset_file(path).records();
}

// Checks the loaded dataset against a requested simulation budget.
inline void validate_budget(std::span<const CalibrationRecord> records, std::size_t budget) {
    for (const CalibrationRecord& rec : records)
        if (rec.synthetic_responses.size() < budget)
            throw dataio_error("question '" + rec.question_id + "': has " +
                               std::to_string(rec.synthetic_responses.size()) +
                               " synthetic responses, budget K = " + std::to_string(budget));
}

inline ordered_json dataset_to_json(const Dataset& ds) {
    ordered_json j;
    j["version"] = ds.version;
    j["response_range"] = {ds.range.lo, ds.range.hi};
    if (ds.score_map) j["score_map"] = *ds.score_map;
    j["questions"] = ordered_json::array();
    for (const DatasetQuestion& q : ds.questions) {
        ordered_json qj;
        qj["id"] = q.record.question_id;
        if (!q.text.empty()) qj["text"] = q.text;
        if (!q.options.empty()) qj["options"] = q.options;
        if (q.record.dims != 1) qj["dims"] = q.record.dims;
        qj["real_responses"] = q.record.real_responses;
        qj["synthetic_responses"] = q.record.synthetic_responses;
        j["questions"].push_back(std::move(qj));
    }
    return j;
}

inline void write_json_file(const ordered_json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw dataio_error("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw dataio_error("write to '" + path + "' failed");
}

inline void write_dataset(const Dataset& ds, const std::string& path) {
    write_json_file(dataset_to_json(ds), path);
}

// -------------------------------------------------------------------------
// Results container
// -------------------------------------------------------------------------

struct ResultsFile {
    ordered_json meta = ordered_json::object();  // config echo, seed, version
    std::vector<ordered_json> rows;              // tagged records

    bool operator==(const ResultsFile& other) const {
        return meta == other.meta && rows == other.rows;
    }
};

inline void write_results(const ResultsFile& results, const std::string& path) {
    ordered_json j;
    j["version"] = kResultsVersion;
    j["meta"] = results.meta;
    j["rows"] = results.rows;
    write_json_file(j, path);
}

inline ResultsFile read_results(const std::string& path) {
    ordered_json j = detail::parse_json_file(path);
    if (!j.contains("version") || j.at("version") != kResultsVersion)
        throw dataio_error("'" + path + "': not a results file (bad version)");
    ResultsFile results;
    results.meta = j.at("meta");
    for (const auto& row : j.at("rows")) results.rows.push_back(row);
    return results;
}

// Row builders shared by the CLI subcommands.
namespace rows {

inline ordered_json curve_row(std::size_t k, const std::string& metric, double value,
                              const ordered_json& extra = ordered_json::object()) {
    ordered_json row;
    row["type"] = "curve";
    row["k"] = k;
    row["metric"] = metric;
    row["value"] = detail::encode_double(value);
    for (auto it = extra.begin(); it != extra.end(); ++it) row[it.key()] = it.value();
    return row;
}

inline std::vector<ordered_json> from_calibration(const CalibrationResult& result,
                                                  const ordered_json& extra =
                                                      ordered_json::object()) {
    std::vector<ordered_json> out;
    const std::string metric = result.method == Method::simple ? "G" : "L";
    for (std::size_t k = 0; k < result.curve.size(); ++k)
        out.push_back(curve_row(k, metric, result.curve[k], extra));
    ordered_json summary;
    summary["type"] = "selection";
    summary["k_hat"] = result.k_hat;
    summary["kappa_hat"] = result.kappa_hat;
    summary["threshold"] = result.threshold;
    summary["method"] = to_string(result.method);
    for (auto it = extra.begin(); it != extra.end(); ++it) summary[it.key()] = it.value();
    out.push_back(std::move(summary));
    return out;
}

inline std::vector<ordered_json> from_evaluation(const EvaluationReport& report) {
    std::vector<ordered_json> out;
    for (const SplitResult& r : report.per_split) {
        ordered_json row;
        row["type"] = "split";
        row["split"] = r.split;
        row["k_hat"] = r.k_hat;
        row["proxy_at_k_hat"] = detail::encode_double(r.proxy_at_k_hat);
        row["k_star_te"] = r.k_star_te;
        if (r.relative_error) row["relative_error"] = detail::encode_double(*r.relative_error);
        row["mean_halfwidth"] = detail::encode_double(r.mean_halfwidth);
        row["kappa_hat"] = r.kappa_hat;
        out.push_back(std::move(row));
    }
    for (const auto& [field, agg] : report.aggregate) {
        ordered_json row;
        row["type"] = "aggregate";
        row["field"] = field;
        row["mean"] = detail::encode_double(agg.mean);
        row["std_error"] = detail::encode_double(agg.std_error);
        row["ci95_halfwidth"] = detail::encode_double(agg.ci95_halfwidth);
        row["n"] = agg.n;
        out.push_back(std::move(row));
    }
    return out;
}

inline std::vector<ordered_json> from_discrepancy(const DiscrepancyReport& report) {
    std::vector<ordered_json> out;
    for (const QuestionDiscrepancy& q : report.per_question) {
        ordered_json row;
        row["type"] = "discrepancy";
        row["question"] = q.question;
        row["degenerate"] = q.degenerate;
        if (!q.degenerate) {
            row["chi2"] = detail::encode_double(q.chi2);
            row["kl"] = detail::encode_double(q.kl);
        }
        out.push_back(std::move(row));
    }
    for (const auto& [level, value] : report.chi2_quantiles) {
        ordered_json row;
        row["type"] = "quantile";
        row["metric"] = "chi2";
        row["level"] = level;
        row["value"] = detail::encode_double(value);
        out.push_back(std::move(row));
    }
    for (const auto& [level, value] : report.kl_quantiles) {
        ordered_json row;
        row["type"] = "quantile";
        row["metric"] = "kl";
        row["level"] = level;
        row["value"] = detail::encode_double(value);
        out.push_back(std::move(row));
    }
    ordered_json deg;
    deg["type"] = "degenerate_count";
    deg["count"] = report.degenerate_count;
    out.push_back(std::move(deg));
    return out;
}

inline ordered_json from_oracle(const OracleResult& result) {
    ordered_json row;
    row["type"] = "oracle";
    row["k_star"] = result.k_star;
    row["censored"] = result.censored;
    row["coverage_at_k_star"] = detail::encode_double(result.coverage_at_k_star);
    row["std_error"] = detail::encode_double(result.std_error);
    return row;
}

}  // namespace rows

// CSV export of curve and aggregate rows; header row
// `k,metric,value,split,question_id`.
inline std::string results_to_csv(const ResultsFile& results) {
    std::ostringstream csv;
    csv << "k,metric,value,split,question_id\n";
    auto cell = [](const ordered_json& row, const char* key) {
        if (!row.contains(key)) return std::string();
        const auto& v = row.at(key);
        if (v.is_string()) return v.get<std::string>();
        return v.dump();
    };
    for (const ordered_json& row : results.rows) {
        std::string type = row.value("type", "");
        if (type == "curve") {
            csv << cell(row, "k") << ',' << cell(row, "metric") << ',' << cell(row, "value")
                << ',' << cell(row, "split") << ',' << cell(row, "question_id") << "\n";
        } else if (type == "aggregate") {
            std::string field = cell(row, "field");
            csv << ',' << field << ".mean," << cell(row, "mean") << ",,\n";
            csv << ',' << field << ".std_error," << cell(row, "std_error") << ",,\n";
            csv << ',' << field << ".ci95_halfwidth," << cell(row, "ci95_halfwidth") << ",,\n";
        }
    }
    return csv.str();
}

inline void write_csv(const ResultsFile& results, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw dataio_error("cannot open '" + path + "' for writing");
    out << results_to_csv(results);
    if (!out) throw dataio_error("write to '" + path + "' failed");
}

}  // namespace synthcal
