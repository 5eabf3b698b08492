#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "distloc/analysis.hpp"
#include "distloc/instance.hpp"

namespace distloc::io {

/// Thrown for documents that do not match the expected schema.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every number written by this module carries at most 12 significant digits.
double round_significant(double value);
std::string format_number(double value);

// Instance: {"lambda": int, "districts": [[float, ...], ...]}. Agents are
// numbered district-major in the order listed.

nlohmann::json instance_to_json(const Instance& instance);
/// Throws FormatError on schema problems and InvalidInstance when the data
/// breaks an instance invariant.
Instance instance_from_json(const nlohmann::json& doc);
Instance read_instance(const std::string& path);

nlohmann::json report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const nlohmann::json& doc);

nlohmann::json search_to_json(const std::string& mechanism, Objective objective,
                              const SearchResult& result);

nlohmann::json manipulation_to_json(const std::optional<Manipulation>& found);

// Table CSV:
// mechanism,objective,k,lambda,empirical_distortion,paper_bound,lb_family,lb_distortion,pass

inline constexpr const char* kTableHeader =
    "mechanism,objective,k,lambda,empirical_distortion,paper_bound,lb_family,"
    "lb_distortion,pass";

void write_table_csv(std::ostream& out, const std::vector<TableRow>& rows);
std::vector<TableRow> read_table_csv(std::istream& in);
nlohmann::json table_to_json(const std::vector<TableRow>& rows);

}  // namespace distloc::io
