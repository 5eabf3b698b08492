#include "distloc/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace distloc::io {

using nlohmann::json;

double round_significant(double value) {
  if (!std::isfinite(value)) return value;
  return std::strtod(format_number(value).c_str(), nullptr);
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

namespace {

// nlohmann prints the shortest string that round-trips, so rounding first
// caps the output at 12 significant digits.
json number(double value) { return round_significant(value); }

json numbers(const std::vector<double>& values) {
  json out = json::array();
  for (double v : values) out.push_back(number(v));
  return out;
}

template <class T>
T field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw FormatError(std::string("missing field '") + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

json instance_to_json(const Instance& instance) {
  json districts = json::array();
  for (const auto& group : instance.grouped_positions()) districts.push_back(numbers(group));
  return json{{"lambda", instance.lambda()}, {"districts", districts}};
}

Instance instance_from_json(const json& doc) {
  const json& lambda = doc.is_object() && doc.contains("lambda") ? doc.at("lambda") : json();
  if (!lambda.is_number_integer() || lambda.get<long long>() < 1) {
    throw FormatError("'lambda' must be a positive integer");
  }
  if (!doc.contains("districts") || !doc.at("districts").is_array()) {
    throw FormatError("'districts' must be an array of arrays of numbers");
  }
  std::vector<std::vector<double>> grouped;
  for (const json& district : doc.at("districts")) {
    if (!district.is_array()) throw FormatError("each district must be an array");
    std::vector<double> positions;
    for (const json& x : district) {
      if (!x.is_number()) throw FormatError("positions must be numbers");
      positions.push_back(x.get<double>());
    }
    grouped.push_back(std::move(positions));
  }
  if (grouped.empty()) throw InvalidInstance("instance has no districts");

  std::vector<double> positions;
  std::vector<District> districts;
  for (const auto& group : grouped) {
    District d;
    for (double x : group) {
      d.push_back(positions.size());
      positions.push_back(x);
    }
    districts.push_back(std::move(d));
  }
  return Instance(std::move(positions), std::move(districts),
                  lambda.get<std::size_t>());
}

Instance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open instance file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("instance file '" + path + "' is not valid JSON: " + e.what());
  }
  return instance_from_json(doc);
}

json report_to_json(const EvaluationReport& report) {
  json distortion = report.distortion.is_unbounded()
                        ? json("unbounded")
                        : number(report.distortion.value());
  return json{{"mechanism", report.mechanism},
              {"objective", std::string(to_string(report.objective))},
              {"representatives", numbers(report.representatives)},
              {"winner", number(report.winner)},
              {"winner_cost", number(report.winner_cost)},
              {"optimum",
               {{"location", number(report.optimum.location)},
                {"cost", number(report.optimum.cost)}}},
              {"distortion", distortion}};
}

EvaluationReport report_from_json(const json& doc) {
  EvaluationReport report;
  report.mechanism = field<std::string>(doc, "mechanism");
  const auto objective = parse_objective(field<std::string>(doc, "objective"));
  if (!objective) throw FormatError("unknown objective in report");
  report.objective = *objective;
  report.representatives = field<std::vector<double>>(doc, "representatives");
  report.winner = field<double>(doc, "winner");
  report.winner_cost = field<double>(doc, "winner_cost");
  const json optimum = field<json>(doc, "optimum");
  report.optimum = {field<double>(optimum, "location"), field<double>(optimum, "cost")};
  const json distortion = field<json>(doc, "distortion");
  if (distortion.is_string() && distortion.get<std::string>() == "unbounded") {
    report.distortion = Distortion::unbounded();
  } else if (distortion.is_number()) {
    report.distortion = Distortion::finite(distortion.get<double>());
  } else {
    throw FormatError("'distortion' must be a number or \"unbounded\"");
  }
  return report;
}

json search_to_json(const std::string& mechanism, Objective objective,
                    const SearchResult& result) {
  return json{{"mechanism", mechanism},
              {"objective", std::string(to_string(objective))},
              {"best_distortion", number(result.best_distortion)},
              {"trials", result.trials},
              {"seed", result.seed},
              {"origin", result.origin},
              {"best_instance", instance_to_json(result.best_instance)}};
}

json manipulation_to_json(const std::optional<Manipulation>& found) {
  if (!found) return nullptr;
  return json{{"agent", found->agent},
              {"true_position", number(found->true_position)},
              {"misreport", number(found->misreport)},
              {"honest_cost", number(found->honest_cost)},
              {"deviating_cost", number(found->deviating_cost)}};
}

void write_table_csv(std::ostream& out, const std::vector<TableRow>& rows) {
  out << kTableHeader << '\n';
  for (const TableRow& row : rows) {
    out << row.mechanism << ',' << to_string(row.objective) << ',' << row.k << ','
        << row.lambda << ',' << format_number(row.empirical_distortion) << ','
        << format_number(row.paper_bound) << ',' << row.lb_family << ','
        << format_number(row.lb_distortion) << ',' << (row.pass ? "true" : "false")
        << '\n';
  }
}

std::vector<TableRow> read_table_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTableHeader) {
    throw FormatError("table CSV must start with the header line");
  }
  std::vector<TableRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 9) throw FormatError("table row needs 9 columns: " + line);
    TableRow row;
    try {
      row.mechanism = cells[0];
      const auto objective = parse_objective(cells[1]);
      if (!objective) throw FormatError("unknown objective '" + cells[1] + "'");
      row.objective = *objective;
      row.k = std::stoul(cells[2]);
      row.lambda = std::stoul(cells[3]);
      row.empirical_distortion = std::stod(cells[4]);
      row.paper_bound = std::stod(cells[5]);
      row.lb_family = cells[6];
      row.lb_distortion = std::stod(cells[7]);
    } catch (const std::logic_error& e) {
      throw FormatError("malformed table row '" + line + "': " + e.what());
    }
    if (cells[8] != "true" && cells[8] != "false") {
      throw FormatError("pass column must be true or false");
    }
    row.pass = cells[8] == "true";
    rows.push_back(std::move(row));
  }
  return rows;
}

json table_to_json(const std::vector<TableRow>& rows) {
  json out = json::array();
  for (const TableRow& row : rows) {
    out.push_back({{"mechanism", row.mechanism},
                   {"objective", std::string(to_string(row.objective))},
                   {"k", row.k},
                   {"lambda", row.lambda},
                   {"empirical_distortion", number(row.empirical_distortion)},
                   {"paper_bound", number(row.paper_bound)},
                   {"lb_family", row.lb_family},
                   {"lb_distortion", number(row.lb_distortion)},
                   {"pass", row.pass}});
  }
  return out;
}

}  // namespace distloc::io
