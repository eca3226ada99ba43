#include "sufcast/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>

#include "sufcast/errors.hpp"

namespace sufcast {

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(v(i))) out.push_back(v(i));
    else out.push_back(nullptr);
  }
  return out;
}

Json columns_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(to_json(m.col(j)));
  return out;
}

namespace {

using Check = std::function<bool(const Json&)>;

const Check is_number = [](const Json& j) { return j.is_number(); };
const Check is_number_or_null = [](const Json& j) { return j.is_number() || j.is_null(); };
const Check is_int = [](const Json& j) { return j.is_number_integer(); };
const Check is_string = [](const Json& j) { return j.is_string(); };
const Check is_object = [](const Json& j) { return j.is_object(); };
const Check is_bool = [](const Json& j) { return j.is_boolean(); };

Check array_of(Check inner) {
  return [inner](const Json& j) {
    if (!j.is_array()) return false;
    for (const Json& e : j) {
      if (!inner(e)) return false;
    }
    return true;
  };
}

class Checker {
 public:
  explicit Checker(std::vector<std::string>& problems) : problems_(problems) {}

  void require(const Json& obj, const std::string& path, const std::string& key, const Check& check) {
    if (!obj.is_object() || !obj.contains(key)) {
      problems_.push_back(path + key + ": missing");
    } else if (!check(obj.at(key))) {
      problems_.push_back(path + key + ": wrong type");
    }
  }

 private:
  std::vector<std::string>& problems_;
};

void check_common(Checker& c, const Json& r) {
  c.require(r, "", "schema_version", is_int);
  c.require(r, "", "config", is_object);
  c.require(r, "", "warnings", array_of(is_string));
}

void check_forecast(Checker& c, const Json& r) {
  c.require(r, "", "input", is_object);
  if (r.contains("input")) {
    const Json& in = r["input"];
    c.require(in, "input.", "num_series", is_int);
    c.require(in, "input.", "num_periods", is_int);
    c.require(in, "input.", "target", is_string);
  }
  c.require(r, "", "selection", is_object);
  if (r.contains("selection")) {
    const Json& s = r["selection"];
    c.require(s, "selection.", "num_factors", is_int);
    c.require(s, "selection.", "num_factors_auto", is_bool);
    c.require(s, "selection.", "num_slices", is_int);
    c.require(s, "selection.", "num_indices", is_int);
    c.require(s, "selection.", "num_indices_auto", is_bool);
  }
  c.require(r, "", "full_sample", is_object);
  if (r.contains("full_sample")) {
    const Json& f = r["full_sample"];
    c.require(f, "full_sample.", "factor_eigenvalues", array_of(is_number_or_null));
    c.require(f, "full_sample.", "sliced_covariance_eigenvalues", array_of(is_number_or_null));
    c.require(f, "full_sample.", "directions_psi", array_of(array_of(is_number_or_null)));
    c.require(f, "full_sample.", "directions_xi", array_of(array_of(is_number_or_null)));
  }
  c.require(r, "", "result", is_object);
  if (r.contains("result")) {
    const Json& s = r["result"];
    c.require(s, "result.", "method", is_string);
    c.require(s, "result.", "r2_in", is_number_or_null);
    c.require(s, "result.", "r2_oos", is_number_or_null);
    c.require(s, "result.", "split_index", is_int);
    c.require(s, "result.", "failures", is_int);
  }
  c.require(r, "", "forecasts", array_of(is_object));
  if (r.contains("forecasts") && r["forecasts"].is_array()) {
    for (const Json& row : r["forecasts"]) {
      c.require(row, "forecasts[].", "period", is_string);
      c.require(row, "forecasts[].", "actual", is_number);
      c.require(row, "forecasts[].", "forecast", is_number_or_null);
    }
  }
}

void check_simulate(Checker& c, const Json& r) {
  c.require(r, "", "design", is_object);
  if (r.contains("design")) {
    const Json& d = r["design"];
    c.require(d, "design.", "dgp", is_string);
    c.require(d, "design.", "p", is_int);
    c.require(d, "design.", "T", is_int);
    c.require(d, "design.", "K", is_int);
    c.require(d, "design.", "ar_factor", array_of(is_number));
    c.require(d, "design.", "sigma_y", is_number);
  }
  c.require(r, "", "reps", is_int);
  c.require(r, "", "failures", is_int);
  c.require(r, "", "metrics", array_of(is_object));
  if (r.contains("metrics") && r["metrics"].is_array()) {
    for (const Json& row : r["metrics"]) {
      c.require(row, "metrics[].", "name", is_string);
      c.require(row, "metrics[].", "median", is_number_or_null);
      c.require(row, "metrics[].", "sd", is_number_or_null);
      c.require(row, "metrics[].", "count", is_int);
    }
  }
  c.require(r, "", "per_rep", is_object);
}

void check_factors(Checker& c, const Json& r) {
  c.require(r, "", "input", is_object);
  c.require(r, "", "num_factors", is_int);
  c.require(r, "", "num_factors_auto", is_bool);
  c.require(r, "", "eigenvalues", array_of(is_number_or_null));
  c.require(r, "", "ratios", array_of(is_number_or_null));
  c.require(r, "", "projected", is_bool);
}

}  // namespace

std::vector<std::string> validate_report(const Json& report) {
  std::vector<std::string> problems;
  if (!report.is_object()) return {"report is not a JSON object"};
  Checker c(problems);
  c.require(report, "", "schema", is_string);
  if (!problems.empty()) return problems;
  check_common(c, report);
  const std::string schema = report["schema"];
  if (schema == "sufcast.forecast") check_forecast(c, report);
  else if (schema == "sufcast.simulate") check_simulate(c, report);
  else if (schema == "sufcast.factors") check_factors(c, report);
  else problems.push_back("schema: unknown value '" + schema + "'");
  if (report.contains("schema_version") && report["schema_version"] != kReportVersion) {
    problems.push_back("schema_version: unsupported");
  }
  return problems;
}

void write_report(const std::string& path, const Json& report) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << report.dump(2) << '\n';
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

std::string sibling_csv(const std::string& report_path, const std::string& suffix) {
  std::filesystem::path p(report_path);
  const std::string stem = p.stem().string();
  return (p.parent_path() / (stem + "_" + suffix + ".csv")).string();
}

}  // namespace sufcast
