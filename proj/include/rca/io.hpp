#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rca/experiments.hpp"

namespace rca {

using Json = nlohmann::json;

// Fixed %.17g rendering so emitted tables are byte-stable across runs.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_input("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw invalid_input("cannot write file: " + path);
  out << content;
}

// Matrix file: "# rows cols" header, then one comma-separated line per row.
inline std::string matrix_to_csv(const Matrix& m) {
  std::ostringstream ss;
  ss << "# " << m.rows() << " " << m.cols() << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) ss << ",";
      ss << format_double(m(i, j));
    }
    ss << "\n";
  }
  return ss.str();
}

namespace detail {

// Header line "# a b c ..." -> integers; values: remaining numbers in order.
inline std::vector<long long> csv_header_ints(const std::string& text, std::size_t* body_start) {
  const std::size_t eol = text.find('\n');
  if (text.empty() || text[0] != '#' || eol == std::string::npos)
    throw invalid_input("csv: missing '#' header line");
  std::istringstream hs(text.substr(1, eol - 1));
  std::vector<long long> dims;
  std::string tok;
  while (hs >> tok) {
    if (tok == "tensor") continue;
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &pos);
    } catch (...) {
      throw invalid_input("csv: bad header token " + tok);
    }
    if (pos != tok.size() || v < 0) throw invalid_input("csv: bad header token " + tok);
    dims.push_back(v);
  }
  if (dims.empty()) throw invalid_input("csv: empty header");
  *body_start = eol + 1;
  return dims;
}

inline std::vector<double> csv_values(const std::string& text, std::size_t body_start,
                                      std::size_t expected) {
  std::string body = text.substr(body_start);
  for (auto& c : body)
    if (c == ',') c = ' ';
  std::istringstream vs(body);
  std::vector<double> vals;
  vals.reserve(expected);
  double x;
  while (vs >> x) vals.push_back(x);
  vs.clear();
  std::string leftover;
  if (vs >> leftover) throw invalid_input("csv: non-numeric value " + leftover);
  if (vals.size() != expected)
    throw invalid_input("csv: expected " + std::to_string(expected) + " values, found " +
                        std::to_string(vals.size()));
  return vals;
}

}  // namespace detail

inline Matrix matrix_from_csv(const std::string& text) {
  std::size_t body = 0;
  const auto dims = detail::csv_header_ints(text, &body);
  if (dims.size() != 2) throw invalid_input("csv: matrix header must be '# rows cols'");
  const auto rows = static_cast<Eigen::Index>(dims[0]);
  const auto cols = static_cast<Eigen::Index>(dims[1]);
  const auto vals =
      detail::csv_values(text, body, static_cast<std::size_t>(dims[0]) * dims[1]);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = vals[static_cast<std::size_t>(i * cols + j)];
  return m;
}

inline std::string vector_to_csv(const Vector& v) {
  return matrix_to_csv(Matrix(v));
}

inline Vector vector_from_csv(const std::string& text) {
  const Matrix m = matrix_from_csv(text);
  if (m.cols() != 1) throw invalid_input("csv: expected a single-column vector file");
  return m.col(0);
}

// Tensor file: "# tensor d1 ... dt" header, values row-major with the last
// index fastest, one line per last-dimension slice.
inline std::string tensor_to_csv(const DenseTensor& t) {
  std::ostringstream ss;
  ss << "# tensor";
  for (int d : t.dims()) ss << " " << d;
  ss << "\n";
  const int last = t.dims().empty() ? 1 : t.dims().back();
  for (std::size_t i = 0; i < t.size(); ++i) {
    ss << format_double(t[i]);
    ss << ((static_cast<int>(i % static_cast<std::size_t>(last)) == last - 1) ? "\n" : ",");
  }
  return ss.str();
}

inline DenseTensor tensor_from_csv(const std::string& text) {
  if (text.rfind("# tensor", 0) != 0) throw invalid_input("csv: missing '# tensor' header");
  std::size_t body = 0;
  const auto dims = detail::csv_header_ints(text, &body);
  std::vector<int> shape(dims.begin(), dims.end());
  DenseTensor t(shape);
  const auto vals = detail::csv_values(text, body, t.size());
  for (std::size_t i = 0; i < vals.size(); ++i) t[i] = vals[i];
  return t;
}

// ---- JSON (de)serialization -------------------------------------------------

// Subsets are written with 1-based view labels; internally views are 0-based.
inline Json set_system_to_json(const SetSystem& sys) {
  Json j;
  j["k"] = sys.k;
  Json subs = Json::array();
  for (const auto& q : sys.subsets) {
    Json s = Json::array();
    for (int i : q) s.push_back(i + 1);
    subs.push_back(std::move(s));
  }
  j["subsets"] = std::move(subs);
  if (sys.L) j["L"] = *sys.L;
  return j;
}

inline SetSystem set_system_from_json(const Json& j) {
  if (!j.is_object()) throw invalid_input("set_system: expected a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "k" && key != "subsets" && key != "L")
      throw invalid_input("set_system: unknown key " + key);
  SetSystem sys;
  try {
    sys.k = j.at("k").get<int>();
    for (const auto& q : j.at("subsets")) {
      std::vector<int> sub;
      for (const auto& i : q) sub.push_back(i.get<int>() - 1);
      sys.subsets.push_back(std::move(sub));
    }
    if (j.contains("L")) sys.L = j.at("L").get<int>();
  } catch (const Json::exception& e) {
    throw invalid_input(std::string("set_system: ") + e.what());
  }
  sys.validate();
  return sys;
}

inline Json config_to_json(const ExperimentConfig& cfg) {
  Json j;
  j["setting"] = setting_name(cfg.setting);
  j["d"] = cfg.d;
  j["n"] = cfg.n;
  j["perturbation_ratio"] = cfg.perturbation_ratio;
  j["seed"] = cfg.seed;
  j["arms"] = cfg.arms;
  j["repeats"] = cfg.repeats;
  j["t_max"] = cfg.t_max;
  j["poly_degree"] = cfg.poly_degree;
  j["batch"] = cfg.batch;
  j["sigma"] = cfg.sigma;
  j["a_min_sv"] = cfg.a_min_sv;
  j["radius"] = cfg.radius;
  j["cca_threshold"] = cfg.cca_threshold;
  j["sgd_steps"] = cfg.sgd_steps;
  j["sgd_step"] = cfg.sgd_step;
  j["gd_iters"] = cfg.gd_iters;
  j["ls_iters"] = cfg.ls_iters;
  j["als_tol"] = cfg.als_tol;
  j["restarts"] = cfg.restarts;
  j["estimate_a"] = cfg.estimate_a;
  if (cfg.setting == Setting::general) j["set_system"] = set_system_to_json(cfg.set_system);
  return j;
}

// Strict: unknown keys are rejected so config typos fail loudly.
inline ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw invalid_input("config: expected a JSON object");
  ExperimentConfig cfg;
  try {
    for (const auto& [key, val] : j.items()) {
      if (key == "setting")
        cfg.setting = setting_from_name(val.get<std::string>());
      else if (key == "d")
        cfg.d = val.get<int>();
      else if (key == "n")
        cfg.n = val.get<int>();
      else if (key == "perturbation_ratio")
        cfg.perturbation_ratio = val.get<double>();
      else if (key == "seed")
        cfg.seed = val.get<std::uint64_t>();
      else if (key == "arms")
        cfg.arms = val.get<std::vector<std::string>>();
      else if (key == "repeats")
        cfg.repeats = val.get<int>();
      else if (key == "t_max")
        cfg.t_max = val.get<int>();
      else if (key == "poly_degree")
        cfg.poly_degree = val.get<int>();
      else if (key == "batch")
        cfg.batch = val.get<int>();
      else if (key == "sigma")
        cfg.sigma = val.get<double>();
      else if (key == "a_min_sv")
        cfg.a_min_sv = val.get<double>();
      else if (key == "radius")
        cfg.radius = val.get<double>();
      else if (key == "cca_threshold")
        cfg.cca_threshold = val.get<double>();
      else if (key == "sgd_steps")
        cfg.sgd_steps = val.get<int>();
      else if (key == "sgd_step")
        cfg.sgd_step = val.get<double>();
      else if (key == "gd_iters")
        cfg.gd_iters = val.get<int>();
      else if (key == "ls_iters")
        cfg.ls_iters = val.get<int>();
      else if (key == "als_tol")
        cfg.als_tol = val.get<double>();
      else if (key == "restarts")
        cfg.restarts = val.get<int>();
      else if (key == "estimate_a")
        cfg.estimate_a = val.get<bool>();
      else if (key == "set_system")
        cfg.set_system = set_system_from_json(val);
      else
        throw invalid_input("config: unknown key " + key);
    }
  } catch (const Json::exception& e) {
    throw invalid_input(std::string("config: ") + e.what());
  }
  return cfg;
}

inline ExperimentConfig config_from_json_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw invalid_input(std::string("config: ") + e.what());
  }
  return config_from_json(j);
}

inline Json report_to_json(const RunReport& report) {
  Json j;
  j["config"] = config_to_json(report.config);
  Json summary = Json::array();
  for (const auto& s : report.arms) {
    Json a;
    a["arm"] = s.arm;
    a["mean_mse"] = s.mean_mse;
    a["std_mse"] = s.std_mse;
    a["successes"] = s.successes;
    a["failures"] = s.failures;
    summary.push_back(std::move(a));
  }
  j["summary"] = std::move(summary);
  Json reps = Json::array();
  for (const auto& rr : report.repeats) {
    Json r;
    r["sub_seed"] = rr.sub_seed;
    if (report.config.setting != Setting::general) {
      r["a_sigma_min"] = rr.a_sigma_min;
      r["a_sigma_max"] = rr.a_sigma_max;
    }
    Json arms = Json::array();
    for (const auto& a : rr.arms) {
      Json ja;
      ja["arm"] = a.arm;
      ja["ok"] = a.ok;
      if (a.ok)
        ja["mse"] = a.mse;
      else
        ja["error"] = a.error;
      if (!a.trace.empty()) ja["trace"] = a.trace;
      arms.push_back(std::move(ja));
    }
    r["arms"] = std::move(arms);
    reps.push_back(std::move(r));
  }
  j["repeats"] = std::move(reps);
  j["timing"] = Json{{"wall_ms", report.wall_ms}};
  return j;
}

// One row per (config, arm): the table Fig.-1-style sweeps are built from.
inline std::string reports_to_csv(const std::vector<RunReport>& reports) {
  std::ostringstream ss;
  ss << "setting,d,n,perturbation_ratio,seed,arm,mean_mse,std_mse,successes,failures,wall_ms\n";
  for (const auto& r : reports)
    for (const auto& s : r.arms)
      ss << setting_name(r.config.setting) << "," << r.config.d << "," << r.config.n << ","
         << format_double(r.config.perturbation_ratio) << "," << r.config.seed << "," << s.arm
         << "," << format_double(s.mean_mse) << "," << format_double(s.std_mse) << ","
         << s.successes << "," << s.failures << "," << format_double(r.wall_ms) << "\n";
  return ss.str();
}

inline std::string report_to_csv(const RunReport& report) {
  return reports_to_csv({report});
}

// Sweep file: {"configs":[...]} or {"base":{...},"grid":{field:[values,...]}}.
// Grid fields expand as an outer product in key-sorted order.
inline std::vector<ExperimentConfig> sweep_configs_from_json_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw invalid_input(std::string("sweep: ") + e.what());
  }
  if (!j.is_object()) throw invalid_input("sweep: expected a JSON object");
  std::vector<ExperimentConfig> out;
  if (j.contains("configs")) {
    for (const auto& [key, _] : j.items())
      if (key != "configs") throw invalid_input("sweep: unknown key " + key);
    for (const auto& jc : j.at("configs")) out.push_back(config_from_json(jc));
    return out;
  }
  if (!j.contains("base") || !j.contains("grid"))
    throw invalid_input("sweep: need either 'configs' or 'base'+'grid'");
  for (const auto& [key, _] : j.items())
    if (key != "base" && key != "grid") throw invalid_input("sweep: unknown key " + key);
  Json base = j.at("base");
  const Json& grid = j.at("grid");
  if (!grid.is_object()) throw invalid_input("sweep: grid must be an object of arrays");
  std::vector<Json> expanded = {base};
  for (const auto& [field, values] : grid.items()) {
    if (!values.is_array() || values.empty())
      throw invalid_input("sweep: grid." + field + " must be a nonempty array");
    std::vector<Json> next;
    for (const auto& cfg : expanded)
      for (const auto& v : values) {
        Json c = cfg;
        c[field] = v;
        next.push_back(std::move(c));
      }
    expanded = std::move(next);
  }
  for (const auto& jc : expanded) out.push_back(config_from_json(jc));
  return out;
}

}  // namespace rca
