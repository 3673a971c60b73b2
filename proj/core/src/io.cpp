#include "lpstab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lpstab/errors.hpp"

namespace lpstab {
namespace io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string space_to_canonical(const MetricSpace& sp) {
  std::ostringstream os;
  switch (sp.kind()) {
    case MetricSpace::Kind::ZInterval:
      os << "{\"kind\":\"z_interval\",\"n\":" << sp.size() << "}";
      break;
    case MetricSpace::Kind::ZdBox: {
      os << "{\"kind\":\"zd_box\",\"dims\":[";
      const auto& dims = sp.box_dims();
      for (std::size_t i = 0; i < dims.size(); ++i)
        os << (i ? "," : "") << dims[i];
      os << "]}";
      break;
    }
    case MetricSpace::Kind::Tree:
      os << "{\"kind\":\"tree\",\"degree\":" << sp.tree_degree()
         << ",\"radius\":" << sp.tree_radius() << "}";
      break;
    case MetricSpace::Kind::Explicit: {
      os << "{\"kind\":\"explicit\",\"distances\":[";
      for (int i = 0; i < sp.size(); ++i) {
        os << (i ? ",[" : "[");
        for (int k = 0; k < sp.size(); ++k)
          os << (k ? "," : "") << format_double(sp.distance(i, k));
        os << "]";
      }
      os << "]}";
      break;
    }
    case MetricSpace::Kind::Discrete:
      os << "{\"kind\":\"discrete\",\"n\":" << sp.size() << "}";
      break;
  }
  return os.str();
}

SpacePtr space_from_json(const json& j, const std::string& origin) {
  if (!j.is_object() || !j.contains("kind"))
    throw FormatError(origin + ": space must be an object with a kind");
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "z_interval")
    return std::make_shared<const MetricSpace>(
        MetricSpace::z_interval(j.at("n").get<int>()));
  if (kind == "zd_box")
    return std::make_shared<const MetricSpace>(
        MetricSpace::zd_box(j.at("dims").get<std::vector<int>>()));
  if (kind == "tree")
    return std::make_shared<const MetricSpace>(MetricSpace::tree(
        j.at("degree").get<int>(), j.at("radius").get<int>()));
  if (kind == "explicit")
    return std::make_shared<const MetricSpace>(MetricSpace::explicit_table(
        j.at("distances").get<std::vector<std::vector<double>>>()));
  if (kind == "discrete")
    return std::make_shared<const MetricSpace>(
        MetricSpace::discrete(j.at("n").get<int>()));
  throw FormatError(origin + ": unknown space kind '" + kind + "'");
}

}  // namespace

IndexedMatrix parse_matrix(const std::string& text,
                           const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(origin + ": " + e.what());
  }
  try {
    SpacePtr sp;
    try {
      sp = space_from_json(j.at("space"), origin);
    } catch (const InvalidMetricError& e) {
      // an inconsistent distance table in a file is a parse-level failure
      throw FormatError(origin + ": " + e.what());
    }
    bool same = false;
    int rows = 0;
    const json& r = j.at("rows");
    if (r.is_string() && r.get<std::string>() == "same") {
      same = true;
      rows = sp->size();
    } else if (r.is_number_integer()) {
      rows = r.get<int>();
    } else {
      throw FormatError(origin + ": rows must be \"same\" or an integer");
    }
    std::vector<Entry> entries;
    for (const json& t : j.at("entries")) {
      if (!t.is_array() || t.size() != 3)
        throw FormatError(origin + ": entries must be [row, col, value]");
      entries.push_back({t[0].get<std::int32_t>(), t[1].get<std::int32_t>(),
                         t[2].get<double>()});
    }
    try {
      return IndexedMatrix::from_entries(sp, rows, same, std::move(entries));
    } catch (const ShapeError& e) {
      throw FormatError(origin + ": " + e.what());
    }
  } catch (const json::exception& e) {
    throw FormatError(origin + ": " + e.what());
  }
}

IndexedMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_matrix(ss.str(), path.string());
}

std::string matrix_to_json(const IndexedMatrix& a) {
  std::ostringstream os;
  os << "{\"space\":" << space_to_canonical(a.col_space());
  os << ",\"rows\":";
  if (a.rows_are_cols())
    os << "\"same\"";
  else
    os << a.rows();
  os << ",\"entries\":[";
  bool first = true;
  for (const Entry& e : a.entries()) {
    os << (first ? "" : ",") << "[" << e.row << "," << e.col << ","
       << format_double(e.value) << "]";
    first = false;
  }
  os << "]}\n";
  return os.str();
}

void atomic_write_text(const std::filesystem::path& path,
                       const std::string& text) {
  auto dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

void write_matrix(const IndexedMatrix& a, const std::filesystem::path& path) {
  atomic_write_text(path, matrix_to_json(a));
}

RunConfig RunConfig::defaults() {
  RunConfig c;
  c.p_grid = default_p_grid();
  c.L_sweep = {8, 16, 32, 64, 128, 256};
  return c;
}

void RunConfig::validate() const {
  for (Exponent p : p_grid)
    if (!p.is_inf() && p.value() < 0.1)
      throw ParameterError("config: grid exponents must be >= 0.1");
  if (!allow_sparse_grid) {
    bool has1 = false, has2 = false, hasinf = false;
    for (Exponent p : p_grid) {
      if (p.is_inf()) hasinf = true;
      else if (p.value() == 1.0) has1 = true;
      else if (p.value() == 2.0) has2 = true;
    }
    if (!(has1 && has2 && hasinf))
      throw ParameterError(
          "config: p grid must include 1, 2 and inf (or pass the sparse-grid "
          "flag)");
  }
}

std::vector<Exponent> parse_p_grid(const std::string& csv) {
  std::vector<Exponent> grid;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) grid.push_back(parse_exponent(item));
  if (grid.empty()) throw ParameterError("empty p grid");
  return grid;
}

namespace {

json estimate_to_json(const LambdaEstimate& e) {
  json j;
  j["p"] = e.p.str();
  j["lambda_hat"] = e.value;
  j["method"] = lambda_method_name(e.method);
  j["witness_support_radius"] = e.witness_support_radius;
  j["seed"] = e.seed;
  return j;
}

}  // namespace

std::string stability_report_json(const StabilityReport& r) {
  json j;
  j["estimates"] = json::array();
  for (const auto& e : r.estimates) j["estimates"].push_back(estimate_to_json(e));
  j["lambda"] = r.lambda_small;
  j["Lambda"] = r.Lambda_big;
  j["p_m"] = r.p_m.str();
  j["p_M"] = r.p_M.str();
  j["sigma_max"] = r.sigma_max;
  j["verdict"] = verdict_name(r.verdict);
  j["seed"] = r.seed;
  j["constants"] = {{"alpha", 6.0}, {"K_z", 18.0}, {"zrem2_factor", 162.0}};
  return j.dump(2) + "\n";
}

std::string stability_report_csv(const StabilityReport& r) {
  std::ostringstream os;
  os << "p,lambda_hat,method,witness_support_radius,seed\n";
  for (const auto& e : r.estimates)
    os << e.p.str() << "," << format_double(e.value) << ","
       << lambda_method_name(e.method) << ","
       << format_double(e.witness_support_radius) << "," << e.seed << "\n";
  return os.str();
}

std::string pipeline_report_json(const PipelineReport& r) {
  json j;
  j["windows"] = r.windows;
  j["lambda2_by_window"] = r.lambda2_by_window;
  j["trend_exponent"] = r.trend_exponent;
  j["verdict"] = verdict_name(r.verdict);
  j["notes"] = r.notes;
  j["decay"] = {{"radii", r.decay.radii},
                {"errors", r.decay.errors},
                {"fitted_t", r.decay.fitted_t},
                {"class", decay_class_name(r.decay.decay_class)}};
  j["rows"] = json::array();
  for (const auto& row : r.rows) {
    json x;
    x["window"] = row.window;
    x["p"] = row.p.str();
    x["lambda_hat"] = row.lambda_hat;
    if (row.norm_B_p) x["norm_B_p"] = *row.norm_B_p;
    if (row.schur_B) x["schur_B"] = *row.schur_B;
    if (row.weighted_schur_B) x["weighted_schur_B"] = *row.weighted_schur_B;
    if (row.cd_B) x["cd_B"] = *row.cd_B;
    x["fitted_t"] = row.fitted_t;
    x["verdict"] = verdict_name(row.verdict);
    j["rows"].push_back(std::move(x));
  }
  if (r.inverse) {
    j["inverse_diagnostics"] = {
        {"ba_minus_i_max", r.inverse->diagnostics.ba_minus_i_max},
        {"sigma_min", r.inverse->diagnostics.sigma_min},
        {"sigma_max", r.inverse->diagnostics.sigma_max},
        {"gram_propagation", r.inverse->diagnostics.gram_propagation},
        {"gram_limit", r.inverse->diagnostics.gram_limit}};
    if (r.inverse->diagnostics.b_offband) {
      const auto& ob = *r.inverse->diagnostics.b_offband;
      j["inverse_diagnostics"]["b_offband_fitted_t"] = ob.fitted_t;
      j["inverse_diagnostics"]["b_offband_class"] =
          decay_class_name(ob.decay_class);
    }
  }
  j["stability"] = json::parse(stability_report_json(r.stability));
  return j.dump(2) + "\n";
}

std::string pipeline_report_csv(const PipelineReport& r) {
  std::ostringstream os;
  os << "window,p,lambda_hat,norm_B_p,schur_B,weighted_schur_B,fitted_t,"
        "verdict\n";
  for (const auto& row : r.rows) {
    os << row.window << "," << row.p.str() << ","
       << format_double(row.lambda_hat) << ",";
    if (row.norm_B_p) os << format_double(*row.norm_B_p);
    os << ",";
    if (row.schur_B) os << format_double(*row.schur_B);
    os << ",";
    if (row.weighted_schur_B) os << format_double(*row.weighted_schur_B);
    os << "," << format_double(row.fitted_t) << ","
       << verdict_name(row.verdict) << "\n";
  }
  return os.str();
}

std::string localize_certificate_json(const LocalizeCertificate& c) {
  json j;
  j["p"] = c.p.str();
  j["L"] = c.L;
  j["r"] = c.r;
  j["C1"] = c.C1;
  j["C2"] = c.C2;
  j["ratio_f"] = c.ratio_f;
  j["ratio_h"] = c.ratio_h;
  j["bound"] = c.bound;
  j["holds"] = c.holds;
  j["class_capture"] = c.class_capture;
  j["additivity_gap"] = c.additivity_gap;
  j["support_radius"] = c.support_radius;
  j["num_balls"] = c.num_balls;
  j["shift_or_color"] = c.shift_or_color;
  j["constants"] = {{"alpha", 6.0}};
  return j.dump(2) + "\n";
}

std::string chain_result_json(const ChainResult& c) {
  json j;
  j["k_constant"] = c.k_constant;
  j["Lambda_exponent"] = c.Lambda_exponent;
  j["bound"] = c.bound;
  j["consistent"] = c.consistent;
  j["steps"] = json::array();
  for (const auto& s : c.steps)
    j["steps"].push_back({{"from", s.from.str()},
                          {"to", s.to.str()},
                          {"gap", s.gap},
                          {"factor", s.factor},
                          {"exponent", s.exponent}});
  if (c.zrem2) {
    json z;
    z["denominator"] = c.zrem2->denominator;
    z["tol"] = c.zrem2->tol;
    z["holds"] = c.zrem2->holds;
    z["rows"] = json::array();
    for (std::size_t i = 0; i < c.zrem2->grid.size(); ++i)
      z["rows"].push_back({{"p", c.zrem2->grid[i].str()},
                           {"lambda_hat", c.zrem2->lambda_hat[i]},
                           {"rhs", c.zrem2->rhs[i]}});
    z["constants"] = {{"K", 18.0}, {"factor", 162.0}};
    j["zrem2"] = std::move(z);
  }
  return j.dump(2) + "\n";
}

}  // namespace io
}  // namespace lpstab
