#include "cdops/io.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

namespace cdops {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw UsageError("cannot open " + path.string() + " for writing");
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot open " + path.string());
  return is;
}

/// Splits one CSV line honoring double-quoted fields.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

double parse_double(const std::string& s, const char* what) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw UsageError(std::string("bad ") + what + " value '" + s + "'");
  }
}

}  // namespace

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& field) {
  if (field.find(',') == std::string::npos && field.find('"') == std::string::npos) {
    return field;
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

void write_envelope_csv(const std::filesystem::path& path, const Envelope& e) {
  auto os = open_out(path);
  os << "element,value\n";
  for (const auto& [key, v] : e.values()) {
    os << csv_quote(format_element(key.second)) << ',' << format_full(v) << '\n';
  }
}

Envelope read_envelope_csv(const std::filesystem::path& path,
                           std::shared_ptr<const Group> group) {
  auto is = open_in(path);
  Envelope e(std::move(group));
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto fields = split_csv(line);
    if (fields.size() != 2) throw UsageError("envelope CSV row needs 2 fields: " + line);
    e.set(parse_element(fields[0]), parse_double(fields[1], "envelope"));
  }
  return e;
}

void write_envelope_curve_csv(const std::filesystem::path& path, const Envelope& e) {
  auto os = open_out(path);
  os << "z,|z|,b_value\n";
  for (const auto& [key, v] : e.values()) {
    os << csv_quote(format_element(key.second)) << ',' << key.first << ','
       << format_full(v) << '\n';
  }
}

void write_matrix_csv(const std::filesystem::path& path, const CDMatrix& a) {
  auto os = open_out(path);
  os << "z,y,re,im\n";
  for (const auto& [kz, fn] : a.diagonals()) {
    for (const auto& [ky, v] : fn) {
      os << csv_quote(format_element(kz.second)) << ',' << csv_quote(format_element(ky.second))
         << ',' << format_full(v.real()) << ',' << format_full(v.imag()) << '\n';
    }
  }
  json meta;
  meta["group"] = a.group()->spec().name();
  meta["K"] = a.diag_radius();
  meta["N"] = a.col_radius();
  meta["max_radius"] = a.group()->max_radius();
  write_json(path.string() + ".meta.json", meta);
}

CDMatrix read_matrix_csv(const std::filesystem::path& path) {
  json meta;
  {
    auto is = open_in(path.string() + ".meta.json");
    is >> meta;
  }
  GroupSpec spec = GroupSpec::parse(meta.at("group").get<std::string>());
  if (meta.contains("max_radius")) spec.max_radius = meta["max_radius"].get<int>();
  auto group = Group::make(spec);
  CDMatrix a(group);
  auto is = open_in(path);
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto fields = split_csv(line);
    if (fields.size() != 4) throw UsageError("matrix CSV row needs 4 fields: " + line);
    a.set_entry(parse_element(fields[0]), parse_element(fields[1]),
                Complex(parse_double(fields[2], "re"), parse_double(fields[3], "im")));
  }
  return a;
}

void write_dense_csv(const std::filesystem::path& path, const DenseSection& m) {
  {
    auto os = open_out(path);
    for (Eigen::Index i = 0; i < m.entries.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.entries.cols(); ++j) {
        if (j) os << ',';
        const Complex v = m.entries(i, j);
        os << format_full(v.real()) << ';' << format_full(v.imag());
      }
      os << '\n';
    }
  }
  auto manifest = open_out(path.string() + ".manifest.csv");
  manifest << "index,element,word_length\n";
  for (std::size_t i = 0; i < m.ball->size(); ++i) {
    manifest << i << ',' << csv_quote(format_element(m.ball->at(i))) << ','
             << m.ball->word_length_at(i) << '\n';
  }
}

json spectral_json(const SpectralEstimate& est) {
  json j;
  j["r"] = est.r;
  j["opnorm"] = est.opnorm;
  j["ratio"] = est.ratio;
  return j;
}

json lp_table_json(const std::vector<LpRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"radius", r.radius},
                   {"norm1", r.norm1},
                   {"norm2", r.norm2},
                   {"norminf", r.norminf},
                   {"inv1", r.inv1},
                   {"inv2", r.inv2},
                   {"invinf", r.invinf},
                   {"cond1", r.cond1},
                   {"cond2", r.cond2},
                   {"condinf", r.condinf}});
  }
  return arr;
}

json weighted_check_json(const WeightedCheck& wc) {
  json j;
  j["weight"] = wc.weight_spec;
  j["grs"] = to_string(wc.grs);
  j["hypothesis_ok"] = wc.hypothesis_ok;
  j["weighted_norms"] = wc.weighted_norms;
  j["weighted_off_identity"] = wc.weighted_off_identity;
  j["deltas"] = wc.deltas;
  j["tail_sums"] = wc.tail_sums;
  j["shell_sums"] = wc.shell_sums;
  j["non_membership"] = wc.non_membership;
  j["verdict"] = wc.verdict;
  return j;
}

json inversion_report_json(const InversionReport& rep) {
  json j;
  j["group"] = rep.group;
  j["matrix"] = rep.matrix;
  j["seed"] = rep.seed;
  j["verdict"] = rep.verdict;
  j["hypothesis_ok"] = rep.hypothesis_ok;
  j["deltas"] = rep.deltas;
  j["tail_sums"] = rep.tail_sums;
  j["final_cd_norm"] = rep.final_cd_norm;
  json rads = json::array();
  for (const auto& r : rep.per_radius) {
    json one;
    one["radius"] = r.radius;
    one["margin"] = r.margin;
    one["cd_norm_b"] = r.cd_norm_b;
    one["pivot_min"] = r.pivot_min;
    one["cond1"] = r.cond1;
    one["singular"] = r.singular;
    if (!r.error.empty()) one["error"] = r.error;
    rads.push_back(one);
  }
  j["per_radius"] = rads;
  if (!rep.lp.empty()) j["lp"] = lp_table_json(rep.lp);
  if (rep.weighted) j["weighted"] = weighted_check_json(*rep.weighted);
  return j;
}

void write_json(const std::filesystem::path& path, const json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

}  // namespace cdops
